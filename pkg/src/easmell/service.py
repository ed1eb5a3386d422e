"""Loopback HTTP service exposing runs, findings, decisions, and re-assessment.

The service is a thin JSON layer over the library: detection jobs run in a
small thread pool and are polled via run status, review decisions go through
the hash-chained log on disk, and nothing is ever answered from state that
would not survive a restart.
"""

from __future__ import annotations

import os
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .corpus import Corpus, load_corpus
from .detect.types import BackendProfile, DetectionProtocol, DetectionReport, DetectionRequest
from .detect.runner import new_run_id, run_detection
from .errors import (
    BackendRejected,
    BackendUnreachable,
    EasmellError,
    EmptyContext,
    MissingGroundTruth,
    ReplayMissing,
    UnknownDocument,
    UnknownFinding,
    UnknownRun,
)
from .evaluation import doc_exact_accuracy, metrics_from_counts, pair_confusion
from .report import Decision, append_decision, make_decision, request_reassessment
from .smells import catalog, catalog_as_dicts
from .store import RunStore
from .verify import classify_errors, verify_report_findings, VerifiedFinding
from .verify import VerificationStatus

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 8643

AUTH_TOKEN_ENV = "EASMELL_SERVICE_TOKEN"

_ERROR_CODES: list[tuple[type, str, int]] = [
    (UnknownFinding, "unknown_finding", 404),
    (UnknownRun, "unknown_run", 404),
    (UnknownDocument, "unknown_document", 404),
    (EmptyContext, "empty_context", 422),
    (MissingGroundTruth, "missing_ground_truth", 409),
    (BackendRejected, "backend_rejected", 502),
    (BackendUnreachable, "backend_unreachable", 502),
    (ReplayMissing, "replay_missing", 502),
]


class RunRequestBody(BaseModel):
    profile: str
    protocol: str = "single"
    corpus: Optional[str] = None
    request_id: Optional[str] = None
    seed: Optional[int] = None
    temperature: float = 0.0
    max_findings_per_doc: int = 12


class DecisionBody(BaseModel):
    verdict: str
    reviewer: str
    note: str = ""
    request_id: Optional[str] = None


class ReassessBody(BaseModel):
    run_id: str
    context: str
    profile: Optional[str] = None
    request_id: Optional[str] = None


def default_profiles() -> dict[str, BackendProfile]:
    return {"baseline": BackendProfile(id="baseline", kind="lexical_baseline")}


class ServiceState:
    def __init__(self, data_dir: str, profiles: dict[str, BackendProfile] | None = None):
        self.store = RunStore(data_dir)
        self.profiles = {**default_profiles(), **(profiles or {})}
        self.executor = ThreadPoolExecutor(max_workers=2)
        self._corpus: Corpus | None = None
        self._corpus_lock = threading.Lock()

    def corpus(self) -> Corpus:
        with self._corpus_lock:
            if self._corpus is None:
                self._corpus = load_corpus(self.store.corpus_dir)
            return self._corpus

    def profile(self, name: str) -> BackendProfile:
        if name not in self.profiles:
            raise EasmellError(f"unknown backend profile {name!r}")
        return self.profiles[name]

    def report_of(self, run_id: str) -> DetectionReport:
        if not self.store.has_run(run_id):
            raise UnknownRun(f"run {run_id!r} does not exist")
        record = self.store.load_run(run_id)
        if record.get("status") != "completed":
            raise EasmellError(f"run {run_id!r} is not completed (status {record.get('status')!r})")
        return DetectionReport.from_dict(record["report"])


def _verify_run(report: DetectionReport, corpus: Corpus) -> list[VerifiedFinding]:
    docs_by_id = {d.id: d for d in corpus.documents}
    documents_by_call = {
        t.call_index: [docs_by_id[d] for d in t.doc_ids if d in docs_by_id]
        for t in report.transcripts
    }
    return verify_report_findings(report.findings, documents_by_call)


def create_app(data_dir: str, profiles: dict[str, BackendProfile] | None = None) -> FastAPI:
    state = ServiceState(data_dir, profiles)
    app = FastAPI(title="easmell service", version="0.1.0")
    app.state.easmell = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(EasmellError)
    async def easmell_error_handler(request: Request, exc: EasmellError):
        for cls, code, status in _ERROR_CODES:
            if isinstance(exc, cls):
                return JSONResponse(status_code=status, content={"code": code, "message": str(exc)})
        return JSONResponse(status_code=409, content={"code": "operational_error", "message": str(exc)})

    @app.middleware("http")
    async def token_auth(request: Request, call_next):
        token = os.environ.get(AUTH_TOKEN_ENV, "")
        if token:
            supplied = request.headers.get("Authorization", "")
            if supplied != f"Bearer {token}":
                return JSONResponse(status_code=401, content={"code": "unauthorized", "message": "missing or wrong bearer token"})
        return await call_next(request)

    @app.get("/")
    def index():
        return {
            "service": "easmell",
            "endpoints": [
                "GET /runs", "POST /runs", "GET /runs/{run_id}", "GET /runs/{run_id}/findings",
                "GET /docs/{doc_id}", "POST /runs/{run_id}/findings/{index}/decision",
                "POST /docs/{doc_id}/reassess", "GET /reassessments/{reassessment_id}",
                "GET /metrics/{run_id}", "GET /catalog",
            ],
        }

    @app.get("/catalog")
    def get_catalog():
        return {"smells": catalog_as_dicts()}

    @app.get("/runs")
    def list_runs():
        return {"runs": state.store.list_runs()}

    @app.post("/runs", status_code=202)
    def start_run(body: RunRequestBody):
        existing = state.store.find_by_request_id(body.request_id or "")
        if existing is not None:
            return JSONResponse(status_code=200, content={
                "run_id": existing["run_id"], "status": existing.get("status", "unknown"),
            })
        profile = state.profile(body.profile)
        try:
            protocol = DetectionProtocol.parse(body.protocol)
        except ValueError as exc:
            return JSONResponse(status_code=422, content={"code": "usage", "message": str(exc)})
        corpus = load_corpus(body.corpus) if body.corpus else state.corpus()
        run_id = new_run_id()
        state.store.save_pending(run_id, {
            "kind": "detection",
            "request_id": body.request_id,
            "backend_id": profile.id,
            "protocol": str(protocol),
        })

        def job():
            try:
                request = DetectionRequest(
                    documents=tuple(corpus.documents),
                    protocol=protocol,
                    backend_id=profile.id,
                    seed=body.seed,
                    temperature=body.temperature,
                    max_findings_per_doc=body.max_findings_per_doc,
                )
                report = run_detection(request, profile, run_id=run_id)
                verified = _verify_run(report, corpus)
                state.store.save_run(report, verified, request_id=body.request_id)
            except Exception as exc:  # stored, surfaced via status polling
                state.store.mark_failed(run_id, f"{type(exc).__name__}: {exc}", meta={
                    "kind": "detection", "request_id": body.request_id,
                })

        state.executor.submit(job)
        return {"run_id": run_id, "status": "pending"}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        if not state.store.has_run(run_id):
            raise UnknownRun(f"run {run_id!r} does not exist")
        record = state.store.load_run(run_id)
        payload = {
            "run_id": run_id,
            "status": record.get("status"),
            "kind": record.get("kind", "detection"),
            "prior_run_id": record.get("prior_run_id"),
            "error": record.get("error"),
        }
        report = record.get("report")
        if report:
            docs = []
            corpus_docs = {d.id: d for d in _safe_corpus_documents(state)}
            for doc_id in report["doc_ids"]:
                count = sum(1 for f in report["findings"] if f["resolved_doc_id"] == doc_id)
                doc = corpus_docs.get(doc_id)
                docs.append({"doc_id": doc_id, "title": doc.title if doc else doc_id, "finding_count": count})
            payload.update({
                "backend_id": report["backend_id"],
                "protocol": report["protocol"],
                "prompt_version": report["prompt_version"],
                "seed": report["seed"],
                "temperature": report["temperature"],
                "created_at": report["created_at"],
                "corrective_context": report.get("corrective_context"),
                "total_seconds": report["total_seconds"],
                "call_count": len(report["transcripts"]),
                "finding_count": len(report["findings"]),
                "diagnostic_count": len(report["diagnostics"]),
                "documents": docs,
            })
        return payload

    @app.get("/runs/{run_id}/findings")
    def get_findings(run_id: str):
        if not state.store.has_run(run_id):
            raise UnknownRun(f"run {run_id!r} does not exist")
        record = state.store.load_run(run_id)
        report = record.get("report") or {}
        verification = record.get("verification") or []
        log = state.store.decision_log
        decisions_by_ref: dict[str, list[dict]] = {}
        for entry in log.entries():
            decisions_by_ref.setdefault(entry["decision"]["finding_ref"], []).append(entry)
        findings = []
        for index, finding in enumerate(report.get("findings", [])):
            ref = f"{run_id}:{index}"
            entry = {
                "index": index,
                "finding_ref": ref,
                **finding,
                "verification": verification[index] if index < len(verification) else None,
                "decisions": [e["decision"] for e in decisions_by_ref.get(ref, [])],
            }
            findings.append(entry)
        return {"run_id": run_id, "findings": findings}

    @app.get("/docs/{doc_id}")
    def get_doc(doc_id: str):
        corpus = state.corpus()
        doc = corpus.get(doc_id)
        if doc is None:
            raise UnknownDocument(f"document {doc_id!r} is not in the corpus")
        annotation = next((a for a in corpus.annotations if a.doc_id == doc_id), None)
        payload = doc.to_dict()
        if annotation is not None:
            payload["annotation"] = annotation.to_dict()
        return payload

    @app.post("/runs/{run_id}/findings/{index}/decision", status_code=201)
    def post_decision(run_id: str, index: int, body: DecisionBody):
        if body.request_id:
            existing = state.store.decision_log.find(body.request_id)
            if existing is not None:
                return JSONResponse(status_code=200, content={"decision": existing["decision"],
                                                              "entry_hash": existing["entry_hash"]})
        if body.verdict not in ("accept", "reject", "needs_info"):
            return JSONResponse(status_code=422, content={
                "code": "usage", "message": f"verdict must be accept, reject, or needs_info, got {body.verdict!r}",
            })
        decision = make_decision(
            finding_ref=f"{run_id}:{index}",
            verdict=body.verdict,
            reviewer=body.reviewer,
            note=body.note,
            decision_id=body.request_id,
        )
        entry = append_decision(state.store.decision_log, decision, state.store.finding_exists)
        return {"decision": entry["decision"], "entry_hash": entry["entry_hash"]}

    @app.post("/docs/{doc_id}/reassess", status_code=202)
    def reassess(doc_id: str, body: ReassessBody):
        existing = state.store.find_reassessment_by_request_id(body.request_id or "")
        if existing is not None:
            return JSONResponse(status_code=200, content=existing)
        if not body.context or not body.context.strip():
            raise EmptyContext("corrective context is empty")
        prior = state.report_of(body.run_id)
        if doc_id not in prior.doc_ids:
            raise UnknownDocument(f"document {doc_id!r} is not part of run {body.run_id!r}")
        corpus = state.corpus()
        if corpus.get(doc_id) is None:
            raise UnknownDocument(f"document {doc_id!r} is not in the corpus")
        profile = state.profile(body.profile or prior.backend_id)
        reassessment_id = uuid.uuid4().hex
        pending = {
            "id": reassessment_id,
            "doc_id": doc_id,
            "prior_run_id": body.run_id,
            "result_run_id": None,
            "corrective_context": body.context.strip(),
            "status": "pending",
            "request_id": body.request_id,
        }
        state.store.save_reassessment(pending)

        def job():
            try:
                reassessment, new_report = request_reassessment(
                    doc_id, body.context, prior, profile, corpus.documents,
                    reassessment_id=reassessment_id,
                )
                verified = _verify_run(new_report, corpus)
                state.store.save_run(new_report, verified, kind="reassessment", prior_run_id=body.run_id)
                state.store.save_reassessment({**pending, "status": "completed",
                                               "result_run_id": new_report.run_id})
            except Exception as exc:
                state.store.save_reassessment({**pending, "status": "failed",
                                               "error": f"{type(exc).__name__}: {exc}"})

        state.executor.submit(job)
        return {"reassessment_id": reassessment_id, "status": "pending"}

    @app.get("/reassessments/{reassessment_id}")
    def get_reassessment(reassessment_id: str):
        entry = state.store.get_reassessment(reassessment_id)
        if entry is None:
            raise UnknownRun(f"reassessment {reassessment_id!r} does not exist")
        return entry

    @app.get("/metrics/{run_id}")
    def get_metrics(run_id: str):
        report = state.report_of(run_id)
        corpus = state.corpus()
        truth = [a for a in corpus.annotations if a.doc_id in report.doc_ids]
        if len(truth) < len(report.doc_ids):
            covered = {a.doc_id for a in truth}
            missing = next(d for d in report.doc_ids if d not in covered)
            raise MissingGroundTruth(missing)
        counts = pair_confusion(report, truth)
        row = metrics_from_counts(counts)
        record = state.store.load_run(run_id)
        verification = record.get("verification") or []
        verified = _verified_from_record(report, verification)
        breakdown = classify_errors(verified, truth, catalog())
        return {
            "run_id": run_id,
            "metrics": row.as_dict(),
            "confusion": {"tp": counts.tp, "fp": counts.fp, "fn": counts.fn, "tn": counts.tn},
            "doc_exact_accuracy": doc_exact_accuracy(report, truth),
            "errors": breakdown.counts(),
        }

    return app


def _safe_corpus_documents(state: ServiceState):
    try:
        return state.corpus().documents
    except Exception:
        return []


def _verified_from_record(report: DetectionReport, verification: list[dict]) -> list[VerifiedFinding]:
    out = []
    for index, finding in enumerate(report.findings):
        raw = verification[index] if index < len(verification) else None
        if raw is None:
            raw = {"status": "no_quote_provided", "match_score": 0.0}
        out.append(VerifiedFinding(
            finding=finding,
            status=VerificationStatus(raw["status"]),
            match_score=float(raw.get("match_score", 0.0)),
            doc_id=raw.get("doc_id"),
            start=raw.get("start"),
            end=raw.get("end"),
            actual_doc_id=raw.get("actual_doc_id"),
        ))
    return out


def serve(
    data_dir: str,
    host: str = DEFAULT_HOST,
    port: int = DEFAULT_PORT,
    profiles: dict[str, BackendProfile] | None = None,
    static_dir: str | None = None,
) -> None:
    """Run the service under uvicorn (blocking)."""
    import uvicorn

    app = create_app(data_dir, profiles)
    if static_dir:
        from fastapi.staticfiles import StaticFiles
        app.mount("/console", StaticFiles(directory=static_dir, html=True), name="console")
    uvicorn.run(app, host=host, port=port, log_level="warning")
