"""Orchestration of a detection run: prompt, backend calls, parse, dedup."""

from __future__ import annotations

import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import httpx

from ..errors import BackendRejected
from .backends import RemoteChatBackend, make_backend
from .parsing import dedup_findings, parse_model_output
from .prompts import PromptConfig, assemble_prompt
from .types import (
    BackendProfile,
    DetectionReport,
    DetectionRequest,
    Finding,
    OVER_CAP_TAG,
    ParseDiagnostic,
    Transcript,
)

DEFAULT_CONCURRENCY = 4


def new_run_id() -> str:
    return f"run-{datetime.now(timezone.utc):%Y%m%dT%H%M%S}-{uuid.uuid4().hex[:8]}"


def _tag_over_cap(findings: list[Finding], cap: int) -> list[Finding]:
    """Tag findings beyond the per-document cap; nothing is dropped."""
    per_doc: dict[str | None, int] = {}
    tagged = []
    for finding in findings:
        count = per_doc.get(finding.resolved_doc_id, 0) + 1
        per_doc[finding.resolved_doc_id] = count
        if finding.resolved_doc_id is not None and count > cap:
            tagged.append(finding.with_tag(OVER_CAP_TAG))
        else:
            tagged.append(finding)
    return tagged


def run_detection(
    request: DetectionRequest,
    profile: BackendProfile,
    *,
    concurrency: int = DEFAULT_CONCURRENCY,
    run_id: str | None = None,
    prompt_config: PromptConfig | None = None,
    transport: httpx.BaseTransport | None = None,
) -> DetectionReport:
    """Execute one detection run and return a self-contained report.

    Calls may run concurrently up to `concurrency`, but findings and
    transcripts are reassembled in request order so reports are stable.
    """
    if prompt_config is None:
        prompt_config = PromptConfig(corrective_context=request.corrective_context)
    bundle = assemble_prompt(request.documents, request.protocol, prompt_config)

    cap = profile.max_docs_per_call
    if cap is not None:
        for call in bundle.calls:
            if len(call.doc_ids) > cap:
                raise BackendRejected(
                    f"profile {profile.id!r} accepts at most {cap} documents per call, "
                    f"got {len(call.doc_ids)} (protocol {request.protocol})"
                )

    backend = make_backend(profile, transport=transport)
    docs_by_id = {doc.id: doc for doc in request.documents}

    def execute(call) -> Transcript:
        call_docs = [docs_by_id[d] for d in call.doc_ids]
        started = time.perf_counter()
        if isinstance(backend, RemoteChatBackend):
            response = backend.complete(
                call.call_index, call_docs, bundle.system_text, call.user_text,
                temperature=request.temperature, seed=request.seed,
            )
        else:
            response = backend.complete(call.call_index, call_docs, bundle.system_text, call.user_text)
        return Transcript(
            call_index=call.call_index,
            doc_ids=call.doc_ids,
            request_system=bundle.system_text,
            request_user=call.user_text,
            response_text=response,
            duration_seconds=time.perf_counter() - started,
        )

    started_total = time.perf_counter()
    if concurrency > 1 and len(bundle.calls) > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            transcripts = list(pool.map(execute, bundle.calls))
    else:
        transcripts = [execute(call) for call in bundle.calls]
    total_seconds = time.perf_counter() - started_total

    findings: list[Finding] = []
    diagnostics: list[ParseDiagnostic] = []
    for call, transcript in zip(bundle.calls, transcripts):
        call_docs = [docs_by_id[d] for d in call.doc_ids]
        call_findings, call_diagnostics = parse_model_output(
            transcript.response_text, call_docs, call_index=call.call_index
        )
        findings.extend(call_findings)
        diagnostics.extend(call_diagnostics)

    findings, dedup_diagnostics = dedup_findings(findings)
    diagnostics.extend(dedup_diagnostics)
    findings = _tag_over_cap(findings, request.max_findings_per_doc)

    return DetectionReport(
        run_id=run_id or new_run_id(),
        backend_id=profile.id,
        protocol=str(request.protocol),
        prompt_version=bundle.prompt_version,
        temperature=request.temperature,
        seed=request.seed,
        doc_ids=tuple(doc.id for doc in request.documents),
        max_findings_per_doc=request.max_findings_per_doc,
        corrective_context=request.corrective_context,
        findings=tuple(findings),
        diagnostics=tuple(diagnostics),
        transcripts=tuple(transcripts),
        per_call_seconds=tuple(t.duration_seconds for t in transcripts),
        total_seconds=total_seconds,
        created_at=datetime.now(timezone.utc).isoformat(),
    )
