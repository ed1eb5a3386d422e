"""Run reports, the append-only decision log, and re-assessment.

Reports are rendered for people (markdown) or machines (JSON).  Review
decisions go into a hash-chained JSON-lines log: every entry commits to the
previous entry's hash, so edits or deletions anywhere in the file break the
chain on re-validation.
"""

from __future__ import annotations

import hashlib
import json
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .corpus import Document
from .detect.prompts import PromptConfig
from .detect.runner import run_detection
from .detect.types import BackendProfile, DetectionProtocol, DetectionReport, DetectionRequest
from .errors import EmptyContext, UnknownDocument, UnknownFinding
from .evaluation import ConfusionCounts, MetricsRow, metrics_table_markdown
from .smells import definition
from .verify import ErrorBreakdown, VerificationStatus, VerifiedFinding

VERDICTS = ("accept", "reject", "needs_info")

GENESIS_HASH = "0" * 64


# --- rendering ----------------------------------------------------------------

_BADGES = {
    VerificationStatus.VERIFIED: "verified",
    VerificationStatus.NO_QUOTE: "no quote provided",
    VerificationStatus.CONTEXT_LEAKAGE: "⚠ quote from another document",
    VerificationStatus.FABRICATED: "⚠ unverified quote",
}


def _badge(vf: VerifiedFinding) -> str:
    badge = _BADGES[vf.status]
    if vf.status == VerificationStatus.VERIFIED:
        badge += f" (score {vf.match_score:.2f})"
    if vf.status == VerificationStatus.CONTEXT_LEAKAGE and vf.actual_doc_id:
        badge = f"⚠ quote from {vf.actual_doc_id}"
    return badge


def render_report(
    report: DetectionReport,
    verified_findings: Sequence[VerifiedFinding],
    *,
    metrics: MetricsRow | None = None,
    confusion: ConfusionCounts | None = None,
    error_breakdown: ErrorBreakdown | None = None,
    documents: Mapping[str, Document] | None = None,
    fmt: str = "markdown",
) -> str:
    """Render a run report; `fmt` is "markdown" or "json"."""
    if fmt == "json":
        payload = report.to_dict()
        payload["verification"] = [vf.to_dict() for vf in verified_findings]
        if metrics is not None:
            payload["metrics"] = metrics.as_dict()
        if confusion is not None:
            payload["confusion"] = {
                "tp": confusion.tp, "fp": confusion.fp, "fn": confusion.fn, "tn": confusion.tn,
            }
        if error_breakdown is not None:
            payload["errors"] = error_breakdown.to_dict()
        return json.dumps(payload, indent=2)
    if fmt != "markdown":
        raise ValueError(f"unknown report format {fmt!r}")

    lines: list[str] = []
    lines.append(f"# Detection run {report.run_id}")
    lines.append("")
    lines.append(f"- backend: `{report.backend_id}`, protocol: `{report.protocol}`")
    lines.append(f"- prompt version: `{report.prompt_version}`, temperature: {report.temperature}, "
                 f"seed: {report.seed if report.seed is not None else 'none'}")
    lines.append(f"- created: {report.created_at}")
    lines.append(f"- {len(report.doc_ids)} documents in {len(report.transcripts)} calls, "
                 f"{report.total_seconds:.2f}s total")
    lines.append(f"- findings: {len(report.findings)}, diagnostics: {len(report.diagnostics)}")
    if report.corrective_context:
        lines.append("")
        lines.append("## Corrective context")
        lines.append("")
        lines.append(f"> {report.corrective_context}")

    by_doc: dict[str | None, list[VerifiedFinding]] = {}
    for vf in verified_findings:
        by_doc.setdefault(vf.finding.resolved_doc_id, []).append(vf)

    for doc_id in report.doc_ids:
        doc_findings = by_doc.pop(doc_id, [])
        title = doc_id
        if documents and doc_id in documents:
            title = f"{documents[doc_id].title} ({doc_id})"
        lines.append("")
        lines.append(f"## {title}")
        if not doc_findings:
            lines.append("")
            lines.append("No findings.")
            continue
        for n, vf in enumerate(doc_findings, start=1):
            f = vf.finding
            label = f.raw_label
            if f.smell_id is not None:
                label = definition(f.smell_id).canonical_name
            lines.append("")
            header = f"{n}. **{label}** — severity {f.severity.value} — {_badge(vf)}"
            if f.tags:
                header += " — tags: " + ", ".join(f.tags)
            lines.append(header)
            if vf.status == VerificationStatus.VERIFIED and vf.start is not None:
                span_text = f.evidence_quote or ""
                if documents and vf.doc_id in documents:
                    span_text = documents[vf.doc_id].body[vf.start:vf.end]
                lines.append(f'   > "{span_text}" (chars {vf.start}-{vf.end})')
            elif f.evidence_quote:
                lines.append(f'   > "{f.evidence_quote}"')
            if f.rationale:
                lines.append(f"   - rationale: {f.rationale}")
            if f.recommendation:
                lines.append(f"   - recommendation: {f.recommendation}")

    leftover = [vf for doc_id, vfs in by_doc.items() if doc_id is None for vf in vfs]
    if leftover:
        lines.append("")
        lines.append("## Findings without a resolved document")
        for vf in leftover:
            lines.append(f"- {vf.finding.raw_label!r} claimed on {vf.finding.claimed_doc_ref!r} — {_badge(vf)}")

    if metrics is not None:
        lines.append("")
        lines.append("## Metrics")
        lines.append("")
        lines.append(metrics_table_markdown({report.backend_id: metrics}))
        if confusion is not None:
            lines.append("")
            lines.append(f"Pair-level confusion: tp={confusion.tp} fp={confusion.fp} "
                         f"fn={confusion.fn} tn={confusion.tn}")

    if error_breakdown is not None:
        lines.append("")
        lines.append("## Error analysis")
        lines.append("")
        for name, count in error_breakdown.counts().items():
            lines.append(f"- {name.replace('_', ' ')}: {count}")

    if report.diagnostics:
        lines.append("")
        lines.append(f"## Diagnostics ({len(report.diagnostics)})")
        lines.append("")
        for diag in report.diagnostics:
            lines.append(f"- call {diag.call_index}: {diag.kind} — {diag.detail}")

    return "\n".join(lines) + "\n"


# --- decision log ---------------------------------------------------------------

@dataclass(frozen=True)
class Decision:
    id: str
    finding_ref: str  # "<run_id>:<finding_index>"
    verdict: str
    reviewer: str
    note: str
    timestamp: str

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}, got {self.verdict!r}")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "finding_ref": self.finding_ref,
            "verdict": self.verdict,
            "reviewer": self.reviewer,
            "note": self.note,
            "timestamp": self.timestamp,
        }


def make_decision(finding_ref: str, verdict: str, reviewer: str, note: str = "",
                  decision_id: str | None = None) -> Decision:
    return Decision(
        id=decision_id or uuid.uuid4().hex,
        finding_ref=finding_ref,
        verdict=verdict,
        reviewer=reviewer,
        note=note,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def decision_entry_hash(prev_hash: str, decision: Decision) -> str:
    return hashlib.sha256((prev_hash + _canonical(decision.to_dict())).encode("utf-8")).hexdigest()


class DecisionLog:
    """Append-only JSON-lines decision log with a hash chain."""

    def __init__(self, path: str | Path):
        self.path = Path(path)

    def entries(self) -> list[dict]:
        if not self.path.exists():
            return []
        out = []
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                out.append(json.loads(line))
        return out

    def last_hash(self) -> str:
        entries = self.entries()
        return entries[-1]["entry_hash"] if entries else GENESIS_HASH

    def append(self, decision: Decision) -> dict:
        prev_hash = self.last_hash()
        entry = {
            "decision": decision.to_dict(),
            "prev_hash": prev_hash,
            "entry_hash": decision_entry_hash(prev_hash, decision),
        }
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
        return entry

    def validate_chain(self) -> bool:
        prev = GENESIS_HASH
        for entry in self.entries():
            decision = Decision(**entry["decision"])
            if entry["prev_hash"] != prev:
                return False
            if entry["entry_hash"] != decision_entry_hash(prev, decision):
                return False
            prev = entry["entry_hash"]
        return True

    def find(self, decision_id: str) -> dict | None:
        for entry in self.entries():
            if entry["decision"]["id"] == decision_id:
                return entry
        return None

    def for_finding(self, finding_ref: str) -> list[dict]:
        return [e for e in self.entries() if e["decision"]["finding_ref"] == finding_ref]


def parse_finding_ref(finding_ref: str) -> tuple[str, int]:
    run_id, _, index = finding_ref.rpartition(":")
    if not run_id or not index.isdigit():
        raise UnknownFinding(f"malformed finding reference {finding_ref!r}")
    return run_id, int(index)


def append_decision(
    log: DecisionLog,
    decision: Decision,
    finding_exists: Callable[[str, int], bool] | None = None,
) -> dict:
    """Validate the finding reference and append the decision to the log."""
    run_id, index = parse_finding_ref(decision.finding_ref)
    if finding_exists is not None and not finding_exists(run_id, index):
        raise UnknownFinding(f"finding {decision.finding_ref!r} does not exist")
    return log.append(decision)


# --- re-assessment ---------------------------------------------------------------

@dataclass(frozen=True)
class ReassessmentRequest:
    id: str
    doc_id: str
    corrective_context: str
    prior_run_id: str
    result_run_id: str
    status: str
    created_at: str

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "doc_id": self.doc_id,
            "corrective_context": self.corrective_context,
            "prior_run_id": self.prior_run_id,
            "result_run_id": self.result_run_id,
            "status": self.status,
            "created_at": self.created_at,
        }


def request_reassessment(
    doc_id: str,
    corrective_context: str,
    prior_report: DetectionReport,
    profile: BackendProfile,
    documents: Sequence[Document],
    *,
    run_id: str | None = None,
    reassessment_id: str | None = None,
    transport=None,
) -> tuple[ReassessmentRequest, DetectionReport]:
    """Re-run detection for one document with reviewer-supplied context.

    The corrective context travels as an addendum block in the user prompt;
    the result is a fresh report linked to the prior one, which is never
    modified.
    """
    if not corrective_context or not corrective_context.strip():
        raise EmptyContext("corrective context is empty")
    if doc_id not in prior_report.doc_ids:
        raise UnknownDocument(f"document {doc_id!r} is not part of run {prior_report.run_id!r}")
    document = next((d for d in documents if d.id == doc_id), None)
    if document is None:
        raise UnknownDocument(f"document {doc_id!r} is not available in the corpus")

    request = DetectionRequest(
        documents=(document,),
        protocol=DetectionProtocol.single(),
        backend_id=profile.id,
        temperature=prior_report.temperature,
        seed=prior_report.seed,
        max_findings_per_doc=prior_report.max_findings_per_doc,
        corrective_context=corrective_context.strip(),
    )
    new_report = run_detection(
        request,
        profile,
        run_id=run_id,
        prompt_config=PromptConfig(corrective_context=corrective_context.strip()),
        transport=transport,
    )
    reassessment = ReassessmentRequest(
        id=reassessment_id or uuid.uuid4().hex,
        doc_id=doc_id,
        corrective_context=corrective_context.strip(),
        prior_run_id=prior_report.run_id,
        result_run_id=new_report.run_id,
        status="completed",
        created_at=datetime.now(timezone.utc).isoformat(),
    )
    return reassessment, new_report
