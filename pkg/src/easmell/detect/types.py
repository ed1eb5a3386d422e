"""Shared data types for the detection pipeline."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Sequence

from ..corpus import Document
from ..smells import SmellId, Unresolved

DEFAULT_MAX_FINDINGS_PER_DOC = 12

OVER_CAP_TAG = "over_cap"


class Severity(str, Enum):
    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"


@dataclass(frozen=True)
class DetectionProtocol:
    """How documents are grouped into backend calls: one each, or batches of n."""

    kind: str  # "single" | "batch"
    batch_size: int | None = None

    @staticmethod
    def single() -> "DetectionProtocol":
        return DetectionProtocol(kind="single")

    @staticmethod
    def batch(n: int) -> "DetectionProtocol":
        if n < 2:
            raise ValueError(f"batch size must be >= 2, got {n}")
        return DetectionProtocol(kind="batch", batch_size=n)

    @staticmethod
    def parse(text: str) -> "DetectionProtocol":
        text = text.strip().lower()
        if text == "single":
            return DetectionProtocol.single()
        if text.startswith("batch:"):
            return DetectionProtocol.batch(int(text.split(":", 1)[1]))
        raise ValueError(f"unknown protocol {text!r} (expected 'single' or 'batch:N')")

    def group(self, documents: Sequence[Document]) -> list[list[Document]]:
        docs = list(documents)
        if self.kind == "single":
            return [[doc] for doc in docs]
        size = self.batch_size or 1
        return [docs[i:i + size] for i in range(0, len(docs), size)]

    def __str__(self) -> str:
        return "single" if self.kind == "single" else f"batch:{self.batch_size}"


@dataclass(frozen=True)
class BackendProfile:
    """Configuration for one detector backend."""

    id: str
    kind: str  # "remote_chat" | "lexical_baseline" | "replay"
    endpoint: str | None = None
    model: str | None = None
    auth_token_env: str | None = None
    replay_dir: str | None = None
    max_docs_per_call: int | None = None
    timeout_seconds: float = 120.0

    def __post_init__(self):
        if self.kind == "remote_chat":
            if not self.endpoint or not self.model:
                raise ValueError(f"profile {self.id!r}: remote_chat needs endpoint and model")
        elif self.kind == "replay":
            if not self.replay_dir:
                raise ValueError(f"profile {self.id!r}: replay needs replay_dir")
        elif self.kind != "lexical_baseline":
            raise ValueError(f"profile {self.id!r}: unknown backend kind {self.kind!r}")


@dataclass(frozen=True)
class Finding:
    claimed_doc_ref: str
    resolved_doc_id: str | None
    smell: SmellId | Unresolved
    severity: Severity
    evidence_quote: str | None
    rationale: str
    recommendation: str | None = None
    call_index: int = 0
    tags: tuple[str, ...] = ()

    @property
    def smell_id(self) -> SmellId | None:
        return self.smell if isinstance(self.smell, SmellId) else None

    @property
    def raw_label(self) -> str:
        if isinstance(self.smell, Unresolved):
            return self.smell.raw
        return self.smell.value

    def with_tag(self, tag: str) -> "Finding":
        if tag in self.tags:
            return self
        return replace(self, tags=self.tags + (tag,))

    def to_dict(self) -> dict:
        return {
            "claimed_doc_ref": self.claimed_doc_ref,
            "resolved_doc_id": self.resolved_doc_id,
            "smell": self.smell.value if isinstance(self.smell, SmellId) else None,
            "raw_label": self.raw_label,
            "severity": self.severity.value,
            "evidence_quote": self.evidence_quote,
            "rationale": self.rationale,
            "recommendation": self.recommendation,
            "call_index": self.call_index,
            "tags": list(self.tags),
        }

    @staticmethod
    def from_dict(data: dict) -> "Finding":
        smell: SmellId | Unresolved
        if data.get("smell"):
            smell = SmellId(data["smell"])
        else:
            smell = Unresolved(data.get("raw_label", ""))
        return Finding(
            claimed_doc_ref=data.get("claimed_doc_ref", ""),
            resolved_doc_id=data.get("resolved_doc_id"),
            smell=smell,
            severity=Severity(data.get("severity", "medium")),
            evidence_quote=data.get("evidence_quote"),
            rationale=data.get("rationale", ""),
            recommendation=data.get("recommendation"),
            call_index=int(data.get("call_index", 0)),
            tags=tuple(data.get("tags", ())),
        )


@dataclass(frozen=True)
class ParseDiagnostic:
    kind: str
    detail: str
    call_index: int = 0
    element_index: int | None = None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "detail": self.detail,
            "call_index": self.call_index,
            "element_index": self.element_index,
        }

    @staticmethod
    def from_dict(data: dict) -> "ParseDiagnostic":
        return ParseDiagnostic(
            kind=data["kind"],
            detail=data.get("detail", ""),
            call_index=int(data.get("call_index", 0)),
            element_index=data.get("element_index"),
        )


@dataclass(frozen=True)
class Transcript:
    call_index: int
    doc_ids: tuple[str, ...]
    request_system: str
    request_user: str
    response_text: str
    duration_seconds: float

    def to_dict(self) -> dict:
        return {
            "call_index": self.call_index,
            "doc_ids": list(self.doc_ids),
            "request_system": self.request_system,
            "request_user": self.request_user,
            "response_text": self.response_text,
            "duration_seconds": self.duration_seconds,
        }

    @staticmethod
    def from_dict(data: dict) -> "Transcript":
        return Transcript(
            call_index=int(data["call_index"]),
            doc_ids=tuple(data["doc_ids"]),
            request_system=data.get("request_system", ""),
            request_user=data.get("request_user", ""),
            response_text=data.get("response_text", ""),
            duration_seconds=float(data.get("duration_seconds", 0.0)),
        )


@dataclass(frozen=True)
class DetectionRequest:
    documents: tuple[Document, ...]
    protocol: DetectionProtocol
    backend_id: str
    prompt_version: str = ""
    temperature: float = 0.0
    seed: int | None = None
    max_findings_per_doc: int = DEFAULT_MAX_FINDINGS_PER_DOC
    corrective_context: str | None = None

    def __post_init__(self):
        if self.protocol.kind == "batch" and (self.protocol.batch_size or 0) < 2:
            raise ValueError("batch protocol requires a batch size of at least 2")


@dataclass(frozen=True)
class DetectionReport:
    run_id: str
    backend_id: str
    protocol: str
    prompt_version: str
    temperature: float
    seed: int | None
    doc_ids: tuple[str, ...]
    max_findings_per_doc: int
    corrective_context: str | None
    findings: tuple[Finding, ...]
    diagnostics: tuple[ParseDiagnostic, ...]
    transcripts: tuple[Transcript, ...]
    per_call_seconds: tuple[float, ...]
    total_seconds: float
    created_at: str

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "backend_id": self.backend_id,
            "protocol": self.protocol,
            "prompt_version": self.prompt_version,
            "temperature": self.temperature,
            "seed": self.seed,
            "doc_ids": list(self.doc_ids),
            "max_findings_per_doc": self.max_findings_per_doc,
            "corrective_context": self.corrective_context,
            "findings": [f.to_dict() for f in self.findings],
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "transcripts": [t.to_dict() for t in self.transcripts],
            "per_call_seconds": list(self.per_call_seconds),
            "total_seconds": self.total_seconds,
            "created_at": self.created_at,
        }

    @staticmethod
    def from_dict(data: dict) -> "DetectionReport":
        return DetectionReport(
            run_id=data["run_id"],
            backend_id=data["backend_id"],
            protocol=data["protocol"],
            prompt_version=data.get("prompt_version", ""),
            temperature=float(data.get("temperature", 0.0)),
            seed=data.get("seed"),
            doc_ids=tuple(data["doc_ids"]),
            max_findings_per_doc=int(data.get("max_findings_per_doc", DEFAULT_MAX_FINDINGS_PER_DOC)),
            corrective_context=data.get("corrective_context"),
            findings=tuple(Finding.from_dict(f) for f in data.get("findings", [])),
            diagnostics=tuple(ParseDiagnostic.from_dict(d) for d in data.get("diagnostics", [])),
            transcripts=tuple(Transcript.from_dict(t) for t in data.get("transcripts", [])),
            per_call_seconds=tuple(data.get("per_call_seconds", [])),
            total_seconds=float(data.get("total_seconds", 0.0)),
            created_at=data.get("created_at", ""),
        )
