"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import io
import zipfile

import pytest

from easmell.corpus import Document, make_document
from easmell.detect.types import BackendProfile, DetectionReport, Finding, Severity
from easmell.smells import SmellId


def make_doc(body: str, name: str = "doc", **kwargs) -> Document:
    return make_document(body, name, **kwargs)


def make_finding(
    *,
    doc: Document | None = None,
    doc_id: str | None = None,
    smell: SmellId = SmellId.TEMPORARY_SOLUTION,
    quote: str | None = None,
    severity: Severity = Severity.MEDIUM,
    rationale: str = "test rationale",
    call_index: int = 0,
) -> Finding:
    resolved = doc.id if doc is not None else doc_id
    return Finding(
        claimed_doc_ref=resolved or "",
        resolved_doc_id=resolved,
        smell=smell,
        severity=severity,
        evidence_quote=quote,
        rationale=rationale,
        call_index=call_index,
    )


def make_report(
    *,
    doc_ids: tuple[str, ...],
    findings: tuple[Finding, ...] = (),
    run_id: str = "run-test",
    backend_id: str = "baseline",
    protocol: str = "single",
    corrective_context: str | None = None,
) -> DetectionReport:
    return DetectionReport(
        run_id=run_id,
        backend_id=backend_id,
        protocol=protocol,
        prompt_version="deadbeef0000",
        temperature=0.0,
        seed=7,
        doc_ids=doc_ids,
        max_findings_per_doc=12,
        corrective_context=corrective_context,
        findings=findings,
        diagnostics=(),
        transcripts=(),
        per_call_seconds=(0.01,),
        total_seconds=0.01,
        created_at="2024-08-17T00:00:00Z",
    )


def docx_bytes(paragraphs: list[str]) -> bytes:
    """Assemble a minimal docx container around the given paragraphs."""
    ns = "http://schemas.openxmlformats.org/wordprocessingml/2006/main"
    body = "".join(
        f"<w:p><w:r><w:t xml:space=\"preserve\">{p}</w:t></w:r></w:p>" for p in paragraphs
    )
    document = (
        f"<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
        f"<w:document xmlns:w=\"{ns}\"><w:body>{body}</w:body></w:document>"
    )
    content_types = (
        "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>"
        "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
        "<Default Extension=\"xml\" ContentType=\"application/xml\"/>"
        "<Override PartName=\"/word/document.xml\" "
        "ContentType=\"application/vnd.openxmlformats-officedocument.wordprocessingml.document.main+xml\"/>"
        "</Types>"
    )
    buffer = io.BytesIO()
    with zipfile.ZipFile(buffer, "w") as archive:
        archive.writestr("[Content_Types].xml", content_types)
        archive.writestr("word/document.xml", document)
    return buffer.getvalue()


@pytest.fixture
def baseline_profile() -> BackendProfile:
    return BackendProfile(id="baseline", kind="lexical_baseline")
