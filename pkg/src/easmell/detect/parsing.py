"""Parsing of raw model output into findings.

Chat models answer with anything from clean JSON to prose that buries a
fenced array three paragraphs deep.  This parser accepts arbitrary text,
extracts the first well-formed JSON array it can find, and degrades every
problem into a diagnostic instead of an exception: malformed output costs
findings, never the run.
"""

from __future__ import annotations

import json
import re
import unicodedata
from typing import Sequence

from ..smells import SmellId, Unresolved, resolve_label
from .types import Finding, ParseDiagnostic, Severity

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_-]*\s*(.*?)```", re.DOTALL)
_TRAILING_COMMA_RE = re.compile(r",(\s*[\]}])")

_MAX_SCAN_CHARS = 200_000


def _json_candidates(text: str):
    """Yield balanced [...] slices of the text, outermost first per start."""
    depth = 0
    start = None
    in_string = False
    escaped = False
    for i, ch in enumerate(text[:_MAX_SCAN_CHARS]):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "[":
            if depth == 0:
                start = i
            depth += 1
        elif ch == "]":
            if depth > 0:
                depth -= 1
                if depth == 0 and start is not None:
                    yield text[start:i + 1]
                    start = None


def _try_load_array(candidate: str):
    for attempt in (candidate, _TRAILING_COMMA_RE.sub(r"\1", candidate)):
        try:
            value = json.loads(attempt)
        except (json.JSONDecodeError, RecursionError):
            continue
        if isinstance(value, list):
            return value
    return None


def extract_json_array(raw: str) -> list | None:
    """First well-formed JSON array in the text; fenced blocks tried first."""
    for match in _FENCE_RE.finditer(raw[:_MAX_SCAN_CHARS]):
        for candidate in _json_candidates(match.group(1)):
            value = _try_load_array(candidate)
            if value is not None:
                return value
    for candidate in _json_candidates(raw):
        value = _try_load_array(candidate)
        if value is not None:
            return value
    return None


def _normalize_doc_refs(call_docs: Sequence) -> list[tuple[str, str]]:
    refs = []
    for item in call_docs:
        if isinstance(item, str):
            refs.append((item, ""))
        elif isinstance(item, tuple):
            refs.append((item[0], item[1]))
        else:  # Document-like
            refs.append((item.id, getattr(item, "title", "")))
    return refs


def _resolve_doc_ref(ref: str, refs: list[tuple[str, str]]) -> str | None:
    for doc_id, _title in refs:
        if ref == doc_id:
            return doc_id
    lowered = ref.strip().casefold()
    title_hits = [doc_id for doc_id, title in refs if title and title.casefold() == lowered]
    if len(title_hits) == 1:
        return title_hits[0]
    return None


def normalize_quote(quote: str) -> str:
    """Normalization used for comparing evidence quotes (and dedup keys)."""
    text = unicodedata.normalize("NFC", quote).casefold()
    text = re.sub(r"\s+", " ", text).strip()
    return text.strip(" \t.,;:!?\"'`()[]{}")


def parse_model_output(
    raw: str,
    call_docs: Sequence,
    call_index: int = 0,
) -> tuple[list[Finding], list[ParseDiagnostic]]:
    """Turn one raw backend response into findings plus diagnostics.

    `call_docs` lists the documents that were in the call, as Documents,
    (id, title) tuples, or bare id strings; doc references in the output are
    resolved against them (exact id first, then unique title).
    """
    refs = _normalize_doc_refs(call_docs)
    findings: list[Finding] = []
    diagnostics: list[ParseDiagnostic] = []

    items = extract_json_array(raw) if isinstance(raw, str) else None
    if items is None:
        diagnostics.append(ParseDiagnostic(
            kind="no_parsable_output",
            detail=f"no JSON array found in response of {len(raw or '')} chars",
            call_index=call_index,
        ))
        return findings, diagnostics

    for i, item in enumerate(items):
        if not isinstance(item, dict):
            diagnostics.append(ParseDiagnostic(
                kind="element_not_object",
                detail=f"array element of type {type(item).__name__}",
                call_index=call_index,
                element_index=i,
            ))
            continue
        raw_smell = item.get("smell")
        if not isinstance(raw_smell, str) or not raw_smell.strip():
            diagnostics.append(ParseDiagnostic(
                kind="missing_smell",
                detail="element has no usable 'smell' key",
                call_index=call_index,
                element_index=i,
            ))
            continue
        smell = resolve_label(raw_smell)
        if isinstance(smell, Unresolved):
            diagnostics.append(ParseDiagnostic(
                kind="unresolved_smell",
                detail=f"label {raw_smell!r} does not match the catalog",
                call_index=call_index,
                element_index=i,
            ))

        doc_ref = item.get("doc")
        claimed = str(doc_ref).strip() if doc_ref is not None else ""
        if claimed:
            resolved = _resolve_doc_ref(claimed, refs)
            if resolved is None:
                diagnostics.append(ParseDiagnostic(
                    kind="unresolved_doc_ref",
                    detail=f"doc reference {claimed!r} matches no document in the call",
                    call_index=call_index,
                    element_index=i,
                ))
        elif len(refs) == 1:
            resolved = refs[0][0]
        else:
            resolved = None
            diagnostics.append(ParseDiagnostic(
                kind="missing_doc_ref",
                detail="element has no 'doc' key and the call held several documents",
                call_index=call_index,
                element_index=i,
            ))

        raw_severity = item.get("severity")
        severity = Severity.MEDIUM
        if isinstance(raw_severity, str) and raw_severity.strip().lower() in ("low", "medium", "high"):
            severity = Severity(raw_severity.strip().lower())
        elif raw_severity is not None:
            diagnostics.append(ParseDiagnostic(
                kind="unknown_severity",
                detail=f"severity {raw_severity!r} is not low/medium/high; using medium",
                call_index=call_index,
                element_index=i,
            ))

        evidence = item.get("evidence")
        if not isinstance(evidence, str) or not evidence.strip():
            evidence = None
        rationale = item.get("rationale")
        if not isinstance(rationale, str):
            rationale = ""
        recommendation = item.get("recommendation")
        if not isinstance(recommendation, str) or not recommendation.strip():
            recommendation = None

        findings.append(Finding(
            claimed_doc_ref=claimed,
            resolved_doc_id=resolved,
            smell=smell,
            severity=severity,
            evidence_quote=evidence,
            rationale=rationale,
            recommendation=recommendation,
            call_index=call_index,
        ))
    return findings, diagnostics


def _dedup_key(finding: Finding):
    if isinstance(finding.smell, SmellId):
        smell_key = finding.smell.value
    else:
        smell_key = "unresolved:" + normalize_quote(finding.smell.raw)
    quote_key = normalize_quote(finding.evidence_quote) if finding.evidence_quote else None
    return (finding.resolved_doc_id, smell_key, quote_key)


def dedup_findings(findings: Sequence[Finding]) -> tuple[list[Finding], list[ParseDiagnostic]]:
    """Collapse findings that repeat the same (doc, smell, normalized quote)."""
    seen: set = set()
    kept: list[Finding] = []
    diagnostics: list[ParseDiagnostic] = []
    for finding in findings:
        key = _dedup_key(finding)
        if key in seen:
            diagnostics.append(ParseDiagnostic(
                kind="duplicate_collapsed",
                detail=f"dropped repeat of {key[1]} on {finding.resolved_doc_id or 'unresolved doc'}",
                call_index=finding.call_index,
            ))
            continue
        seen.add(key)
        kept.append(finding)
    return kept, diagnostics
