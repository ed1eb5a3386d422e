"""Evidence verification and error classification.

A finding's quote is only trusted if it can be located in the document it
claims to cite.  Matching happens on a normalized view of the text (NFC,
casefolded, whitespace collapsed, edge punctuation stripped from the quote)
while spans are reported in original body coordinates, so highlighting the
span reproduces the quoted passage.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from difflib import SequenceMatcher
from enum import Enum
from typing import Mapping, Sequence

from .corpus import Document
from .detect.types import Finding
from .errors import MissingGroundTruth
from .evaluation import GroundTruth, detected_pairs
from .smells import SmellDefinition, SmellId

MATCH_THRESHOLD = 0.90

_EDGE_PUNCT = " \t\n.,;:!?\"'`()[]{}"


class VerificationStatus(str, Enum):
    VERIFIED = "verified"
    NO_QUOTE = "no_quote_provided"
    CONTEXT_LEAKAGE = "context_leakage"
    FABRICATED = "fabricated_citation"


@dataclass(frozen=True)
class VerifiedFinding:
    finding: Finding
    status: VerificationStatus
    match_score: float
    doc_id: str | None = None
    start: int | None = None
    end: int | None = None
    actual_doc_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "match_score": round(self.match_score, 4),
            "doc_id": self.doc_id,
            "start": self.start,
            "end": self.end,
            "actual_doc_id": self.actual_doc_id,
        }


def _normalize_with_map(body: str) -> tuple[str, list[int]]:
    """Casefold and collapse whitespace, keeping a map back to body offsets."""
    chars: list[str] = []
    mapping: list[int] = []
    pending_space_at: int | None = None
    for i, ch in enumerate(body):
        for c in ch.casefold():
            if c.isspace():
                if chars:
                    pending_space_at = i
                continue
            if pending_space_at is not None:
                chars.append(" ")
                mapping.append(pending_space_at)
                pending_space_at = None
            chars.append(c)
            mapping.append(i)
    return "".join(chars), mapping


def normalize_quote_text(quote: str) -> str:
    text = unicodedata.normalize("NFC", quote)
    normalized, _ = _normalize_with_map(text)
    return normalized.strip(_EDGE_PUNCT)


@dataclass
class _DocIndex:
    doc: Document
    norm: str
    mapping: list[int]
    token_starts: list[int]


def _index_doc(doc: Document) -> _DocIndex:
    norm, mapping = _normalize_with_map(doc.body)
    token_starts = [0] if norm and not norm.startswith(" ") else []
    for i, ch in enumerate(norm):
        if ch == " " and i + 1 < len(norm):
            token_starts.append(i + 1)
    return _DocIndex(doc=doc, norm=norm, mapping=mapping, token_starts=token_starts)


def _span_from_norm(index: _DocIndex, norm_start: int, norm_end: int) -> tuple[int, int]:
    start = index.mapping[norm_start]
    end = index.mapping[norm_end - 1] + 1
    return start, end


def _best_alignment(index: _DocIndex, norm_quote: str) -> tuple[float, int, int]:
    """Best-scoring window of the document against the quote.

    Exact normalized substring hits short-circuit at 1.0; otherwise word
    windows of roughly the quote's length slide across the text and the
    closest one (by SequenceMatcher ratio) wins.
    """
    pos = index.norm.find(norm_quote)
    if pos != -1:
        return 1.0, pos, pos + len(norm_quote)

    if not index.token_starts or not norm_quote:
        return 0.0, 0, 0
    quote_words = norm_quote.count(" ") + 1
    starts = index.token_starts
    best = (0.0, 0, 0)
    matcher = SequenceMatcher(autojunk=False)
    matcher.set_seq2(norm_quote)
    for width in range(max(1, quote_words - 2), quote_words + 3):
        for si, norm_start in enumerate(starts):
            end_token = si + width - 1
            if end_token >= len(starts):
                break
            next_start = starts[end_token] if end_token < len(starts) else norm_start
            norm_end = index.norm.find(" ", next_start)
            if norm_end == -1:
                norm_end = len(index.norm)
            candidate = index.norm[norm_start:norm_end]
            matcher.set_seq1(candidate)
            if matcher.real_quick_ratio() <= best[0] or matcher.quick_ratio() <= best[0]:
                continue
            score = matcher.ratio()
            if score > best[0]:
                best = (score, norm_start, norm_end)
    return best


def verify_evidence(finding: Finding, call_documents: Sequence[Document]) -> VerifiedFinding:
    """Check a finding's quote against the documents of its call.

    The claimed document is searched first; a strong match elsewhere in the
    call is context leakage, and no strong match anywhere is a fabricated
    citation.
    """
    quote = finding.evidence_quote
    if quote is None or not quote.strip():
        return VerifiedFinding(finding=finding, status=VerificationStatus.NO_QUOTE, match_score=0.0)

    norm_quote = normalize_quote_text(quote)
    if not norm_quote:
        return VerifiedFinding(finding=finding, status=VerificationStatus.NO_QUOTE, match_score=0.0)

    indexed = [_index_doc(doc) for doc in call_documents]
    claimed = finding.resolved_doc_id

    claimed_index = next((ix for ix in indexed if ix.doc.id == claimed), None)
    if claimed_index is not None:
        score, norm_start, norm_end = _best_alignment(claimed_index, norm_quote)
        if score >= MATCH_THRESHOLD:
            start, end = _span_from_norm(claimed_index, norm_start, norm_end)
            return VerifiedFinding(
                finding=finding, status=VerificationStatus.VERIFIED, match_score=score,
                doc_id=claimed_index.doc.id, start=start, end=end,
            )

    best_other: tuple[float, _DocIndex, int, int] | None = None
    for ix in indexed:
        if claimed_index is not None and ix.doc.id == claimed:
            continue
        score, norm_start, norm_end = _best_alignment(ix, norm_quote)
        if best_other is None or score > best_other[0]:
            best_other = (score, ix, norm_start, norm_end)

    if best_other is not None and best_other[0] >= MATCH_THRESHOLD:
        score, ix, norm_start, norm_end = best_other
        start, end = _span_from_norm(ix, norm_start, norm_end)
        if claimed_index is None:
            # The finding never resolved to a document, so a strong match is
            # attribution recovered, not leaked context from a sibling.
            return VerifiedFinding(
                finding=finding, status=VerificationStatus.VERIFIED, match_score=score,
                doc_id=ix.doc.id, start=start, end=end,
            )
        return VerifiedFinding(
            finding=finding, status=VerificationStatus.CONTEXT_LEAKAGE, match_score=score,
            actual_doc_id=ix.doc.id, start=start, end=end,
        )

    best_score = best_other[0] if best_other is not None else 0.0
    return VerifiedFinding(finding=finding, status=VerificationStatus.FABRICATED, match_score=best_score)


def verify_report_findings(
    findings: Sequence[Finding],
    documents_by_call: Mapping[int, Sequence[Document]],
) -> list[VerifiedFinding]:
    """Verify every finding against the documents of its originating call."""
    out = []
    for finding in findings:
        call_docs = documents_by_call.get(finding.call_index, ())
        out.append(verify_evidence(finding, call_docs))
    return out


# --- error classification ----------------------------------------------------

# Catalog entries that reviewers see conflated in practice; used as the
# fallback misclassification signal when an annotation has no evidence spans.
CONFUSABLE_PAIRS: frozenset[frozenset[SmellId]] = frozenset({
    frozenset({SmellId.TEMPORARY_SOLUTION, SmellId.BIG_BANG}),
    frozenset({SmellId.LACK_OF_DOCUMENTATION, SmellId.CONTRADICTION_IN_INPUT}),
    frozenset({SmellId.EFFICIENCY_GOALS_NOT_VISIBLE, SmellId.PROJECT_GOALS_NOT_ACHIEVED}),
})

ERROR_TYPES = (
    "omission",
    "misclassification",
    "batch_context_leakage",
    "false_positive",
    "fabricated_citation",
)


@dataclass
class ErrorBreakdown:
    omission: int = 0
    misclassification: int = 0
    batch_context_leakage: int = 0
    false_positive: int = 0
    fabricated_citation: int = 0
    per_document: dict[str, list[dict]] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.per_document is None:
            self.per_document = {}

    def counts(self) -> dict[str, int]:
        return {name: getattr(self, name) for name in ERROR_TYPES}

    def to_dict(self) -> dict:
        return {**self.counts(), "per_document": self.per_document}


def _spans_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def classify_errors(
    verified_findings: Sequence[VerifiedFinding],
    ground_truth: Sequence[GroundTruth],
    smell_catalog: Sequence[SmellDefinition],
) -> ErrorBreakdown:
    """Assign each defective finding to exactly one error category.

    Precedence: fabricated citation > context leakage > misclassification >
    false positive.  Findings whose smell was actually planted in their
    document are justified and count nowhere; every planted smell nobody
    reported is an omission.
    """
    truth_by_doc = {entry.doc_id: entry for entry in ground_truth}
    names = {d.id: d.canonical_name for d in smell_catalog}
    breakdown = ErrorBreakdown()

    detected = detected_pairs(vf.finding for vf in verified_findings)

    def note(doc_id: str | None, category: str, detail: str) -> None:
        key = doc_id or "(unattributed)"
        breakdown.per_document.setdefault(key, []).append({"category": category, "detail": detail})
        setattr(breakdown, category, getattr(breakdown, category) + 1)

    for vf in verified_findings:
        finding = vf.finding
        label = names.get(finding.smell_id, finding.raw_label)
        doc_id = finding.resolved_doc_id

        if vf.status == VerificationStatus.FABRICATED:
            note(doc_id, "fabricated_citation", f"quote for {label!r} not found in any call document")
            continue
        if vf.status == VerificationStatus.CONTEXT_LEAKAGE:
            note(doc_id, "batch_context_leakage",
                 f"quote for {label!r} actually comes from {vf.actual_doc_id}")
            continue

        entry = truth_by_doc.get(doc_id) if doc_id is not None else None
        if doc_id is not None and entry is None:
            raise MissingGroundTruth(doc_id)

        smell = finding.smell_id
        if entry is not None and smell is not None and smell in entry.planted:
            continue  # justified

        if entry is not None and smell is not None:
            if entry.evidence_spans:
                if (
                    vf.status == VerificationStatus.VERIFIED
                    and vf.start is not None
                    and any(
                        planted_smell != smell and _spans_overlap((vf.start, vf.end), span)
                        for planted_smell, span in entry.evidence_spans.items()
                    )
                ):
                    note(doc_id, "misclassification",
                         f"{label!r} reported over a passage planted for a different smell")
                    continue
            else:
                confused_with = next(
                    (
                        planted
                        for planted in entry.planted
                        if (doc_id, planted) not in detected
                        and frozenset({planted, smell}) in CONFUSABLE_PAIRS
                    ),
                    None,
                )
                if confused_with is not None:
                    note(doc_id, "misclassification",
                         f"{label!r} likely stands in for {names[confused_with]!r}")
                    continue

        note(doc_id, "false_positive", f"{label!r} is not planted in this document")

    for entry in ground_truth:
        for planted in entry.planted:
            if (entry.doc_id, planted) not in detected:
                note(entry.doc_id, "omission", f"planted {names[planted]!r} was never reported")

    return breakdown
