"""Ground truth handling and metric computation over detection runs.

The confusion matrix is built at (document, smell) pair level over the fixed
twelve-smell universe: every pair is exactly one of tp/fp/fn/tn, so the four
counts always sum to |documents| * 12.  Labels that never resolved against
the catalog stay out of the matrix entirely.
"""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .errors import EmptyConfusion, InsufficientRuns, MissingGroundTruth
from .smells import SmellId, catalog

if TYPE_CHECKING:
    from .detect.types import DetectionReport, Finding

METRIC_NAMES = ("accuracy", "recall", "fpr", "precision", "f1")

# Wall-clock figures from a prior manual benchmark of the two backend styles
# (seconds per request batch).  Hardware-bound; kept for context in reports,
# never asserted against.
REFERENCE_PROCESSING_SECONDS = {
    "single_doc": {"on_premise": 120.0, "hosted": 2.0},
    "batch_10": {"on_premise": 1020.0, "hosted": 2.0},
    "batch_30": {"on_premise": 3000.0, "hosted": None},
}


@dataclass(frozen=True)
class GroundTruth:
    doc_id: str
    scenario_number: int
    planted: frozenset[SmellId]
    evidence_spans: Mapping[SmellId, tuple[int, int]] | None = None

    def to_dict(self) -> dict:
        entry: dict = {
            "doc_id": self.doc_id,
            "scenario": self.scenario_number,
            "planted": [s.value for s in sorted(self.planted, key=lambda s: s.value)],
        }
        if self.evidence_spans:
            entry["spans"] = {
                smell.value: [start, end] for smell, (start, end) in sorted(
                    self.evidence_spans.items(), key=lambda kv: kv[0].value
                )
            }
        return entry


def load_annotations(path: str | Path) -> list[GroundTruth]:
    """Read a ground-truth annotation file (JSON array of entries)."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    entries = []
    for item in raw:
        spans = None
        if item.get("spans"):
            spans = {
                SmellId(name): (int(pair[0]), int(pair[1]))
                for name, pair in item["spans"].items()
            }
        entries.append(
            GroundTruth(
                doc_id=item["doc_id"],
                scenario_number=int(item.get("scenario", 0)),
                planted=frozenset(SmellId(name) for name in item.get("planted", [])),
                evidence_spans=spans,
            )
        )
    return entries


def write_annotations(entries: Sequence[GroundTruth], path: str | Path) -> None:
    payload = [entry.to_dict() for entry in entries]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class MetricsRow:
    accuracy: float
    recall: float
    fpr: float
    precision: float
    f1: float
    zero_denominator_flags: frozenset[str] = frozenset()

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "recall": self.recall,
            "fpr": self.fpr,
            "precision": self.precision,
            "f1": self.f1,
            "zero_denominator_flags": sorted(self.zero_denominator_flags),
        }


def detected_pairs(findings: Iterable["Finding"]) -> set[tuple[str, SmellId]]:
    """(doc_id, smell) pairs claimed by findings with both references resolved."""
    pairs: set[tuple[str, SmellId]] = set()
    for f in findings:
        if f.resolved_doc_id is not None and isinstance(f.smell, SmellId):
            pairs.add((f.resolved_doc_id, f.smell))
    return pairs


def _truth_by_doc(truth: Sequence[GroundTruth]) -> dict[str, GroundTruth]:
    return {entry.doc_id: entry for entry in truth}


def pair_confusion(report: "DetectionReport", truth: Sequence[GroundTruth]) -> ConfusionCounts:
    """Count tp/fp/fn/tn over every (document, smell) pair in the run."""
    by_doc = _truth_by_doc(truth)
    detected = detected_pairs(report.findings)
    universe = [s.id for s in catalog()]
    tp = fp = fn = tn = 0
    for doc_id in report.doc_ids:
        entry = by_doc.get(doc_id)
        if entry is None:
            raise MissingGroundTruth(doc_id)
        for smell in universe:
            hit = (doc_id, smell) in detected
            planted = smell in entry.planted
            if hit and planted:
                tp += 1
            elif hit and not planted:
                fp += 1
            elif not hit and planted:
                fn += 1
            else:
                tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean of precision and recall; 0.0 when both are zero."""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def metrics_from_counts(counts: ConfusionCounts) -> MetricsRow:
    """Derive the metric row, flagging any rate whose denominator was zero."""
    if counts.total == 0:
        raise EmptyConfusion("confusion counts are all zero")
    flags = set()

    def rate(num: int, den: int, name: str) -> float:
        if den == 0:
            flags.add(name)
            return 0.0
        return num / den

    accuracy = (counts.tp + counts.tn) / counts.total
    precision = rate(counts.tp, counts.tp + counts.fp, "precision")
    recall = rate(counts.tp, counts.tp + counts.fn, "recall")
    fpr = rate(counts.fp, counts.fp + counts.tn, "fpr")
    if precision + recall == 0:
        flags.add("f1")
        f1 = 0.0
    else:
        f1 = f1_score(precision, recall)
    return MetricsRow(
        accuracy=accuracy,
        recall=recall,
        fpr=fpr,
        precision=precision,
        f1=f1,
        zero_denominator_flags=frozenset(flags),
    )


def doc_exact_accuracy(report: "DetectionReport", truth: Sequence[GroundTruth]) -> float:
    """Fraction of documents whose detected smell set equals the planted set."""
    by_doc = _truth_by_doc(truth)
    detected = detected_pairs(report.findings)
    if not report.doc_ids:
        raise EmptyConfusion("report contains no documents")
    exact = 0
    for doc_id in report.doc_ids:
        entry = by_doc.get(doc_id)
        if entry is None:
            raise MissingGroundTruth(doc_id)
        found = {smell for d, smell in detected if d == doc_id}
        if found == set(entry.planted):
            exact += 1
    return exact / len(report.doc_ids)


def aggregate_variance(rows: Sequence[MetricsRow]) -> dict[str, tuple[float, float]]:
    """Per-metric mean and unbiased sample standard deviation across runs."""
    if len(rows) < 2:
        raise InsufficientRuns(f"need at least 2 metric rows, got {len(rows)}")
    out: dict[str, tuple[float, float]] = {}
    for name in METRIC_NAMES:
        values = [getattr(row, name) for row in rows]
        out[name] = (statistics.mean(values), statistics.stdev(values))
    return out


@dataclass(frozen=True)
class RunTiming:
    per_call_seconds: tuple[float, ...]
    total_seconds: float

    @property
    def call_count(self) -> int:
        return len(self.per_call_seconds)


_METRIC_TABLE_LABELS = (
    ("accuracy", "Accuracy"),
    ("recall", "Recall"),
    ("fpr", "False Positive Rate (FPR)"),
    ("precision", "Precision"),
    ("f1", "F1 Score"),
)


def metrics_table_markdown(rows: Mapping[str, MetricsRow]) -> str:
    """Render one metrics column per run as a markdown table."""
    names = list(rows)
    lines = ["| Metric | " + " | ".join(names) + " |",
             "| --- | " + " | ".join("---" for _ in names) + " |"]
    for key, label in _METRIC_TABLE_LABELS:
        cells = []
        for name in names:
            row = rows[name]
            value = getattr(row, key)
            cell = f"{value:.2f}"
            if key in row.zero_denominator_flags or (key == "f1" and "f1" in row.zero_denominator_flags):
                cell += " *"
            cells.append(cell)
        lines.append(f"| {label} | " + " | ".join(cells) + " |")
    if any(rows[name].zero_denominator_flags for name in names):
        lines.append("")
        lines.append("`*` zero denominator, reported as 0.00 by convention")
    return "\n".join(lines)


def metrics_json(row: MetricsRow, counts: ConfusionCounts | None = None) -> str:
    payload: dict = row.as_dict()
    if counts is not None:
        payload["confusion"] = {
            "tp": counts.tp, "fp": counts.fp, "fn": counts.fn, "tn": counts.tn,
        }
    return json.dumps(payload, indent=2)
