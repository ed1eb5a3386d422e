"""Disk layout for runs, decisions, and re-assessments.

Everything the service needs to survive a restart lives under one data
directory:

    data/
      corpus/               documents (+ annotations.json)
      runs/<run_id>/report.json
      decisions.jsonl       hash-chained decision log
      reassessments.jsonl   one state line per update, latest wins
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Sequence

from .detect.types import DetectionReport
from .errors import DataDirUnavailable, UnknownFinding
from .report import DecisionLog, ReassessmentRequest
from .verify import VerifiedFinding


class RunStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        try:
            self.root.mkdir(parents=True, exist_ok=True)
            self.runs_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise DataDirUnavailable(f"cannot prepare data directory {self.root}: {exc}") from exc
        if not os.access(self.root, os.W_OK):
            raise DataDirUnavailable(f"data directory {self.root} is not writable")
        self.decision_log = DecisionLog(self.root / "decisions.jsonl")

    @property
    def runs_dir(self) -> Path:
        return self.root / "runs"

    @property
    def corpus_dir(self) -> Path:
        return self.root / "corpus"

    def report_path(self, run_id: str) -> Path:
        return self.runs_dir / run_id / "report.json"

    # --- runs -------------------------------------------------------------

    def save_pending(self, run_id: str, meta: dict) -> None:
        record = {"run_id": run_id, "status": "pending", **meta}
        self._write(run_id, record)

    def save_run(
        self,
        report: DetectionReport,
        verified: Sequence[VerifiedFinding],
        *,
        request_id: str | None = None,
        kind: str = "detection",
        prior_run_id: str | None = None,
    ) -> dict:
        record = {
            "run_id": report.run_id,
            "status": "completed",
            "kind": kind,
            "request_id": request_id,
            "prior_run_id": prior_run_id,
            "report": report.to_dict(),
            "verification": [vf.to_dict() for vf in verified],
        }
        self._write(report.run_id, record)
        return record

    def mark_failed(self, run_id: str, error: str, *, meta: dict | None = None) -> None:
        record = self.load_run(run_id) if self.report_path(run_id).exists() else {"run_id": run_id}
        record.update(meta or {})
        record.update({"status": "failed", "error": error})
        self._write(run_id, record)

    def _write(self, run_id: str, record: dict) -> None:
        path = self.report_path(run_id)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(record, indent=2), encoding="utf-8")
        tmp.replace(path)

    def load_run(self, run_id: str) -> dict:
        return json.loads(self.report_path(run_id).read_text(encoding="utf-8"))

    def has_run(self, run_id: str) -> bool:
        return self.report_path(run_id).exists()

    def run_ids(self) -> list[str]:
        if not self.runs_dir.exists():
            return []
        return sorted(p.name for p in self.runs_dir.iterdir() if (p / "report.json").exists())

    def list_runs(self) -> list[dict]:
        summaries = []
        for run_id in self.run_ids():
            record = self.load_run(run_id)
            report = record.get("report") or {}
            summaries.append({
                "run_id": run_id,
                "status": record.get("status", "unknown"),
                "kind": record.get("kind", "detection"),
                "backend_id": report.get("backend_id") or record.get("backend_id"),
                "protocol": report.get("protocol") or record.get("protocol"),
                "doc_count": len(report.get("doc_ids", [])),
                "finding_count": len(report.get("findings", [])),
                "created_at": report.get("created_at") or record.get("created_at"),
                "prior_run_id": record.get("prior_run_id"),
            })
        return summaries

    def find_by_request_id(self, request_id: str) -> dict | None:
        if not request_id:
            return None
        for run_id in self.run_ids():
            record = self.load_run(run_id)
            if record.get("request_id") == request_id:
                return record
        return None

    def finding_exists(self, run_id: str, index: int) -> bool:
        if not self.has_run(run_id):
            return False
        record = self.load_run(run_id)
        findings = (record.get("report") or {}).get("findings", [])
        return 0 <= index < len(findings)

    def require_finding(self, run_id: str, index: int) -> dict:
        if not self.finding_exists(run_id, index):
            raise UnknownFinding(f"finding {run_id}:{index} does not exist")
        record = self.load_run(run_id)
        return record["report"]["findings"][index]

    # --- reassessments ------------------------------------------------------

    @property
    def reassessments_path(self) -> Path:
        return self.root / "reassessments.jsonl"

    def save_reassessment(self, request: ReassessmentRequest | dict) -> None:
        payload = request.to_dict() if isinstance(request, ReassessmentRequest) else request
        with self.reassessments_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(payload) + "\n")

    def reassessments(self) -> dict[str, dict]:
        """Latest state per reassessment id."""
        out: dict[str, dict] = {}
        if self.reassessments_path.exists():
            for line in self.reassessments_path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    entry = json.loads(line)
                    out[entry["id"]] = entry
        return out

    def get_reassessment(self, reassessment_id: str) -> dict | None:
        return self.reassessments().get(reassessment_id)

    def find_reassessment_by_request_id(self, request_id: str) -> dict | None:
        if not request_id:
            return None
        for entry in self.reassessments().values():
            if entry.get("request_id") == request_id:
                return entry
        return None
