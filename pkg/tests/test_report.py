"""Report rendering, the hash-chained decision log, and re-assessment."""

import hashlib
import json

import pytest

from easmell.detect import BackendProfile, DetectionProtocol, DetectionRequest, run_detection
from easmell.errors import EmptyContext, UnknownDocument, UnknownFinding
from easmell.evaluation import ConfusionCounts, metrics_from_counts
from easmell.report import (
    Decision,
    DecisionLog,
    GENESIS_HASH,
    append_decision,
    decision_entry_hash,
    make_decision,
    parse_finding_ref,
    render_report,
    request_reassessment,
)
from easmell.smells import SmellId
from easmell.verify import VerificationStatus, VerifiedFinding

from conftest import make_doc, make_finding, make_report


def _verified(finding, doc, start, end):
    return VerifiedFinding(
        finding=finding, status=VerificationStatus.VERIFIED, match_score=1.0,
        doc_id=doc.id, start=start, end=end,
    )


class TestRenderMarkdown:
    def _setup(self):
        doc = make_doc(
            "The team replaced all systems in one release without a fallback plan.",
            "cutover",
        )
        finding = make_finding(
            doc=doc, smell=SmellId.BIG_BANG,
            quote="replaced all systems in one release",
        )
        start = doc.body.index("replaced")
        vf = _verified(finding, doc, start, start + len("replaced all systems in one release"))
        report = make_report(doc_ids=(doc.id,), findings=(finding,))
        return doc, report, vf

    def test_contains_run_header_and_finding(self):
        doc, report, vf = self._setup()
        text = render_report(report, [vf], documents={doc.id: doc})
        assert f"# Detection run {report.run_id}" in text
        assert "**Big Bang**" in text
        assert "severity medium" in text

    def test_verified_quote_sliced_from_body_with_offsets(self):
        doc, report, vf = self._setup()
        text = render_report(report, [vf], documents={doc.id: doc})
        assert f'"{doc.body[vf.start:vf.end]}" (chars {vf.start}-{vf.end})' in text

    def test_fabricated_quote_badged(self):
        doc, report, _ = self._setup()
        finding = make_finding(doc=doc, smell=SmellId.SHINY_NICKEL, quote="invented words")
        vf = VerifiedFinding(finding=finding, status=VerificationStatus.FABRICATED, match_score=0.1)
        text = render_report(report, [vf], documents={doc.id: doc})
        assert "⚠ unverified quote" in text

    def test_leaked_quote_names_actual_document(self):
        doc, report, _ = self._setup()
        finding = make_finding(doc=doc, smell=SmellId.SHINY_NICKEL, quote="elsewhere")
        vf = VerifiedFinding(
            finding=finding, status=VerificationStatus.CONTEXT_LEAKAGE,
            match_score=0.95, actual_doc_id="other-doc",
        )
        text = render_report(report, [vf], documents={doc.id: doc})
        assert "⚠ quote from other-doc" in text

    def test_document_without_findings_says_so(self):
        doc = make_doc("Nothing notable in this one.", "quiet")
        report = make_report(doc_ids=(doc.id,))
        text = render_report(report, [], documents={doc.id: doc})
        assert "No findings." in text

    def test_metrics_section_appended(self):
        doc, report, vf = self._setup()
        row = metrics_from_counts(ConfusionCounts(tp=1, fp=0, fn=0, tn=11))
        text = render_report(report, [vf], metrics=row,
                             confusion=ConfusionCounts(tp=1, fp=0, fn=0, tn=11))
        assert "## Metrics" in text
        assert "False Positive Rate (FPR)" in text
        assert "tp=1 fp=0 fn=0 tn=11" in text

    def test_corrective_context_quoted(self):
        doc, _, vf = self._setup()
        report = make_report(doc_ids=(doc.id,), corrective_context="Appendix is stale.")
        text = render_report(report, [vf])
        assert "## Corrective context" in text
        assert "> Appendix is stale." in text

    def test_json_format_round_trips(self):
        doc, report, vf = self._setup()
        payload = json.loads(render_report(report, [vf], fmt="json"))
        assert payload["run_id"] == report.run_id
        assert payload["verification"][0]["status"] == "verified"

    def test_unknown_format_rejected(self):
        doc, report, vf = self._setup()
        with pytest.raises(ValueError):
            render_report(report, [vf], fmt="pdf")


# === decision log ===========================================================


class TestDecisionLog:
    def test_first_entry_chains_from_genesis(self, tmp_path):
        log = DecisionLog(tmp_path / "decisions.jsonl")
        decision = make_decision("run-1:0", "accept", "pat")
        entry = log.append(decision)
        assert entry["prev_hash"] == GENESIS_HASH
        assert entry["entry_hash"] == decision_entry_hash(GENESIS_HASH, decision)

    def test_chain_recomputes_independently(self, tmp_path):
        # recompute the expected hashes with plain hashlib, no library code
        log = DecisionLog(tmp_path / "decisions.jsonl")
        decisions = [make_decision(f"run-1:{i}", "accept", "pat") for i in range(5)]
        for d in decisions:
            log.append(d)

        prev = GENESIS_HASH
        for entry, decision in zip(log.entries(), decisions):
            canonical = json.dumps(decision.to_dict(), sort_keys=True, separators=(",", ":"))
            expected = hashlib.sha256((prev + canonical).encode()).hexdigest()
            assert entry["entry_hash"] == expected
            prev = expected
        assert log.validate_chain()

    def test_tampered_entry_breaks_validation(self, tmp_path):
        path = tmp_path / "decisions.jsonl"
        log = DecisionLog(path)
        for i in range(3):
            log.append(make_decision(f"run-1:{i}", "accept", "pat"))
        lines = path.read_text().splitlines()
        entry = json.loads(lines[1])
        entry["decision"]["verdict"] = "reject"
        lines[1] = json.dumps(entry, sort_keys=True)
        path.write_text("\n".join(lines) + "\n")
        assert not log.validate_chain()

    def test_deleted_entry_breaks_validation(self, tmp_path):
        path = tmp_path / "decisions.jsonl"
        log = DecisionLog(path)
        for i in range(3):
            log.append(make_decision(f"run-1:{i}", "accept", "pat"))
        lines = path.read_text().splitlines()
        path.write_text("\n".join([lines[0], lines[2]]) + "\n")
        assert not log.validate_chain()

    def test_appending_is_byte_prefix_stable(self, tmp_path):
        path = tmp_path / "decisions.jsonl"
        log = DecisionLog(path)
        log.append(make_decision("run-1:0", "accept", "pat"))
        before = path.read_bytes()
        log.append(make_decision("run-1:1", "reject", "pat"))
        after = path.read_bytes()
        assert after.startswith(before)

    def test_find_and_for_finding(self, tmp_path):
        log = DecisionLog(tmp_path / "decisions.jsonl")
        d1 = make_decision("run-1:0", "accept", "pat")
        d2 = make_decision("run-1:0", "reject", "kim", note="second look")
        d3 = make_decision("run-2:4", "needs_info", "pat")
        for d in (d1, d2, d3):
            log.append(d)
        assert log.find(d2.id)["decision"]["reviewer"] == "kim"
        assert log.find("nope") is None
        assert [e["decision"]["id"] for e in log.for_finding("run-1:0")] == [d1.id, d2.id]

    def test_invalid_verdict_rejected(self):
        with pytest.raises(ValueError):
            make_decision("run-1:0", "maybe", "pat")

    def test_parse_finding_ref(self):
        assert parse_finding_ref("run-20240101-abc:7") == ("run-20240101-abc", 7)
        with pytest.raises(UnknownFinding):
            parse_finding_ref("no-index")
        with pytest.raises(UnknownFinding):
            parse_finding_ref(":3")

    def test_append_decision_checks_existence(self, tmp_path):
        log = DecisionLog(tmp_path / "decisions.jsonl")
        decision = make_decision("run-1:5", "accept", "pat")
        with pytest.raises(UnknownFinding):
            append_decision(log, decision, finding_exists=lambda run, idx: False)
        entry = append_decision(log, decision, finding_exists=lambda run, idx: (run, idx) == ("run-1", 5))
        assert entry["decision"]["id"] == decision.id


# === re-assessment ==========================================================


class TestReassessment:
    def _prior(self, baseline_profile):
        docs = (
            make_doc("An interim spreadsheet still drives the allocation process.", "interim"),
            make_doc("Routine quarterly notes without incident.", "quiet"),
        )
        request = DetectionRequest(
            documents=docs, protocol=DetectionProtocol.single(), backend_id=baseline_profile.id,
        )
        return docs, run_detection(request, baseline_profile)

    def test_reassessment_links_runs_and_carries_context(self, baseline_profile):
        docs, prior = self._prior(baseline_profile)
        reassessment, new_report = request_reassessment(
            docs[0].id, "Focus on the allocation process.", prior, baseline_profile, docs,
        )
        assert reassessment.prior_run_id == prior.run_id
        assert reassessment.result_run_id == new_report.run_id
        assert reassessment.status == "completed"
        assert new_report.run_id != prior.run_id
        assert new_report.doc_ids == (docs[0].id,)
        assert new_report.corrective_context == "Focus on the allocation process."
        assert "Focus on the allocation process." in new_report.transcripts[0].request_user

    def test_prior_report_is_untouched(self, baseline_profile):
        docs, prior = self._prior(baseline_profile)
        before = json.dumps(prior.to_dict(), sort_keys=True)
        request_reassessment(docs[0].id, "Look again.", prior, baseline_profile, docs)
        assert json.dumps(prior.to_dict(), sort_keys=True) == before

    def test_empty_context_rejected(self, baseline_profile):
        docs, prior = self._prior(baseline_profile)
        with pytest.raises(EmptyContext):
            request_reassessment(docs[0].id, "   ", prior, baseline_profile, docs)

    def test_document_outside_run_rejected(self, baseline_profile):
        docs, prior = self._prior(baseline_profile)
        with pytest.raises(UnknownDocument):
            request_reassessment("not-a-doc", "context", prior, baseline_profile, docs)
