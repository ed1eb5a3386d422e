import type { Decision, FindingEntry, Verification } from "../src/types.js";

export function makeVerification(overrides: Partial<Verification> = {}): Verification {
  return {
    status: "verified",
    match_score: 1.0,
    doc_id: "doc-1",
    start: 0,
    end: 10,
    actual_doc_id: null,
    ...overrides,
  };
}

export function makeFinding(
  overrides: Partial<FindingEntry> & { index: number },
): FindingEntry {
  return {
    finding_ref: `run-1:${overrides.index}`,
    claimed_doc_ref: "doc-1",
    resolved_doc_id: "doc-1",
    smell: "big_bang",
    raw_label: "Big Bang",
    severity: "medium",
    evidence_quote: "replaced every system in one release",
    rationale: "Single cutover with no fallback.",
    recommendation: "Stage the migration.",
    call_index: 0,
    tags: [],
    verification: makeVerification(),
    decisions: [],
    ...overrides,
  };
}

export function makeDecision(overrides: Partial<Decision> = {}): Decision {
  return {
    id: "d-1",
    finding_ref: "run-1:0",
    verdict: "accept",
    reviewer: "kim",
    note: "",
    timestamp: "2024-08-17T00:00:00Z",
    ...overrides,
  };
}
