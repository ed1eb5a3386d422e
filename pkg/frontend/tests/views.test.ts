import { describe, expect, it } from "vitest";

import { diffFindings } from "../src/diff.js";
import type { DocumentPayload, MetricsPayload, RunDetail, RunSummary } from "../src/types.js";
import {
  decisionStatus,
  escapeHtml,
  renderDocumentDetail,
  renderDocumentList,
  renderErrorBanner,
  renderMetricsDashboard,
  renderReassessmentDiff,
  renderRunList,
} from "../src/views.js";
import { makeDecision, makeFinding, makeVerification } from "./helpers.js";

function makeDoc(overrides: Partial<DocumentPayload> = {}): DocumentPayload {
  const body = "The cutover replaced every system in one big release last spring.";
  return {
    id: "doc-1",
    title: "Cutover Review",
    source_format: "txt",
    body,
    paragraph_offsets: [0],
    business_domain: "logistics",
    ...overrides,
  };
}

function makeRunSummary(overrides: Partial<RunSummary> = {}): RunSummary {
  return {
    run_id: "run-1",
    status: "completed",
    kind: "detection",
    backend_id: "baseline",
    protocol: "single",
    doc_count: 30,
    finding_count: 31,
    created_at: "2024-08-17T00:00:00Z",
    prior_run_id: null,
    ...overrides,
  };
}

function makeRunDetail(overrides: Partial<RunDetail> = {}): RunDetail {
  return {
    run_id: "run-1",
    status: "completed",
    kind: "detection",
    prior_run_id: null,
    backend_id: "baseline",
    protocol: "batch:10",
    call_count: 3,
    finding_count: 2,
    documents: [
      { doc_id: "doc-1", title: "Cutover Review", finding_count: 2 },
      { doc_id: "doc-2", title: "Quarterly Plan", finding_count: 0 },
    ],
    ...overrides,
  };
}

const METRICS: MetricsPayload = {
  run_id: "run-1",
  metrics: {
    accuracy: 1.0,
    recall: 1.0,
    fpr: 0.0,
    precision: 1.0,
    f1: 1.0,
    zero_denominator_flags: [],
  },
  confusion: { tp: 31, fp: 0, fn: 0, tn: 329 },
  doc_exact_accuracy: 1.0,
  errors: {
    omission: 0,
    misclassification: 0,
    batch_context_leakage: 0,
    false_positive: 0,
    fabricated_citation: 0,
  },
};

// === chrome =============================================================

describe("escapeHtml", () => {
  it("escapes markup characters", () => {
    expect(escapeHtml(`<b>&"'`)).toBe("&lt;b&gt;&amp;&quot;&#39;");
  });
});

describe("renderErrorBanner", () => {
  it("escapes the message", () => {
    expect(renderErrorBanner("<oops>")).toContain("&lt;oops&gt;");
  });
});

// === run list ===========================================================

describe("renderRunList", () => {
  it("renders one row per run with a detail link", () => {
    const html = renderRunList([makeRunSummary(), makeRunSummary({ run_id: "run-2" })]);
    expect(html.match(/<tr data-run=/g)).toHaveLength(2);
    expect(html).toContain(`href="#/runs/run-1"`);
  });

  it("links reassessment runs to the run they revise", () => {
    const html = renderRunList([
      makeRunSummary({ run_id: "run-2", kind: "reassessment", prior_run_id: "run-1" }),
    ]);
    expect(html).toContain("revises");
    expect(html).toContain(`href="#/runs/run-1"`);
  });

  it("says so when there are no runs", () => {
    expect(renderRunList([])).toContain("No runs yet.");
  });
});

// === document list ======================================================

describe("renderDocumentList", () => {
  it("shows per-document finding counts and links", () => {
    const html = renderDocumentList(makeRunDetail());
    expect(html).toContain(`href="#/runs/run-1/docs/doc-1"`);
    expect(html).toContain("Cutover Review");
    expect(html).toContain("Quarterly Plan");
    expect(html).toContain(`href="#/runs/run-1/metrics"`);
  });

  it("shows the corrective context of a reassessment run", () => {
    const html = renderDocumentList(
      makeRunDetail({ kind: "reassessment", corrective_context: "Cutover was reverted." }),
    );
    expect(html).toContain("Corrective context: Cutover was reverted.");
  });
});

// === document detail ====================================================

describe("renderDocumentDetail", () => {
  it("marks exactly the verified span of the body", () => {
    const doc = makeDoc();
    const start = doc.body.indexOf("replaced every system");
    const end = start + "replaced every system".length;
    const finding = makeFinding({ index: 0, verification: makeVerification({ start, end }) });
    const html = renderDocumentDetail("run-1", doc, [finding]);
    expect(html).toContain(`<mark class="hl depth-1" data-findings="0">replaced every system</mark>`);
  });

  it("renders quotes from the body slice, never the model quote string", () => {
    const doc = makeDoc();
    const start = doc.body.indexOf("replaced every system");
    const end = start + "replaced every system".length;
    const finding = makeFinding({
      index: 0,
      evidence_quote: "REPLACED EVERY SYSTEM!!!",
      verification: makeVerification({ start, end }),
    });
    const html = renderDocumentDetail("run-1", doc, [finding]);
    expect(html).toContain("replaced every system");
    expect(html).not.toContain("REPLACED EVERY SYSTEM!!!");
  });

  it("renders fabricated citations badge-only", () => {
    const doc = makeDoc();
    const finding = makeFinding({
      index: 0,
      evidence_quote: "text that exists nowhere",
      verification: makeVerification({
        status: "fabricated_citation",
        match_score: 0.1,
        start: null,
        end: null,
      }),
    });
    const html = renderDocumentDetail("run-1", doc, [finding]);
    expect(html).toContain("fabricated citation");
    expect(html).toContain("No verifiable quote");
    expect(html).not.toContain("text that exists nowhere");
    expect(html).not.toContain("<mark");
  });

  it("names the actual source for leaked quotes", () => {
    const doc = makeDoc();
    const finding = makeFinding({
      index: 0,
      verification: makeVerification({
        status: "context_leakage",
        actual_doc_id: "doc-9",
        start: null,
        end: null,
      }),
    });
    const html = renderDocumentDetail("run-1", doc, [finding]);
    expect(html).toContain("leaked from doc-9");
  });

  it("layers overlapping highlights", () => {
    const doc = makeDoc();
    const a = makeFinding({ index: 0, verification: makeVerification({ start: 4, end: 20 }) });
    const b = makeFinding({ index: 1, verification: makeVerification({ start: 12, end: 30 }) });
    const html = renderDocumentDetail("run-1", doc, [a, b]);
    expect(html).toContain(`data-findings="0,1"`);
    expect(html).toContain("depth-2");
  });

  it("escapes document text inside highlights", () => {
    const doc = makeDoc({ body: `before <script>alert("x")</script> after` });
    const finding = makeFinding({
      index: 0,
      verification: makeVerification({ start: 7, end: 15 }),
    });
    const html = renderDocumentDetail("run-1", doc, [finding]);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });

  it("only lists findings resolved to this document", () => {
    const doc = makeDoc();
    const ours = makeFinding({ index: 0 });
    const other = makeFinding({ index: 1, resolved_doc_id: "doc-2", smell: "shiny_nickel" });
    const html = renderDocumentDetail("run-1", doc, [ours, other]);
    expect(html).toContain("big_bang");
    expect(html).not.toContain("shiny_nickel");
  });

  it("tolerates findings without a recommendation", () => {
    const doc = makeDoc();
    const finding = makeFinding({ index: 0, recommendation: null });
    const html = renderDocumentDetail("run-1", doc, [finding]);
    expect(html).not.toContain(`class="recommendation"`);
  });

  it("renders decision controls with routing data", () => {
    const doc = makeDoc();
    const html = renderDocumentDetail("run-1", doc, [makeFinding({ index: 3 })]);
    expect(html).toContain(`data-run="run-1" data-index="3" data-verdict="accept"`);
    expect(html).toContain(`data-verdict="reject"`);
    expect(html).toContain(`data-verdict="needs_info"`);
  });

  it("includes a corrective-context form with submit initially disabled", () => {
    const html = renderDocumentDetail("run-1", makeDoc(), []);
    expect(html).toContain(`form class="reassess" data-doc="doc-1" data-run="run-1"`);
    expect(html).toContain("disabled");
  });
});

describe("decisionStatus", () => {
  it("shows undecided without decisions", () => {
    expect(decisionStatus(makeFinding({ index: 0 }))).toContain("undecided");
  });

  it("shows the latest verdict label", () => {
    const finding = makeFinding({
      index: 0,
      decisions: [makeDecision({ verdict: "reject" }), makeDecision({ verdict: "accept" })],
    });
    expect(decisionStatus(finding)).toContain("accepted");
  });
});

// === metrics ============================================================

describe("renderMetricsDashboard", () => {
  it("renders the five metric labels", () => {
    const html = renderMetricsDashboard(METRICS);
    for (const label of ["Accuracy", "Recall", "False Positive Rate (FPR)", "Precision", "F1 Score"]) {
      expect(html).toContain(label);
    }
    expect(html).toContain("tp 31");
    expect(html).not.toContain("zero denominator");
  });

  it("flags zero-denominator metrics", () => {
    const flagged: MetricsPayload = {
      ...METRICS,
      metrics: { ...METRICS.metrics, recall: 0.0, zero_denominator_flags: ["recall"] },
    };
    const html = renderMetricsDashboard(flagged);
    expect(html).toContain("0.00 *");
    expect(html).toContain("* zero denominator");
  });

  it("lists error-type counts", () => {
    const html = renderMetricsDashboard({
      ...METRICS,
      errors: { ...METRICS.errors, fabricated_citation: 2 },
    });
    expect(html).toContain("fabricated citation");
    expect(html).toContain(`<td class="num">2</td>`);
  });
});

// === reassessment diff ==================================================

describe("renderReassessmentDiff", () => {
  it("splits before and after with the linked run ids", () => {
    const doc = makeDoc();
    const start = doc.body.indexOf("replaced every system");
    const end = start + "replaced every system".length;
    const before = [
      makeFinding({ index: 0, verification: makeVerification({ start, end }) }),
      makeFinding({ index: 1, smell: "shiny_nickel", evidence_quote: "one big release" }),
    ];
    const after = [makeFinding({ index: 0, verification: makeVerification({ start, end }) })];
    const diff = diffFindings(before, after);
    const html = renderReassessmentDiff(
      makeRunDetail(),
      makeRunDetail({
        run_id: "run-2",
        kind: "reassessment",
        prior_run_id: "run-1",
        corrective_context: "The nickel was approved.",
      }),
      doc,
      diff,
    );
    expect(html).toContain("1 removed · 0 added · 1 kept");
    expect(html).toContain(`href="#/runs/run-1"`);
    expect(html).toContain(`href="#/runs/run-2"`);
    expect(html).toContain("Corrective context: The nickel was approved.");
    expect(html).toContain(`class="diff-finding removed"`);
    expect(html).toContain(`class="diff-finding kept"`);
  });
});
