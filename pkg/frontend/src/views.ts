/** HTML renderers for the console views.
 *
 * Every renderer is a pure function from service payloads to an HTML
 * string, so the whole presentation layer is testable without a browser.
 * The document viewer renders quotes exclusively by slicing the document
 * body at verified spans; the model's own quote string never reaches the
 * page, which keeps fabricated text from being displayed as if present.
 */

import { computeHighlights, segmentBody } from "./highlights.js";
import type { HighlightResult } from "./highlights.js";
import type { ReportDiff } from "./diff.js";
import type {
  DocumentPayload,
  FindingEntry,
  MetricsPayload,
  RunDetail,
  RunSummary,
  Verification,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

const VERDICT_LABELS: Record<string, string> = {
  accept: "accepted",
  reject: "rejected",
  needs_info: "needs info",
};

export function verificationBadge(v: Verification | null): string {
  if (!v) return `<span class="badge badge-unverified">unverified</span>`;
  switch (v.status) {
    case "verified":
      return `<span class="badge badge-verified">verified ${v.match_score.toFixed(2)}</span>`;
    case "fabricated_citation":
      return `<span class="badge badge-fabricated">fabricated citation</span>`;
    case "context_leakage":
      return (
        `<span class="badge badge-leakage">leaked from ` +
        `${escapeHtml(v.actual_doc_id ?? "another document")}</span>`
      );
    case "no_quote_provided":
      return `<span class="badge badge-noquote">no quote</span>`;
  }
}

export function decisionStatus(finding: FindingEntry): string {
  const latest = finding.decisions[finding.decisions.length - 1];
  if (!latest) return `<span class="decision-state undecided">undecided</span>`;
  const label = VERDICT_LABELS[latest.verdict] ?? latest.verdict;
  return `<span class="decision-state ${escapeHtml(latest.verdict)}">${escapeHtml(label)}</span>`;
}

// === run list ===========================================================

export function renderRunList(runs: RunSummary[]): string {
  if (runs.length === 0) {
    return `<section class="run-list"><h1>Runs</h1><p class="empty">No runs yet.</p></section>`;
  }
  const rows = runs
    .map((run) => {
      const prior = run.prior_run_id
        ? `revises <a href="#/runs/${escapeHtml(run.prior_run_id)}">${escapeHtml(run.prior_run_id)}</a>`
        : "";
      return (
        `<tr data-run="${escapeHtml(run.run_id)}">` +
        `<td><a href="#/runs/${escapeHtml(run.run_id)}">${escapeHtml(run.run_id)}</a></td>` +
        `<td class="status-${escapeHtml(run.status)}">${escapeHtml(run.status)}</td>` +
        `<td>${escapeHtml(run.kind)}</td>` +
        `<td>${escapeHtml(run.backend_id ?? "")}</td>` +
        `<td>${escapeHtml(run.protocol ?? "")}</td>` +
        `<td class="num">${run.doc_count}</td>` +
        `<td class="num">${run.finding_count}</td>` +
        `<td>${prior}</td>` +
        `</tr>`
      );
    })
    .join("");
  return (
    `<section class="run-list"><h1>Runs</h1><table>` +
    `<thead><tr><th>Run</th><th>Status</th><th>Kind</th><th>Backend</th>` +
    `<th>Protocol</th><th>Docs</th><th>Findings</th><th></th></tr></thead>` +
    `<tbody>${rows}</tbody></table></section>`
  );
}

// === document list ======================================================

export function renderDocumentList(run: RunDetail): string {
  const documents = run.documents ?? [];
  const header =
    `<header class="run-header"><h1>Run ${escapeHtml(run.run_id)}</h1>` +
    `<p>${escapeHtml(run.backend_id ?? "")} · ${escapeHtml(run.protocol ?? "")} · ` +
    `${run.call_count ?? 0} calls · ${run.finding_count ?? 0} findings · ` +
    `<a href="#/runs/${escapeHtml(run.run_id)}/metrics">metrics</a></p>` +
    (run.corrective_context
      ? `<p class="context-note">Corrective context: ${escapeHtml(run.corrective_context)}</p>`
      : "") +
    `</header>`;
  const rows = documents
    .map(
      (d) =>
        `<tr><td><a href="#/runs/${escapeHtml(run.run_id)}/docs/${escapeHtml(d.doc_id)}">` +
        `${escapeHtml(d.title)}</a></td>` +
        `<td class="mono">${escapeHtml(d.doc_id)}</td>` +
        `<td class="num">${d.finding_count}</td></tr>`,
    )
    .join("");
  return (
    `<section class="doc-list">${header}<table>` +
    `<thead><tr><th>Document</th><th>Id</th><th>Findings</th></tr></thead>` +
    `<tbody>${rows}</tbody></table></section>`
  );
}

// === document detail ====================================================

function renderBody(doc: DocumentPayload, highlights: HighlightResult): string {
  const segments = segmentBody(doc.body.length, highlights.ranges);
  const parts = segments.map((segment) => {
    const text = escapeHtml(doc.body.slice(segment.start, segment.end));
    if (segment.covering.length === 0) return text;
    const refs = segment.covering.join(",");
    const depth = Math.min(segment.covering.length, 3);
    return `<mark class="hl depth-${depth}" data-findings="${refs}">${text}</mark>`;
  });
  return `<pre class="doc-body">${parts.join("")}</pre>`;
}

function renderFindingCard(runId: string, doc: DocumentPayload, finding: FindingEntry): string {
  const v = finding.verification;
  const quote =
    v && v.status === "verified" && v.start !== null && v.end !== null
      ? `<blockquote class="evidence">${escapeHtml(doc.body.slice(v.start, v.end))}</blockquote>`
      : `<p class="no-evidence">No verifiable quote in this document.</p>`;
  const smell = finding.smell ?? `unresolved label ${JSON.stringify(finding.raw_label)}`;
  const buttons = (["accept", "reject", "needs_info"] as const)
    .map(
      (verdict) =>
        `<button class="decide ${verdict}" data-run="${escapeHtml(runId)}" ` +
        `data-index="${finding.index}" data-verdict="${verdict}">` +
        `${escapeHtml(VERDICT_LABELS[verdict] ?? verdict)}</button>`,
    )
    .join("");
  return (
    `<article class="finding" data-finding="${finding.index}" id="finding-${finding.index}">` +
    `<h3>${escapeHtml(smell)} <span class="severity ${escapeHtml(finding.severity)}">` +
    `${escapeHtml(finding.severity)}</span></h3>` +
    verificationBadge(v) +
    quote +
    (finding.rationale ? `<p class="rationale">${escapeHtml(finding.rationale)}</p>` : "") +
    (finding.recommendation
      ? `<p class="recommendation">${escapeHtml(finding.recommendation)}</p>`
      : "") +
    `<div class="decide-row">${decisionStatus(finding)}${buttons}</div>` +
    `</article>`
  );
}

export function renderDocumentDetail(
  runId: string,
  doc: DocumentPayload,
  findings: FindingEntry[],
): string {
  const docFindings = findings.filter((f) => f.resolved_doc_id === doc.id);
  const highlights = computeHighlights(doc.body.length, docFindings);
  const cards = docFindings.map((f) => renderFindingCard(runId, doc, f)).join("");
  const sidebar =
    docFindings.length > 0
      ? `<aside class="findings">${cards}</aside>`
      : `<aside class="findings"><p class="empty">No findings for this document.</p></aside>`;
  const contextBox =
    `<form class="reassess" data-doc="${escapeHtml(doc.id)}" data-run="${escapeHtml(runId)}">` +
    `<label for="context-text">Corrective context</label>` +
    `<textarea id="context-text" name="context" rows="3" ` +
    `placeholder="Facts the next assessment of this document should know"></textarea>` +
    `<button type="submit" class="submit-context" disabled>Reassess document</button>` +
    `</form>`;
  return (
    `<section class="doc-detail">` +
    `<header><h1>${escapeHtml(doc.title)}</h1>` +
    `<p class="mono">${escapeHtml(doc.id)} · ${escapeHtml(doc.source_format)}` +
    (doc.business_domain ? ` · ${escapeHtml(doc.business_domain)}` : "") +
    `</p></header>` +
    `<div class="doc-columns">${renderBody(doc, highlights)}${sidebar}</div>` +
    contextBox +
    `</section>`
  );
}

// === metrics dashboard ==================================================

const METRIC_LABELS: Array<[keyof MetricsPayload["metrics"] & string, string]> = [
  ["accuracy", "Accuracy"],
  ["recall", "Recall"],
  ["fpr", "False Positive Rate (FPR)"],
  ["precision", "Precision"],
  ["f1", "F1 Score"],
];

export function renderMetricsDashboard(metrics: MetricsPayload): string {
  const cells = METRIC_LABELS.map(([key, label]) => {
    const value = metrics.metrics[key] as number;
    const flagged = metrics.metrics.zero_denominator_flags.includes(key);
    return (
      `<div class="metric"><span class="metric-label">${escapeHtml(label)}</span>` +
      `<span class="metric-value">${value.toFixed(2)}${flagged ? " *" : ""}</span></div>`
    );
  }).join("");
  const flagNote = metrics.metrics.zero_denominator_flags.length
    ? `<p class="flag-note">* zero denominator</p>`
    : "";
  const confusion =
    `<p class="confusion">tp ${metrics.confusion.tp} · fp ${metrics.confusion.fp} · ` +
    `fn ${metrics.confusion.fn} · tn ${metrics.confusion.tn} · ` +
    `doc exact ${metrics.doc_exact_accuracy.toFixed(3)}</p>`;
  const errorRows = Object.entries(metrics.errors)
    .map(
      ([name, count]) =>
        `<tr><td>${escapeHtml(name.replace(/_/g, " "))}</td><td class="num">${count}</td></tr>`,
    )
    .join("");
  return (
    `<section class="metrics"><h1>Metrics for ${escapeHtml(metrics.run_id)}</h1>` +
    `<div class="metric-grid">${cells}</div>${flagNote}${confusion}` +
    `<h2>Error types</h2><table class="errors"><tbody>${errorRows}</tbody></table>` +
    `</section>`
  );
}

// === reassessment diff ==================================================

function diffCard(doc: DocumentPayload | null, finding: FindingEntry, cls: string): string {
  const v = finding.verification;
  const quote =
    doc && v && v.status === "verified" && v.start !== null && v.end !== null
      ? `<blockquote>${escapeHtml(doc.body.slice(v.start, v.end))}</blockquote>`
      : "";
  const smell = finding.smell ?? finding.raw_label;
  return (
    `<article class="diff-finding ${cls}">` +
    `<h4>${escapeHtml(smell)}</h4>${verificationBadge(v)}${quote}</article>`
  );
}

export function renderReassessmentDiff(
  priorRun: RunDetail,
  resultRun: RunDetail,
  doc: DocumentPayload,
  diff: ReportDiff,
): string {
  const before =
    diff.removed.map((f) => diffCard(doc, f, "removed")).join("") +
    diff.kept.map((p) => diffCard(doc, p.before, "kept")).join("");
  const after =
    diff.added.map((f) => diffCard(doc, f, "added")).join("") +
    diff.kept.map((p) => diffCard(doc, p.after, "kept")).join("");
  const summary =
    `${diff.removed.length} removed · ${diff.added.length} added · ${diff.kept.length} kept`;
  return (
    `<section class="reassess-diff">` +
    `<h1>Reassessment of ${escapeHtml(doc.title)}</h1>` +
    `<p>Before: <a href="#/runs/${escapeHtml(priorRun.run_id)}">${escapeHtml(priorRun.run_id)}</a> · ` +
    `After: <a href="#/runs/${escapeHtml(resultRun.run_id)}">${escapeHtml(resultRun.run_id)}</a></p>` +
    `<p class="context-note">Corrective context: ` +
    `${escapeHtml(resultRun.corrective_context ?? "")}</p>` +
    `<p class="diff-summary">${summary}</p>` +
    `<div class="diff-columns">` +
    `<div class="diff-before"><h2>Before</h2>${before || `<p class="empty">No findings.</p>`}</div>` +
    `<div class="diff-after"><h2>After</h2>${after || `<p class="empty">No findings.</p>`}</div>` +
    `</div></section>`
  );
}

// === chrome =============================================================

export function renderErrorBanner(message: string): string {
  return `<div class="error-banner" role="alert">${escapeHtml(message)}</div>`;
}

export function renderPending(label: string): string {
  return `<section class="pending"><p>${escapeHtml(label)}…</p></section>`;
}
