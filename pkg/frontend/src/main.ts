/** Browser entry point: hash router, event wiring, and polling.
 *
 * Served by the review service itself (`serve --static-dir`), so the API
 * base is the page origin and every state transition is a service call.
 */

import { ApiClient, ServiceError } from "./api.js";
import { diffFindings } from "./diff.js";
import { OptimisticStore } from "./optimistic.js";
import type { Decision, FindingEntry } from "./types.js";
import { reassessmentId as idOf } from "./types.js";
import {
  renderDocumentDetail,
  renderDocumentList,
  renderErrorBanner,
  renderMetricsDashboard,
  renderPending,
  renderReassessmentDiff,
  renderRunList,
} from "./views.js";

const app = document.getElementById("app");
if (!app) throw new Error("missing #app container");

const api = new ApiClient("");
const findingsStore = new OptimisticStore<FindingEntry[]>([]);

let pollTimer: number | undefined;

type Route =
  | { view: "runs" }
  | { view: "run"; runId: string }
  | { view: "doc"; runId: string; docId: string }
  | { view: "metrics"; runId: string }
  | { view: "diff"; reassessmentId: string };

function parseHash(hash: string): Route {
  const parts = hash.replace(/^#\/?/, "").split("/").filter(Boolean);
  if (parts[0] === "runs" && parts[1] && parts[2] === "docs" && parts[3]) {
    return { view: "doc", runId: parts[1], docId: parts[3] };
  }
  if (parts[0] === "runs" && parts[1] && parts[2] === "metrics") {
    return { view: "metrics", runId: parts[1] };
  }
  if (parts[0] === "runs" && parts[1]) return { view: "run", runId: parts[1] };
  if (parts[0] === "reassessments" && parts[1]) {
    return { view: "diff", reassessmentId: parts[1] };
  }
  return { view: "runs" };
}

function showError(error: unknown): void {
  const message =
    error instanceof ServiceError
      ? `${error.code}: ${error.message}`
      : error instanceof Error
        ? error.message
        : String(error);
  const banner = document.createElement("div");
  banner.innerHTML = renderErrorBanner(message);
  app!.prepend(banner);
  setTimeout(() => banner.remove(), 6000);
}

function schedule(ms: number): void {
  pollTimer = window.setTimeout(() => void render(), ms);
}

async function render(): Promise<void> {
  if (pollTimer !== undefined) {
    clearTimeout(pollTimer);
    pollTimer = undefined;
  }
  const route = parseHash(location.hash);
  try {
    switch (route.view) {
      case "runs": {
        const runs = await api.listRuns();
        app!.innerHTML = renderRunList(runs);
        if (runs.some((r) => r.status === "pending")) schedule(1000);
        break;
      }
      case "run": {
        const run = await api.getRun(route.runId);
        if (run.status === "pending") {
          app!.innerHTML = renderPending(`Run ${route.runId} is ${run.status}`);
          schedule(750);
          break;
        }
        app!.innerHTML = renderDocumentList(run);
        break;
      }
      case "doc": {
        const [doc, findings] = await Promise.all([
          api.getDoc(route.docId),
          api.getFindings(route.runId),
        ]);
        findingsStore.set(findings);
        app!.innerHTML = renderDocumentDetail(route.runId, doc, findings);
        wireDocView(route.runId, route.docId);
        break;
      }
      case "metrics": {
        const metrics = await api.getMetrics(route.runId);
        app!.innerHTML = renderMetricsDashboard(metrics);
        break;
      }
      case "diff": {
        const entry = await api.getReassessment(route.reassessmentId);
        if (entry.status === "pending") {
          app!.innerHTML = renderPending("Reassessment running");
          schedule(750);
          break;
        }
        if (entry.status !== "completed" || !entry.result_run_id) {
          throw new Error(entry.error ?? `reassessment ${entry.status}`);
        }
        const [priorRun, resultRun, doc, before, after] = await Promise.all([
          api.getRun(entry.prior_run_id),
          api.getRun(entry.result_run_id),
          api.getDoc(entry.doc_id),
          api.getFindings(entry.prior_run_id),
          api.getFindings(entry.result_run_id),
        ]);
        const diff = diffFindings(
          before.filter((f) => f.resolved_doc_id === entry.doc_id),
          after.filter((f) => f.resolved_doc_id === entry.doc_id),
        );
        app!.innerHTML = renderReassessmentDiff(priorRun, resultRun, doc, diff);
        break;
      }
    }
  } catch (error) {
    app!.innerHTML = "";
    showError(error);
  }
}

function wireDocView(runId: string, docId: string): void {
  const unsubscribe = findingsStore.subscribe((findings) => {
    void api.getDoc(docId).then((doc) => {
      app!.innerHTML = renderDocumentDetail(runId, doc, findings);
      wireControls(runId, docId);
    });
  });
  window.addEventListener("hashchange", unsubscribe, { once: true });
  wireControls(runId, docId);
}

function wireControls(runId: string, docId: string): void {
  for (const button of app!.querySelectorAll<HTMLButtonElement>("button.decide")) {
    button.addEventListener("click", () => {
      const index = Number(button.dataset.index);
      const verdict = button.dataset.verdict as Decision["verdict"];
      const requestId = crypto.randomUUID();
      const placeholder: Decision = {
        id: requestId,
        finding_ref: `${runId}:${index}`,
        verdict,
        reviewer: "console",
        note: "",
        timestamp: new Date().toISOString(),
      };
      void findingsStore
        .mutate(
          (findings) =>
            findings.map((f) =>
              f.index === index ? { ...f, decisions: [...f.decisions, placeholder] } : f,
            ),
          () =>
            api.submitDecision(runId, index, {
              verdict,
              reviewer: "console",
              request_id: requestId,
            }),
          (findings, posted) =>
            findings.map((f) =>
              f.index === index
                ? {
                    ...f,
                    decisions: f.decisions.map((d) => (d.id === requestId ? posted.decision : d)),
                  }
                : f,
            ),
        )
        .catch(showError);
    });
  }

  const form = app!.querySelector<HTMLFormElement>("form.reassess");
  if (!form) return;
  const textarea = form.querySelector<HTMLTextAreaElement>("textarea");
  const submit = form.querySelector<HTMLButtonElement>("button.submit-context");
  if (!textarea || !submit) return;
  textarea.addEventListener("input", () => {
    submit.disabled = textarea.value.trim().length === 0;
  });
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const context = textarea.value.trim();
    if (!context) return;
    submit.disabled = true;
    api
      .reassess(docId, { run_id: runId, context, request_id: crypto.randomUUID() })
      .then((started) => {
        location.hash = `#/reassessments/${idOf(started)}`;
      })
      .catch((error) => {
        submit.disabled = false;
        showError(error);
      });
  });
}

window.addEventListener("hashchange", () => void render());
void render();
