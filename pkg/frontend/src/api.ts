/** Typed fetch client for the review service.
 *
 * All console state comes through this module; nothing is inferred
 * client-side. Errors carry the service's `{code, message}` body so views
 * can show the real reason.
 */

import type {
  DecisionPosted,
  DocumentPayload,
  FindingEntry,
  MetricsPayload,
  ReassessStarted,
  ReassessmentStatus,
  RunDetail,
  RunStarted,
  RunSummary,
  SmellInfo,
  Verdict,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

export interface StartRunBody {
  profile: string;
  protocol?: string;
  request_id?: string;
  seed?: number;
  temperature?: number;
  max_findings_per_doc?: number;
}

export interface DecisionBody {
  verdict: Verdict;
  reviewer: string;
  note?: string;
  request_id?: string;
}

export interface ReassessBody {
  run_id: string;
  context: string;
  profile?: string;
  request_id?: string;
}

interface PollOptions {
  timeoutMs?: number;
  intervalMs?: number;
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token?: string,
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await response.text();
    let parsed: unknown = null;
    if (text) {
      try {
        parsed = JSON.parse(text);
      } catch {
        parsed = null;
      }
    }
    if (!response.ok) {
      const err = (parsed ?? {}) as { code?: string; message?: string };
      throw new ServiceError(
        response.status,
        err.code ?? "http_error",
        err.message ?? `${method} ${path} failed with status ${response.status}`,
      );
    }
    return parsed as T;
  }

  getCatalog(): Promise<SmellInfo[]> {
    return this.request<{ smells: SmellInfo[] }>("GET", "/catalog").then((r) => r.smells);
  }

  listRuns(): Promise<RunSummary[]> {
    return this.request<{ runs: RunSummary[] }>("GET", "/runs").then((r) => r.runs);
  }

  startRun(body: StartRunBody): Promise<RunStarted> {
    return this.request<RunStarted>("POST", "/runs", body);
  }

  getRun(runId: string): Promise<RunDetail> {
    return this.request<RunDetail>("GET", `/runs/${encodeURIComponent(runId)}`);
  }

  getFindings(runId: string): Promise<FindingEntry[]> {
    return this.request<{ findings: FindingEntry[] }>(
      "GET",
      `/runs/${encodeURIComponent(runId)}/findings`,
    ).then((r) => r.findings);
  }

  getDoc(docId: string): Promise<DocumentPayload> {
    return this.request<DocumentPayload>("GET", `/docs/${encodeURIComponent(docId)}`);
  }

  submitDecision(runId: string, index: number, body: DecisionBody): Promise<DecisionPosted> {
    return this.request<DecisionPosted>(
      "POST",
      `/runs/${encodeURIComponent(runId)}/findings/${index}/decision`,
      body,
    );
  }

  reassess(docId: string, body: ReassessBody): Promise<ReassessStarted> {
    return this.request<ReassessStarted>(
      "POST",
      `/docs/${encodeURIComponent(docId)}/reassess`,
      body,
    );
  }

  getReassessment(reassessmentId: string): Promise<ReassessmentStatus> {
    return this.request<ReassessmentStatus>(
      "GET",
      `/reassessments/${encodeURIComponent(reassessmentId)}`,
    );
  }

  getMetrics(runId: string): Promise<MetricsPayload> {
    return this.request<MetricsPayload>("GET", `/metrics/${encodeURIComponent(runId)}`);
  }

  /** Poll a run until it leaves pending state. Resolves on `completed`,
   * rejects on `failed` or timeout. */
  async waitForRun(runId: string, options: PollOptions = {}): Promise<RunDetail> {
    const timeoutMs = options.timeoutMs ?? 60_000;
    const intervalMs = options.intervalMs ?? 250;
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const run = await this.getRun(runId);
      if (run.status === "completed") return run;
      if (run.status === "failed") {
        throw new ServiceError(500, "run_failed", run.error ?? `run ${runId} failed`);
      }
      if (Date.now() >= deadline) {
        throw new ServiceError(504, "poll_timeout", `run ${runId} still ${run.status}`);
      }
      await sleep(intervalMs);
    }
  }

  async waitForReassessment(
    reassessmentId: string,
    options: PollOptions = {},
  ): Promise<ReassessmentStatus> {
    const timeoutMs = options.timeoutMs ?? 60_000;
    const intervalMs = options.intervalMs ?? 250;
    const deadline = Date.now() + timeoutMs;
    for (;;) {
      const entry = await this.getReassessment(reassessmentId);
      if (entry.status === "completed") return entry;
      if (entry.status === "failed") {
        throw new ServiceError(500, "reassessment_failed", entry.error ?? "reassessment failed");
      }
      if (Date.now() >= deadline) {
        throw new ServiceError(504, "poll_timeout", `reassessment still ${entry.status}`);
      }
      await sleep(intervalMs);
    }
  }
}
