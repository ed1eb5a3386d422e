/** Shapes of the JSON payloads served by the review service. */

export type VerificationStatus =
  | "verified"
  | "no_quote_provided"
  | "context_leakage"
  | "fabricated_citation";

export type Severity = "low" | "medium" | "high";

export type Verdict = "accept" | "reject" | "needs_info";

export interface SmellInfo {
  id: string;
  name: string;
  description: string;
  aliases: string[];
}

export interface RunSummary {
  run_id: string;
  status: string;
  kind: string;
  backend_id: string | null;
  protocol: string | null;
  doc_count: number;
  finding_count: number;
  created_at: string | null;
  prior_run_id: string | null;
}

export interface DocumentSummary {
  doc_id: string;
  title: string;
  finding_count: number;
}

export interface RunDetail {
  run_id: string;
  status: string;
  kind: string;
  prior_run_id: string | null;
  error?: string | null;
  backend_id?: string;
  protocol?: string;
  prompt_version?: string;
  seed?: number | null;
  temperature?: number;
  created_at?: string;
  corrective_context?: string | null;
  total_seconds?: number;
  call_count?: number;
  finding_count?: number;
  diagnostic_count?: number;
  documents?: DocumentSummary[];
}

export interface Verification {
  status: VerificationStatus;
  match_score: number;
  doc_id: string | null;
  start: number | null;
  end: number | null;
  actual_doc_id: string | null;
}

export interface Decision {
  id: string;
  finding_ref: string;
  verdict: Verdict;
  reviewer: string;
  note: string;
  timestamp: string;
}

export interface FindingEntry {
  index: number;
  finding_ref: string;
  claimed_doc_ref: string | null;
  resolved_doc_id: string | null;
  smell: string | null;
  raw_label: string;
  severity: Severity;
  evidence_quote: string | null;
  rationale: string;
  recommendation: string | null;
  call_index: number;
  tags: string[];
  verification: Verification | null;
  decisions: Decision[];
}

export interface AnnotationPayload {
  doc_id: string;
  scenario: number;
  planted: string[];
  spans?: Record<string, [number, number]>;
}

export interface DocumentPayload {
  id: string;
  title: string;
  source_format: string;
  body: string;
  paragraph_offsets: number[];
  business_domain: string | null;
  annotation?: AnnotationPayload;
}

export interface MetricsPayload {
  run_id: string;
  metrics: {
    accuracy: number;
    recall: number;
    fpr: number;
    precision: number;
    f1: number;
    zero_denominator_flags: string[];
  };
  confusion: { tp: number; fp: number; fn: number; tn: number };
  doc_exact_accuracy: number;
  errors: Record<string, number>;
}

export interface ReassessmentStatus {
  id: string;
  doc_id: string;
  prior_run_id: string;
  result_run_id: string | null;
  corrective_context: string;
  status: string;
  request_id?: string | null;
  error?: string;
}

export interface RunStarted {
  run_id: string;
  status: string;
}

export interface DecisionPosted {
  decision: Decision;
  entry_hash: string;
}

export interface ReassessStarted {
  reassessment_id?: string;
  status: string;
  /** Present when an idempotent retry returned the stored record instead. */
  id?: string;
  result_run_id?: string | null;
}

/** Identifier of a stored reassessment from either response shape. */
export function reassessmentId(r: ReassessStarted): string {
  const id = r.reassessment_id ?? r.id;
  if (!id) throw new Error("reassessment response carried no id");
  return id;
}
