// Wire types mirroring the simforge HTTP API JSON. The UI displays these
// values verbatim; it never derives numbers of its own.

export type SessionState =
  | "Described"
  | "PromptBuilt"
  | "Generated"
  | "Approved"
  | "Rejected"
  | "Executed"
  | "Verified"
  | "Failed";

export type CheckStatus = "pass" | "fail" | "skip";

export interface ReportCheck {
  check_id: string;
  status: CheckStatus;
  detail: string;
  measured: Record<string, unknown>;
}

export interface ValidationReport {
  overall: "pass" | "fail";
  checks: ReportCheck[];
}

export interface Approval {
  actor: string;
  decision: "approve" | "reject" | "signoff";
  reason: string;
  ts: string;
}

export interface RunRef {
  index: number;
  seed: number;
  steps_used: number;
  partial: boolean;
}

export interface ReportRef {
  index: number;
  kind: "static" | "dynamic" | "oracle";
  overall: "pass" | "fail";
}

export interface SessionFailure {
  stage: string;
  error: string;
  message: string;
}

export interface Session {
  id: string;
  mode: "single_runtime" | "gated";
  frontend: "deterministic" | "llm";
  state: SessionState;
  description: string;
  grammar_version: string;
  created_at: string;
  prompt: string | null;
  prompt_meta: Record<string, unknown> | null;
  completion: string | null;
  backend_used: string | null;
  attempts: number;
  artifact_kind: "spec" | "program" | null;
  artifact_text: string | null;
  seed: number;
  static_report: ValidationReport | null;
  approvals: Approval[];
  runs: RunRef[];
  reports: ReportRef[];
  failure: SessionFailure | null;
}

export interface ReportBundle {
  session: string;
  reports: Array<ValidationReport & { kind: string; index: number }>;
  static?: ValidationReport;
}

export interface SeriesPoint {
  series: string;
  x: number;
  y: number;
}
