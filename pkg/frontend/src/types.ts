/**
 * Wire types for the writecoach HTTP API and the /rt push socket.
 *
 * These mirror the JSON the service emits; nothing here is invented
 * client-side. Client-only view state lives in state.ts.
 */

export type SentenceStatus =
  | "pending"
  | "analyzing"
  | "awaiting_revision"
  | "completed"
  | "unresolved";

export type DeliveredHint = {
  level: number;
  hint: string;
};

export type SentenceView = {
  index: number;
  text: string;
  char_range: [number, number];
  status: SentenceStatus;
  /** Last hint level the learner saw; set only while awaiting_revision. */
  current_level: number | null;
  active_text: string;
  revisions: string[];
  revisions_left: number;
  delivered_hints: DeliveredHint[];
  hint_level_used: number | null;
  /** Present only when unresolved. */
  suggested_correction: string | null;
  explanation: string | null;
};

export type ModelParams = {
  backend_id: string;
  model_name: string;
  temperature: number;
  max_tokens: number;
  timeout_ms: number;
};

export type Progress = {
  total_sentences: number;
  errors_identified: number;
  errors_corrected: number;
  unresolved: number;
  per_level_counts: Record<string, number>;
};

export type SessionView = {
  session_id: string;
  owner: string;
  task_ref: string | null;
  model: ModelParams;
  created_at: number;
  updated_at: number;
  sentences: SentenceView[];
  progress: Progress;
};

export type PushKind =
  | "hint_delivered"
  | "sentence_completed"
  | "sentence_unresolved"
  | "report_ready";

export type PushEvent = {
  user_id: string;
  kind: PushKind;
  session_id: string;
  sentence_index: number | null;
  /** Hint text, suggested correction, or report locator depending on kind. */
  body: string;
  correlation_id: string;
  error: string | null;
};

export type BackendInfo = {
  backend_id: string;
  kind: string;
  base_url: string | null;
  default_model: string;
};

export type Role = "student" | "teacher" | "researcher";

export type DocumentRequest = {
  text: string;
  backend_id: string;
  model_name: string;
  temperature?: number;
  max_tokens?: number;
  timeout_ms?: number;
  task_ref?: string;
};

export type ReportFilterRequest = {
  session_ids?: string[];
  user_ids?: string[];
  backend_ids?: string[];
  time_range?: [number, number];
};
