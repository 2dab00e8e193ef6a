// Wire types for the gateway's JSON endpoints. Field names must match the
// service responses exactly; do not rename without a matching server change.

export interface StageRecord {
  stage: string;
  confidence: number;
  threshold: number;
  passed: boolean;
}

export interface JointLabel {
  tn: string;
  sv: string;
  en: string;
}

export interface Disposition {
  utterance_id: string;
  outcome: string;
  pending: boolean;
  label: JointLabel | null;
  task_id: string | null;
  trace: StageRecord[];
}

export interface Task {
  task_id: string;
  utterance_id: string;
  pool: string;
  payload: string;
  state: string;
  queued_at: number;
  trace: StageRecord[];
}

export interface PoolStats {
  depth: number;
  oldest_age_s: number | null;
}

export type PoolStatsMap = Record<string, PoolStats>;

export interface Catalog {
  tn: string[];
  sv: string[];
  en: string[];
  joint: JointLabel[];
}

export interface LabelSubmission {
  analyst_id: string;
  tn: string;
  sv: string;
  en: string;
  client_token?: string;
}

export function isTask(value: unknown): value is Task {
  if (value === null || typeof value !== "object") return false;
  const t = value as Record<string, unknown>;
  return (
    typeof t.task_id === "string" &&
    typeof t.payload === "string" &&
    Array.isArray(t.trace)
  );
}
