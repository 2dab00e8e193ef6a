import { StageRecord, Task } from "./types";

/** One-line summary of why a task was escalated, e.g.
 * "NLU gate failed, cf 1.05 < 1.30". */
export function traceSummary(trace: StageRecord[]): string {
  const failed = trace.find((rec) => !rec.passed);
  if (!failed) return "all gates passed";
  return (
    `${failed.stage} gate failed, ` +
    `cf ${failed.confidence.toFixed(2)} < ${failed.threshold.toFixed(2)}`
  );
}

export function formatAge(seconds: number): string {
  if (seconds < 60) return `${Math.floor(seconds)}s`;
  if (seconds < 3600) return `${Math.floor(seconds / 60)}m ${Math.floor(seconds % 60)}s`;
  return `${Math.floor(seconds / 3600)}h ${Math.floor((seconds % 3600) / 60)}m`;
}

export function taskAgeSeconds(task: Task, nowEpochSeconds: number): number {
  return Math.max(0, nowEpochSeconds - task.queued_at);
}
