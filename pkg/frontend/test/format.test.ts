import { describe, expect, it } from "vitest";

import { formatAge, taskAgeSeconds, traceSummary } from "../src/format";
import { StageRecord, Task } from "../src/types";

function rec(stage: string, confidence: number, threshold: number, passed: boolean): StageRecord {
  return { stage, confidence, threshold, passed };
}

describe("traceSummary", () => {
  it("names the first failed gate with confidence vs threshold", () => {
    const trace = [
      rec("ASR", 0.91, 0.5, true),
      rec("NLU", 1.05, 1.3, false),
    ];
    expect(traceSummary(trace)).toBe("NLU gate failed, cf 1.05 < 1.30");
  });

  it("reports a fully passing trace", () => {
    expect(traceSummary([rec("ASR", 0.9, 0.5, true)])).toBe("all gates passed");
  });

  it("picks the earliest failure when several gates failed", () => {
    const trace = [
      rec("ASR", 0.2, 0.5, false),
      rec("NLU", 1.0, 1.3, false),
    ];
    expect(traceSummary(trace)).toContain("ASR gate failed");
  });
});

describe("age formatting", () => {
  it("renders seconds, minutes, and hours", () => {
    expect(formatAge(42)).toBe("42s");
    expect(formatAge(150)).toBe("2m 30s");
    expect(formatAge(7260)).toBe("2h 1m");
  });

  it("computes a non-negative task age", () => {
    const task = { queued_at: 1000 } as Task;
    expect(taskAgeSeconds(task, 1042)).toBe(42);
    expect(taskAgeSeconds(task, 990)).toBe(0);
  });
});
