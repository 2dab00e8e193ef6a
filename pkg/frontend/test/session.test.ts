import { describe, expect, it } from "vitest";

import { Gateway } from "../src/api";
import { AnalystSession } from "../src/session";
import { Catalog, Disposition, LabelSubmission, Task } from "../src/types";

const CATALOG: Catalog = {
  tn: ["billing", "roaming"],
  sv: ["prepaid", "postpaid"],
  en: ["query", "cancel"],
  joint: [],
};

function makeTask(id: string, payload = "hola necesito ayuda"): Task {
  return {
    task_id: id,
    utterance_id: `utt-${id}`,
    pool: "source-language",
    payload,
    state: "CLAIMED",
    queued_at: 0,
    trace: [{ stage: "NLU", confidence: 1.05, threshold: 1.3, passed: false }],
  };
}

function disposition(taskId: string, sub: LabelSubmission): Disposition {
  return {
    utterance_id: `utt-${taskId}`,
    outcome: "SOURCE_ANALYST",
    pending: false,
    label: { tn: sub.tn, sv: sub.sv, en: sub.en },
    task_id: taskId,
    trace: [],
  };
}

/** In-memory gateway standing in for the HTTP client. */
class FakeGateway implements Gateway {
  queue: Task[] = [];
  submissions: { taskId: string; sub: LabelSubmission }[] = [];
  failNextSubmit: Error | null = null;
  resolveSubmit: (() => void) | null = null;

  async catalog(): Promise<Catalog> {
    return CATALOG;
  }

  async poolStats() {
    return {};
  }

  async listTasks(): Promise<Task[]> {
    return this.queue;
  }

  async claimTask(): Promise<Task | null> {
    return this.queue.shift() ?? null;
  }

  async submitLabel(taskId: string, sub: LabelSubmission): Promise<Disposition> {
    if (this.resolveSubmit) {
      await new Promise<void>((resolve) => {
        this.resolveSubmit = resolve;
      });
    }
    if (this.failNextSubmit) {
      const err = this.failNextSubmit;
      this.failNextSubmit = null;
      throw err;
    }
    this.submissions.push({ taskId, sub });
    return disposition(taskId, sub);
  }

  async disposition(): Promise<Disposition> {
    throw new Error("not used");
  }
}

function makeSession(gw: FakeGateway) {
  let n = 0;
  return new AnalystSession(gw, "ana-1", "source-language", () => `token-${n++}`);
}

describe("claiming", () => {
  it("claim on an empty queue returns null and stays idle", async () => {
    const gw = new FakeGateway();
    const session = makeSession(gw);
    expect(await session.claimNext()).toBeNull();
    expect(session.currentTask).toBeNull();
  });

  it("holds at most one claimed task", async () => {
    const gw = new FakeGateway();
    gw.queue = [makeTask("task-000001"), makeTask("task-000002")];
    const session = makeSession(gw);
    await session.claimNext();
    await expect(session.claimNext()).rejects.toThrow("still claimed");
  });

  it("passes the payload through verbatim", async () => {
    const gw = new FakeGateway();
    const payload = "  Dos espacios y ñ raros\t";
    gw.queue = [makeTask("task-000001", payload)];
    const session = makeSession(gw);
    const task = await session.claimNext();
    expect(task?.payload).toBe(payload);
  });
});

describe("submit gating", () => {
  it("blocks until all three fields are chosen", () => {
    const session = makeSession(new FakeGateway());
    expect(session.checkSubmit(CATALOG, "billing", "prepaid", null)).toEqual({
      ok: false,
      missing: ["en"],
    });
    expect(session.checkSubmit(CATALOG, null, null, null).missing).toEqual(["tn", "sv", "en"]);
    expect(session.checkSubmit(CATALOG, "billing", "prepaid", "query").ok).toBe(true);
  });

  it("rejects values outside the catalog", () => {
    const session = makeSession(new FakeGateway());
    const check = session.checkSubmit(CATALOG, "made-up", "prepaid", "query");
    expect(check.ok).toBe(false);
    expect(check.missing).toEqual(["tn"]);
  });
});

describe("submitting", () => {
  it("submits with a per-task client token and frees the claim", async () => {
    const gw = new FakeGateway();
    gw.queue = [makeTask("task-000001")];
    const session = makeSession(gw);
    await session.claimNext();
    const disp = await session.submitLabel("billing", "prepaid", "query");
    expect(disp.label).toEqual({ tn: "billing", sv: "prepaid", en: "query" });
    expect(gw.submissions).toHaveLength(1);
    expect(gw.submissions[0].sub.client_token).toBe("token-0");
    expect(session.currentTask).toBeNull();
  });

  it("double-click while a submit is in flight sends one request", async () => {
    const gw = new FakeGateway();
    gw.queue = [makeTask("task-000001")];
    const session = makeSession(gw);
    await session.claimNext();
    gw.resolveSubmit = () => {};
    const first = session.submitLabel("billing", "prepaid", "query");
    const second = session.submitLabel("billing", "prepaid", "query");
    expect(second).toBe(first);
    gw.resolveSubmit();
    await first;
    expect(gw.submissions).toHaveLength(1);
  });

  it("a failed submit keeps the task and reuses the token on retry", async () => {
    const gw = new FakeGateway();
    gw.queue = [makeTask("task-000001")];
    const session = makeSession(gw);
    await session.claimNext();
    gw.failNextSubmit = new Error("boom");
    await expect(session.submitLabel("billing", "prepaid", "query")).rejects.toThrow("boom");
    expect(session.currentTask?.task_id).toBe("task-000001");
    await session.submitLabel("billing", "prepaid", "query");
    expect(gw.submissions[0].sub.client_token).toBe("token-0");
  });

  it("new claims get fresh tokens", async () => {
    const gw = new FakeGateway();
    gw.queue = [makeTask("task-000001"), makeTask("task-000002")];
    const session = makeSession(gw);
    await session.claimNext();
    await session.submitLabel("billing", "prepaid", "query");
    await session.claimNext();
    await session.submitLabel("roaming", "postpaid", "cancel");
    expect(gw.submissions.map((s) => s.sub.client_token)).toEqual(["token-0", "token-1"]);
  });

  it("submit without a claim rejects", async () => {
    const session = makeSession(new FakeGateway());
    await expect(session.submitLabel("billing", "prepaid", "query")).rejects.toThrow(
      "no claimed task",
    );
  });
});
