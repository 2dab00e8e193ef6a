import { Gateway } from "./api";
import { Catalog, Disposition, Task } from "./types";

function defaultToken(): string {
  const bytes = new Uint8Array(16);
  if (typeof crypto !== "undefined" && crypto.getRandomValues) {
    crypto.getRandomValues(bytes);
  } else {
    for (let i = 0; i < bytes.length; i++) bytes[i] = Math.floor(Math.random() * 256);
  }
  return Array.from(bytes, (b) => b.toString(16).padStart(2, "0")).join("");
}

export interface SubmitCheck {
  ok: boolean;
  missing: string[];
}

/** Holds at most one claimed task and drives the claim/submit cycle.
 *
 * A fresh client token is minted when a task is claimed and reused for every
 * submit attempt on that task, so a double-click or a retry after a network
 * error records exactly one label on the gateway. */
export class AnalystSession {
  private task: Task | null = null;
  private clientToken: string | null = null;
  private inFlight: Promise<Disposition> | null = null;

  constructor(
    private gateway: Gateway,
    readonly analystId: string,
    readonly pool: string,
    private tokenGen: () => string = defaultToken,
  ) {}

  get currentTask(): Task | null {
    return this.task;
  }

  async claimNext(): Promise<Task | null> {
    if (this.task !== null) {
      throw new Error(`task ${this.task.task_id} is still claimed; submit it first`);
    }
    const task = await this.gateway.claimTask(this.pool, this.analystId);
    if (task !== null) {
      this.task = task;
      this.clientToken = this.tokenGen();
    }
    return task;
  }

  /** Client-side gate for the submit button: all three fields must be chosen
   * and every chosen value must come from the catalog. */
  checkSubmit(catalog: Catalog, tn: string | null, sv: string | null, en: string | null): SubmitCheck {
    const missing: string[] = [];
    if (!tn || !catalog.tn.includes(tn)) missing.push("tn");
    if (!sv || !catalog.sv.includes(sv)) missing.push("sv");
    if (!en || !catalog.en.includes(en)) missing.push("en");
    return { ok: missing.length === 0, missing };
  }

  submitLabel(tn: string, sv: string, en: string): Promise<Disposition> {
    if (this.task === null || this.clientToken === null) {
      return Promise.reject(new Error("no claimed task"));
    }
    if (this.inFlight !== null) {
      // Double-click: the first request is still running, piggyback on it.
      return this.inFlight;
    }
    const taskId = this.task.task_id;
    const attempt = this.gateway
      .submitLabel(taskId, {
        analyst_id: this.analystId,
        tn,
        sv,
        en,
        client_token: this.clientToken,
      })
      .then((disp) => {
        this.task = null;
        this.clientToken = null;
        this.inFlight = null;
        return disp;
      })
      .catch((err) => {
        // Keep the task and token so the analyst can fix the label and
        // retry; the reused token keeps the retry idempotent.
        this.inFlight = null;
        throw err;
      });
    this.inFlight = attempt;
    return attempt;
  }
}
