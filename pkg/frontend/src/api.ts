import {
  Catalog,
  Disposition,
  LabelSubmission,
  PoolStatsMap,
  Task,
} from "./types";

export class GatewayError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`gateway returned ${status}: ${detail}`);
    this.name = "GatewayError";
  }
}

/** Shape of the client the console modules depend on; the real
 * implementation below talks HTTP, tests substitute fakes. */
export interface Gateway {
  catalog(): Promise<Catalog>;
  poolStats(): Promise<PoolStatsMap>;
  listTasks(pool: string): Promise<Task[]>;
  claimTask(pool: string, analystId: string): Promise<Task | null>;
  submitLabel(taskId: string, submission: LabelSubmission): Promise<Disposition>;
  disposition(utteranceId: string): Promise<Disposition>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient implements Gateway {
  private baseUrl: string;
  private fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // Bind so the default fetch keeps its expected receiver in browsers.
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { accept: "application/json" } };
    if (body !== undefined) {
      init.headers = { ...init.headers, "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(this.baseUrl + path, init);
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const doc = await res.json();
        if (doc && typeof doc.detail === "string") detail = doc.detail;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new GatewayError(res.status, detail);
    }
    return (await res.json()) as T;
  }

  health(): Promise<{ status: string; mode: string }> {
    return this.request("GET", "/health");
  }

  catalog(): Promise<Catalog> {
    return this.request("GET", "/catalog");
  }

  poolStats(): Promise<PoolStatsMap> {
    return this.request("GET", "/pools/stats");
  }

  listTasks(pool: string): Promise<Task[]> {
    return this.request("GET", `/pools/${encodeURIComponent(pool)}/tasks`);
  }

  claimTask(pool: string, analystId: string): Promise<Task | null> {
    return this.request("POST", `/pools/${encodeURIComponent(pool)}/claim`, {
      analyst_id: analystId,
    });
  }

  submitLabel(taskId: string, submission: LabelSubmission): Promise<Disposition> {
    return this.request("POST", `/tasks/${encodeURIComponent(taskId)}/label`, submission);
  }

  disposition(utteranceId: string): Promise<Disposition> {
    return this.request("GET", `/dispositions/${encodeURIComponent(utteranceId)}`);
  }
}
