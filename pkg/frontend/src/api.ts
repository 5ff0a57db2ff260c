// Typed client for the annotation service. Every screen reads through this
// module; the UI itself never computes labels, scores, or lexicon state.

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** fetch rejected before any response arrived (server down, connection lost). */
export class NetworkError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "NetworkError";
  }
}

export interface IterationReport {
  iteration: number;
  new_phrases: string[];
  matched_post_count: number;
  stop_reason: string | null;
}

export interface RunState {
  run_id: string;
  status: string;
  current_iteration: number;
  version: number;
  pending_candidates: number;
  stop_reason: string | null;
  error: string | null;
  latest_report: IterationReport | null;
}

export interface TaskPayload {
  run_id: string;
  task_id: string;
  kind: string;
  subject: string;
  required_annotators: number;
  decisions_so_far: number;
  labels: string[];
  text?: string;
}

export interface PhraseEntry {
  text: string;
  status: string;
  drs: number | null;
  origin_iteration: number;
  examples?: string[];
}

export interface LexiconPayload {
  run_id: string;
  version: number;
  pending_candidates: number;
  phrases: PhraseEntry[];
}

export interface DecisionRequest {
  run_id?: string;
  task_id: string;
  annotator_id: string;
  label: string;
}

export interface DecisionAck {
  run_id: string;
  task_id: string;
  annotator_id: string;
  label: string;
  progress: [number, number];
  complete: boolean;
  version: number;
}

export interface ReviewRequest {
  run_id?: string;
  phrase: string;
  decision: "keep" | "drop";
}

export interface ReviewAck {
  run_id: string;
  phrase: string;
  status: string;
  pending_candidates: number;
  version: number;
}

export interface TasksSpec {
  kind: string;
  n: number;
  seed?: number;
}

/** What the session layer needs; ServiceClient is the real one, tests fake it. */
export interface ServiceApi {
  createRun(config?: Record<string, unknown>, tasks?: TasksSpec): Promise<RunState>;
  getRun(runId: string): Promise<RunState>;
  advance(runId: string, version: number): Promise<RunState>;
  nextTask(annotator: string, opts?: { kind?: string; runId?: string }): Promise<TaskPayload | null>;
  submitDecision(body: DecisionRequest): Promise<DecisionAck>;
  lexicon(status?: string, runId?: string): Promise<LexiconPayload>;
  review(body: ReviewRequest): Promise<ReviewAck>;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient implements ServiceApi {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    // wrap instead of storing a bare reference: browsers reject unbound fetch
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    headers?: Record<string, string>,
  ): Promise<T | null> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, {
        method,
        headers:
          body === undefined
            ? headers
            : { "content-type": "application/json", ...headers },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (resp.status === 204) return null;
    let data: unknown = null;
    try {
      data = await resp.json();
    } catch {
      // error pages are not always JSON; fall through with the status alone
    }
    if (!resp.ok) {
      const envelope = data as { error?: string; code?: string } | null;
      throw new ApiError(
        resp.status,
        envelope?.code ?? `http_${resp.status}`,
        envelope?.error ?? `HTTP ${resp.status}`,
      );
    }
    return data as T;
  }

  async createRun(
    config: Record<string, unknown> = {},
    tasks?: TasksSpec,
  ): Promise<RunState> {
    const body = tasks === undefined ? { config } : { config, tasks };
    return (await this.request<RunState>("POST", "/runs", body))!;
  }

  async getRun(runId: string): Promise<RunState> {
    return (await this.request<RunState>("GET", `/runs/${encodeURIComponent(runId)}`))!;
  }

  async advance(runId: string, version: number): Promise<RunState> {
    return (await this.request<RunState>(
      "POST",
      `/runs/${encodeURIComponent(runId)}/advance`,
      undefined,
      { "X-Run-Version": String(version) },
    ))!;
  }

  async nextTask(
    annotator: string,
    opts: { kind?: string; runId?: string } = {},
  ): Promise<TaskPayload | null> {
    const query = new URLSearchParams({ annotator });
    if (opts.kind !== undefined) query.set("kind", opts.kind);
    if (opts.runId !== undefined) query.set("run_id", opts.runId);
    return this.request<TaskPayload>("GET", `/tasks/next?${query.toString()}`);
  }

  async submitDecision(body: DecisionRequest): Promise<DecisionAck> {
    return (await this.request<DecisionAck>("POST", "/decisions", body))!;
  }

  async lexicon(status?: string, runId?: string): Promise<LexiconPayload> {
    const query = new URLSearchParams();
    if (status !== undefined) query.set("status", status);
    if (runId !== undefined) query.set("run_id", runId);
    const qs = query.toString();
    return (await this.request<LexiconPayload>("GET", qs ? `/lexicon?${qs}` : "/lexicon"))!;
  }

  async review(body: ReviewRequest): Promise<ReviewAck> {
    return (await this.request<ReviewAck>("POST", "/lexicon/review", body))!;
  }
}
