// Annotator session state. Everything shown on screen is re-derived from API
// responses; the only client-side memory is the queue of submissions that
// could not reach the server yet.

import {
  ApiError,
  NetworkError,
  type DecisionRequest,
  type PhraseEntry,
  type ReviewRequest,
  type RunState,
  type ServiceApi,
  type TaskPayload,
} from "./api";

export type Screen = "tasks" | "lexicon";

export type QueuedSubmission =
  | { kind: "decision"; body: DecisionRequest }
  | { kind: "review"; body: ReviewRequest };

export interface SessionState {
  annotatorId: string;
  runId: string | null;
  screen: Screen;
  run: RunState | null;
  task: TaskPayload | null;
  queueEmpty: boolean;
  /** full lexicon listing, newest scores first (API order) */
  lexicon: PhraseEntry[];
  /** pending candidates with example posts (API order) */
  candidates: PhraseEntry[];
  inFlight: boolean;
  offline: boolean;
  unsent: QueuedSubmission[];
  notice: string | null;
}

export function canAdvance(state: SessionState): boolean {
  const run = state.run;
  if (!run || state.inFlight) return false;
  if (run.status === "done" || run.status === "failed") return false;
  return run.pending_candidates === 0;
}

export class AnnotatorSession {
  readonly state: SessionState;

  constructor(
    private readonly api: ServiceApi,
    annotatorId: string,
  ) {
    this.state = {
      annotatorId,
      runId: null,
      screen: "tasks",
      run: null,
      task: null,
      queueEmpty: false,
      lexicon: [],
      candidates: [],
      inFlight: false,
      offline: false,
      unsent: [],
      notice: null,
    };
  }

  /**
   * Attach to the active run. Without an explicit id the service resolves the
   * single existing run for us; zero or several runs surface as a notice.
   */
  async start(runId?: string): Promise<void> {
    if (runId === undefined) {
      try {
        const listing = await this.api.lexicon();
        runId = listing.run_id;
      } catch (err) {
        this.absorb(err);
        return;
      }
    }
    this.state.runId = runId;
    try {
      const run = await this.api.getRun(runId);
      this.state.run = run;
      this.state.screen = run.status === "awaiting_review" ? "lexicon" : "tasks";
    } catch (err) {
      this.absorb(err);
      return;
    }
    await this.refresh();
  }

  /** Create a fresh run when none exists yet. */
  async startRun(config: Record<string, unknown> = {}): Promise<void> {
    if (this.state.inFlight) return;
    this.state.inFlight = true;
    try {
      const run = await this.api.createRun(config);
      this.state.runId = run.run_id;
      this.state.run = run;
      this.state.notice = null;
    } catch (err) {
      this.absorb(err);
    } finally {
      this.state.inFlight = false;
    }
    if (this.state.runId) await this.refresh();
  }

  /** Re-derive the whole screen from the API; transient chrome is dropped. */
  async refresh(): Promise<void> {
    this.state.notice = null;
    if (!this.state.runId) return;
    const runId = this.state.runId;
    try {
      this.state.run = await this.api.getRun(runId);
      this.state.lexicon = (await this.api.lexicon(undefined, runId)).phrases;
      if (this.state.screen === "tasks") {
        const task = await this.api.nextTask(this.state.annotatorId, { runId });
        this.state.task = task;
        this.state.queueEmpty = task === null;
      } else {
        this.state.candidates = (await this.api.lexicon("candidate", runId)).phrases;
      }
      this.state.offline = false;
    } catch (err) {
      this.absorb(err);
    }
  }

  async switchScreen(screen: Screen): Promise<void> {
    this.state.screen = screen;
    await this.refresh();
  }

  /**
   * Submit the label at `index` of the current task's label list and advance
   * to the next task. The advance is optimistic: on a network failure the
   * task comes back and the decision waits in the unsent queue.
   */
  async submitLabel(index: number): Promise<void> {
    const task = this.state.task;
    if (!task || this.state.inFlight) return;
    const label = task.labels[index];
    if (label === undefined) return;
    const body: DecisionRequest = {
      run_id: task.run_id,
      task_id: task.task_id,
      annotator_id: this.state.annotatorId,
      label,
    };
    this.state.inFlight = true;
    this.state.task = null;
    try {
      await this.api.submitDecision(body);
      this.state.notice = null;
    } catch (err) {
      if (err instanceof NetworkError) {
        // roll the screen back and keep the decision until the server answers
        this.state.task = task;
        this.state.unsent.push({ kind: "decision", body });
        this.state.offline = true;
        this.state.inFlight = false;
        return;
      }
      if (err instanceof ApiError && (err.status === 409 || err.status === 404)) {
        this.state.notice = `task ${task.task_id} was decided elsewhere, skipped`;
      } else {
        this.state.task = task;
        this.state.inFlight = false;
        this.absorb(err);
        return;
      }
    }
    this.state.inFlight = false;
    await this.loadNextTask();
  }

  /** Keep or drop a pending lexicon candidate, then re-read the lists. */
  async reviewPhrase(phrase: string, decision: "keep" | "drop"): Promise<void> {
    if (this.state.inFlight || !this.state.runId) return;
    const body: ReviewRequest = { run_id: this.state.runId, phrase, decision };
    this.state.inFlight = true;
    try {
      const ack = await this.api.review(body);
      this.state.candidates = this.state.candidates.filter((p) => p.text !== phrase);
      if (this.state.run) {
        this.state.run.pending_candidates = ack.pending_candidates;
        this.state.run.version = ack.version;
      }
      this.state.notice = null;
    } catch (err) {
      if (err instanceof NetworkError) {
        this.state.unsent.push({ kind: "review", body });
        this.state.offline = true;
        this.state.inFlight = false;
        return;
      }
      if (err instanceof ApiError && err.status === 409) {
        this.state.notice = `phrase "${phrase}" was already reviewed elsewhere`;
      } else {
        this.state.inFlight = false;
        this.absorb(err);
        return;
      }
    }
    this.state.inFlight = false;
    await this.refreshLexicon();
  }

  /** Start the next bootstrap iteration. Only legal at zero pending reviews. */
  async advanceRun(): Promise<void> {
    if (!canAdvance(this.state)) return;
    const runId = this.state.runId;
    const run = this.state.run;
    if (!runId || !run) return;
    this.state.inFlight = true;
    try {
      this.state.run = await this.api.advance(runId, run.version);
      this.state.notice = null;
    } catch (err) {
      if (err instanceof NetworkError) {
        this.state.offline = true;
      } else if (err instanceof ApiError && err.code === "stale_version") {
        this.state.notice = "run changed under you, reloaded";
      } else {
        this.absorb(err);
      }
    } finally {
      this.state.inFlight = false;
    }
    await this.refreshLexicon();
  }

  /** Re-send everything that failed on the network, oldest first. */
  async retryUnsent(): Promise<void> {
    if (this.state.inFlight) return;
    this.state.inFlight = true;
    try {
      while (this.state.unsent.length > 0) {
        const item = this.state.unsent[0];
        try {
          if (item.kind === "decision") await this.api.submitDecision(item.body);
          else await this.api.review(item.body);
        } catch (err) {
          if (err instanceof NetworkError) {
            this.state.offline = true;
            return;
          }
          if (err instanceof ApiError && err.status === 409) {
            this.state.notice = `${item.kind} was resolved elsewhere while offline`;
          } else {
            this.absorb(err);
          }
        }
        this.state.unsent.shift();
      }
      this.state.offline = false;
    } finally {
      this.state.inFlight = false;
    }
    await this.refresh();
  }

  private async loadNextTask(): Promise<void> {
    if (!this.state.runId) return;
    try {
      const task = await this.api.nextTask(this.state.annotatorId, {
        runId: this.state.runId,
      });
      this.state.task = task;
      this.state.queueEmpty = task === null;
      this.state.offline = false;
    } catch (err) {
      this.absorb(err);
    }
  }

  private async refreshLexicon(): Promise<void> {
    if (!this.state.runId) return;
    const runId = this.state.runId;
    try {
      this.state.run = await this.api.getRun(runId);
      this.state.lexicon = (await this.api.lexicon(undefined, runId)).phrases;
      this.state.candidates = (await this.api.lexicon("candidate", runId)).phrases;
      this.state.offline = false;
    } catch (err) {
      this.absorb(err);
    }
  }

  private absorb(err: unknown): void {
    if (err instanceof NetworkError) {
      this.state.offline = true;
    } else if (err instanceof ApiError) {
      this.state.notice = `${err.code}: ${err.message}`;
    } else {
      throw err;
    }
  }
}
