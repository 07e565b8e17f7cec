/**
 * Labeling session state machine, kept free of DOM access so it can be
 * driven headlessly in tests.  It owns the poll loop, the single pending
 * query, and the answered counter; rendering goes through an injected view.
 *
 * Invariants:
 *   - at most one query is pending at a time, mirroring the server;
 *   - an answer is only ever posted for the pair currently displayed, and a
 *     stale rejection (the server moved on) discards that pair and re-polls
 *     instead of surfacing an error;
 *   - poll failures never stop the loop: they show a banner and back off.
 */

import { ApiError, MalformedResponseError, TransportError } from "./api.js";
import type { AnswerResult, OracleStats, PendingQuery, QueryView } from "./types.js";
import { samePair } from "./types.js";

/** The slice of the HTTP client the session depends on (stubbed in tests). */
export interface OracleApi {
  nextQuery(): Promise<PendingQuery | null>;
  submitAnswer(pair: [string, string], same: boolean): Promise<AnswerResult>;
  stats(): Promise<OracleStats>;
}

export interface SessionView {
  render(view: QueryView): void;
  showBanner(text: string | null): void;
}

export type SessionOptions = {
  /** Delay between polls once the server is healthy. */
  pollIntervalMs?: number;
  /** Ceiling for the exponential backoff applied while the server is down. */
  maxBackoffMs?: number;
  /** Clock, injectable for tests. */
  now?: () => number;
};

const DEFAULT_POLL_INTERVAL_MS = 500;
const DEFAULT_MAX_BACKOFF_MS = 8000;

export class LabelSession {
  private readonly pollIntervalMs: number;
  private readonly maxBackoffMs: number;
  private readonly now: () => number;

  private current: PendingQuery | null = null;
  private answered = 0;
  private startedAt: number;
  private delayMs: number;
  private postsInFlight = 0;
  private stopped = false;
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    private readonly client: OracleApi,
    private readonly view: SessionView,
    options: SessionOptions = {},
  ) {
    this.pollIntervalMs = options.pollIntervalMs ?? DEFAULT_POLL_INTERVAL_MS;
    this.maxBackoffMs = options.maxBackoffMs ?? DEFAULT_MAX_BACKOFF_MS;
    this.now = options.now ?? Date.now;
    this.startedAt = this.now();
    this.delayMs = this.pollIntervalMs;
  }

  /** Current poll delay; grows while the server is unreachable. */
  get pollDelayMs(): number {
    return this.delayMs;
  }

  /** Answered count as last confirmed by the server. */
  get answeredCount(): number {
    return this.answered;
  }

  /** Begin polling.  Seeds the answered counter from the server first. */
  async start(): Promise<void> {
    this.stopped = false;
    this.startedAt = this.now();
    try {
      this.answered = (await this.client.stats()).answered;
    } catch {
      // The first poll will surface the failure in the banner.
    }
    await this.tick();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  /**
   * One poll step.  Skips the network while an answer is in flight (the
   * response will re-poll anyway) but still repaints so the clock advances.
   */
  async pollOnce(): Promise<void> {
    if (this.postsInFlight > 0) {
      this.render();
      return;
    }
    try {
      const next = await this.client.nextQuery();
      this.delayMs = this.pollIntervalMs;
      this.view.showBanner(null);
      if (next === null) {
        this.current = null;
      } else if (this.current === null || !samePair(this.current.pair, next.pair)) {
        this.current = next;
      }
    } catch (err) {
      this.delayMs = Math.min(this.delayMs * 2, this.maxBackoffMs);
      this.view.showBanner(describePollFailure(err, this.delayMs));
    }
    this.render();
  }

  /**
   * Post a judgment for the currently displayed pair.  Deliberately not
   * guarded against overlapping calls: a double-click sends two posts with
   * the same echoed pair, the server accepts the first and rejects the
   * second as stale, and the count moves by exactly one.
   */
  async answer(same: boolean): Promise<void> {
    const query = this.current;
    if (query === null || this.stopped) return;
    this.postsInFlight += 1;
    try {
      const result = await this.client.submitAnswer(query.pair, same);
      if (result.kind === "accepted") {
        this.answered = result.answered;
        this.view.showBanner(null);
      } else {
        this.view.showBanner("The server moved on to a different pair; fetching the current one.");
      }
      // Either way this pair is settled; drop it unless a concurrent poll
      // already swapped in a newer one.
      if (this.current !== null && samePair(this.current.pair, query.pair)) {
        this.current = null;
      }
    } catch (err) {
      // Keep the pair on screen so the judgment can be retried.
      this.view.showBanner(describeSubmitFailure(err));
      this.render();
      return;
    } finally {
      this.postsInFlight -= 1;
    }
    await this.pollOnce();
  }

  private async tick(): Promise<void> {
    if (this.stopped) return;
    await this.pollOnce();
    if (this.stopped) return;
    this.timer = setTimeout(() => {
      void this.tick();
    }, this.delayMs);
  }

  private render(): void {
    const q = this.current;
    this.view.render({
      pair: q === null ? null : q.pair,
      left: q === null ? null : q.left,
      right: q === null ? null : q.right,
      elapsedSeconds: Math.max(0, Math.floor((this.now() - this.startedAt) / 1000)),
      answered: this.answered,
      pending: q !== null,
    });
  }
}

function describePollFailure(err: unknown, retryMs: number): string {
  const retry = `retrying in ${(retryMs / 1000).toFixed(1)} s`;
  if (err instanceof TransportError) return `Cannot reach the labeling server; ${retry}.`;
  if (err instanceof MalformedResponseError) return `The server sent an unexpected response; ${retry}.`;
  if (err instanceof ApiError) return `${err.message}; ${retry}.`;
  return `Unexpected failure (${String(err)}); ${retry}.`;
}

function describeSubmitFailure(err: unknown): string {
  if (err instanceof TransportError) return "Answer not delivered (server unreachable); it is safe to try again.";
  if (err instanceof ApiError) return `The server rejected the answer: ${err.message}.`;
  return `Answer failed: ${String(err)}.`;
}
