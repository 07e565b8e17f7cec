/**
 * Typed client for the oracle HTTP API.
 *
 *   GET  /api/next-query  -> 200 pending query | 204 idle
 *   POST /api/answer      -> 200 accepted | 409 stale pair
 *   GET  /api/stats       -> 200 counters
 *
 * Every response body is validated before use; a payload that does not match
 * the protocol raises MalformedResponseError rather than leaking `any` into
 * the rest of the app.  Network-level failures raise TransportError so the
 * caller can retry with backoff.
 */

import type { AnswerResult, OracleStats, PendingQuery, RecordCard } from "./types.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** The server could not be reached at all (connection refused, DNS, ...). */
export class TransportError extends Error {
  constructor(cause: unknown) {
    super(`oracle server unreachable: ${cause instanceof Error ? cause.message : String(cause)}`);
    this.name = "TransportError";
  }
}

/** The server answered, but with a body that violates the protocol. */
export class MalformedResponseError extends Error {
  constructor(endpoint: string) {
    super(`unexpected payload from ${endpoint}`);
    this.name = "MalformedResponseError";
  }
}

/** The server answered with an error status the client cannot recover from. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(`${code}: ${message} (HTTP ${status})`);
    this.name = "ApiError";
  }
}

function isFeatureMap(value: unknown): value is Record<string, number> {
  if (typeof value !== "object" || value === null || Array.isArray(value)) return false;
  return Object.values(value).every((v) => typeof v === "number");
}

function isRecordCard(value: unknown): value is RecordCard {
  if (typeof value !== "object" || value === null) return false;
  const r = value as Record<string, unknown>;
  return (
    typeof r.id === "string" &&
    typeof r.text === "string" &&
    (r.features === null || isFeatureMap(r.features))
  );
}

function isPair(value: unknown): value is [string, string] {
  return (
    Array.isArray(value) &&
    value.length === 2 &&
    typeof value[0] === "string" &&
    typeof value[1] === "string"
  );
}

function isPendingQuery(value: unknown): value is PendingQuery {
  if (typeof value !== "object" || value === null) return false;
  const q = value as Record<string, unknown>;
  return isPair(q.pair) && isRecordCard(q.left) && isRecordCard(q.right);
}

function isStats(value: unknown): value is OracleStats {
  if (typeof value !== "object" || value === null) return false;
  const s = value as Record<string, unknown>;
  return typeof s.answered === "number" && typeof s.pending === "number";
}

export class OracleClient {
  private readonly fetchFn: FetchLike;

  constructor(
    private readonly baseUrl: string = "",
    fetchFn?: FetchLike,
  ) {
    // Wrap the global so it keeps its own `this` when called as a method.
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  /** Fetch the pending query, or null when the sampler has nothing to ask. */
  async nextQuery(): Promise<PendingQuery | null> {
    const res = await this.request("/api/next-query");
    if (res.status === 204) return null;
    if (res.status !== 200) throw await this.asApiError(res);
    const body = await this.json(res, "/api/next-query");
    if (!isPendingQuery(body)) throw new MalformedResponseError("/api/next-query");
    return body;
  }

  /**
   * Post one judgment.  The pair ids are echoed so the server can reject an
   * answer aimed at anything other than its currently pending query; that
   * rejection surfaces here as `{kind: "stale"}`, never as a thrown error.
   */
  async submitAnswer(pair: [string, string], same: boolean): Promise<AnswerResult> {
    const res = await this.request("/api/answer", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ pair, same }),
    });
    if (res.status === 409) return { kind: "stale" };
    if (res.status !== 200) throw await this.asApiError(res);
    const body = await this.json(res, "/api/answer");
    const ack = body as Record<string, unknown>;
    if (typeof ack !== "object" || ack === null || typeof ack.answered !== "number") {
      throw new MalformedResponseError("/api/answer");
    }
    return { kind: "accepted", answered: ack.answered };
  }

  async stats(): Promise<OracleStats> {
    const res = await this.request("/api/stats");
    if (res.status !== 200) throw await this.asApiError(res);
    const body = await this.json(res, "/api/stats");
    if (!isStats(body)) throw new MalformedResponseError("/api/stats");
    return body;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    try {
      return await this.fetchFn(this.baseUrl + path, init);
    } catch (err) {
      throw new TransportError(err);
    }
  }

  private async json(res: Response, endpoint: string): Promise<unknown> {
    try {
      return await res.json();
    } catch {
      throw new MalformedResponseError(endpoint);
    }
  }

  private async asApiError(res: Response): Promise<ApiError> {
    let code = "http-error";
    let message = res.statusText || "request failed";
    try {
      const body = (await res.json()) as Record<string, unknown>;
      if (typeof body.code === "string") code = body.code;
      if (typeof body.message === "string") message = body.message;
    } catch {
      // keep the status-line fallback
    }
    return new ApiError(res.status, code, message);
  }
}
