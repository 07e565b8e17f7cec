/** Shapes shared between the HTTP client, the session logic, and the view. */

/** One record as the server exposes it (never includes the truth label). */
export type RecordCard = {
  id: string;
  text: string;
  features: Record<string, number> | null;
};

/** A pending same-cluster query: the pair plus both rendered records. */
export type PendingQuery = {
  pair: [string, string];
  left: RecordCard;
  right: RecordCard;
};

/** Result of posting an answer. */
export type AnswerResult =
  | { kind: "accepted"; answered: number }
  | { kind: "stale" };

/** Server-side session counters. */
export type OracleStats = {
  answered: number;
  pending: number;
};

/**
 * Everything the view needs for one paint.  At most one query is pending at
 * a time; when `pending` is false the pair and records are null and the view
 * shows the idle placeholder instead.
 */
export type QueryView = {
  pair: [string, string] | null;
  left: RecordCard | null;
  right: RecordCard | null;
  elapsedSeconds: number;
  answered: number;
  pending: boolean;
};

export function samePair(a: [string, string], b: [string, string]): boolean {
  return a[0] === b[0] && a[1] === b[1];
}
