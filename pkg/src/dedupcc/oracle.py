"""Same-cluster oracle: backends plus the counting and caching session wrapper.

A backend answers one question: are x and y in the same ground-truth cluster.
The session wrapper canonicalizes pairs, caches answers, and counts queries.
By default repeated queries on a pair are cache hits and are not counted;
``count_cached=True`` switches to strict accounting where every query call
counts, which the sampling-statistics checks rely on (their geometric query
counts assume every draw costs one oracle call).
"""

from __future__ import annotations

import json
import threading
import time
from datetime import datetime, timezone
from fractions import Fraction
from typing import Optional

from .core import Clustering, Dataset, canonical_pair
from .errors import OracleClosedError, OracleTimeoutError, SchemaError


class SimulatedOracle:
    """Answers from ground-truth cluster labels."""

    mode = "simulated"

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.truth = dataset.truth_clustering()

    def answer(self, x, y) -> int:
        return self.truth.same(x, y)

    def positive_fraction(self) -> Fraction:
        n = self.dataset.n
        positive = sum(len(b) * (len(b) - 1) for b in self.truth.blocks)
        return Fraction(positive, n * (n - 1))


class ClusteringOracle:
    """Answers from an explicit partition; used for graph instances."""

    mode = "simulated"

    def __init__(self, truth: Clustering):
        self.truth = truth

    def answer(self, x, y) -> int:
        return self.truth.same(x, y)

    def positive_fraction(self) -> Fraction:
        n = len(self.truth.ids)
        positive = sum(len(b) * (len(b) - 1) for b in self.truth.blocks)
        return Fraction(positive, n * (n - 1))


class DistanceThresholdOracle:
    """Degenerate unsupervised mode: the metric itself plays the oracle.

    Declares a pair positive iff its distance is within the threshold, which
    turns the pipeline into fitting the class to the distance graph.
    """

    mode = "simulated"

    def __init__(self, dataset: Dataset, model, lam: float):
        self.dataset = dataset
        self.model = model
        self.lam = lam

    def answer(self, x, y) -> int:
        return 1 if self.model.distance(self.dataset, x, y) <= self.lam else 0

    def positive_fraction(self) -> Optional[Fraction]:
        ids = self.dataset.ids
        positive = 0
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                positive += self.answer(ids[i], ids[j])
        n = len(ids)
        return Fraction(2 * positive, n * (n - 1))


class InteractiveOracle:
    """Human-backed oracle behind the HTTP interface.

    State machine per pair: idle -> pending -> answered -> idle.  The sampler
    thread blocks in answer() until a human submits through the server (or
    the timeout passes).  Accepted answers go to an append-only JSON-lines
    log; with ``resume=True`` the log is preloaded so an interrupted session
    never re-asks a pair it already has.
    """

    mode = "interactive"

    def __init__(
        self,
        dataset: Dataset,
        timeout: Optional[float] = None,
        log_path=None,
        resume: bool = False,
    ):
        self.dataset = dataset
        self.timeout = timeout
        self.log_path = log_path
        self._cond = threading.Condition()
        self._pending: Optional[tuple] = None
        self._answer: Optional[bool] = None
        self._closed = False
        self.answered = 0
        self._known: dict = {}
        if resume and log_path is not None:
            self._preload(log_path)

    def _preload(self, path):
        try:
            fh = open(path, "r", encoding="utf-8")
        except FileNotFoundError:
            return
        with fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entry = json.loads(line)
                    pair = canonical_pair(entry["pair"][0], entry["pair"][1])
                    same = bool(entry["same"])
                except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
                    raise SchemaError(f"{path}:{lineno}: bad answer-log entry") from exc
                self._known[pair] = 1 if same else 0

    def _log(self, pair: tuple, same: bool):
        if self.log_path is None:
            return
        entry = {
            "pair": [pair[0], pair[1]],
            "same": same,
            "ts": datetime.now(timezone.utc).isoformat(),
        }
        with open(self.log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry) + "\n")

    def answer(self, x, y) -> int:
        self.dataset.require_id(x)
        self.dataset.require_id(y)
        pair = canonical_pair(x, y)
        with self._cond:
            if pair in self._known:
                return self._known[pair]
            if self._closed:
                raise OracleClosedError("interactive oracle is closed")
            self._pending = pair
            self._answer = None
            self._cond.notify_all()
            deadline = None
            if self.timeout is not None and self.timeout > 0:
                deadline = time.monotonic() + self.timeout
            while self._answer is None and not self._closed:
                remaining = None
                if deadline is not None:
                    remaining = deadline - time.monotonic()
                    if remaining <= 0:
                        self._pending = None
                        raise OracleTimeoutError(
                            f"no answer for pair {pair} within {self.timeout}s"
                        )
                self._cond.wait(timeout=remaining)
            if self._answer is None:
                self._pending = None
                raise OracleClosedError("interactive oracle closed while waiting")
            same = self._answer
            self._pending = None
            self._answer = None
            self._known[pair] = 1 if same else 0
            self._cond.notify_all()
            return 1 if same else 0

    def positive_fraction(self) -> Optional[Fraction]:
        return None

    # Server-facing side of the state machine.

    def current_query(self) -> Optional[tuple]:
        with self._cond:
            return self._pending

    def submit(self, pair, same: bool) -> bool:
        """Record a human answer; False when the pair is stale or none pending.

        Accounting happens here, not in the waiting thread, so the answered
        count is already correct when the accepting response goes out.
        """
        with self._cond:
            if self._pending is None or tuple(pair) != self._pending:
                return False
            if self._answer is not None:
                return False
            self._answer = bool(same)
            self.answered += 1
            self._log(self._pending, bool(same))
            self._cond.notify_all()
            return True

    def stats(self) -> dict:
        with self._cond:
            return {"answered": self.answered, "pending": 1 if self._pending else 0}

    def close(self):
        with self._cond:
            self._closed = True
            self._cond.notify_all()


class OracleSession:
    """Counting, caching front door; all queries go through here.

    query_count counts calls that reached the backend.  A cache hit does not
    count unless strict accounting was requested at construction.
    """

    def __init__(self, backend, cache: bool = True, count_cached: bool = False):
        self.backend = backend
        self.mode = backend.mode
        self._cache: Optional[dict] = {} if cache else None
        self.count_cached = count_cached
        self.query_count = 0

    def query(self, x, y) -> int:
        pair = canonical_pair(x, y)
        if self._cache is not None and pair in self._cache:
            if self.count_cached:
                self.query_count += 1
            return self._cache[pair]
        bit = self.backend.answer(x, y)
        self.query_count += 1
        if self._cache is not None:
            self._cache[pair] = bit
        return bit

    def positive_fraction(self) -> Optional[Fraction]:
        return self.backend.positive_fraction()
