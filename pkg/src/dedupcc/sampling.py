"""Rejection samplers for negative and positive pairs, with exact references.

The negative sampler draws uniformly from the ordered pair space and keeps
oracle-negative draws; its output distribution is exactly uniform over
negative pairs.  The positive sampler first restricts to pairs within the
distance threshold (the index), draws x proportionally to its neighbor count
via an alias table, then y uniformly among x's neighbors, and keeps
oracle-positive draws; its output is exactly uniform over the positive pairs
within threshold.  Both loops carry an attempt cap so hopeless inputs fail
cleanly instead of spinning.

Pairs are reported canonically unordered; the exact reference distributions
below are folded the same way (each unordered pair carries the mass of its
two ordered forms), so empirical and reference tables are directly
comparable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Dataset, canonical_pair
from .errors import (
    BudgetExhaustedError,
    EmptyIndexError,
    EmptySupportError,
    InvalidSampleError,
    NoNegativePairsError,
    ParameterError,
)
from .metrics import DistanceModel
from .oracle import OracleSession

DEFAULT_MAX_ATTEMPTS = 10**6


class AliasTable:
    """Vose alias method: O(n) build, O(1) draws from a fixed discrete law."""

    def __init__(self, weights):
        total = sum(weights)
        if total <= 0:
            raise EmptySupportError("alias table needs positive total weight")
        n = len(weights)
        self.n = n
        self.prob = [0.0] * n
        self.alias = [0] * n
        scaled = [w * n / total for w in weights]
        small = [i for i, w in enumerate(scaled) if w < 1.0]
        large = [i for i, w in enumerate(scaled) if w >= 1.0]
        while small and large:
            s, l = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = l
            scaled[l] = (scaled[l] + scaled[s]) - 1.0
            (small if scaled[l] < 1.0 else large).append(l)
        for i in large + small:
            self.prob[i] = 1.0

    def sample(self, rng: random.Random) -> int:
        i = rng.randrange(self.n)
        return i if rng.random() < self.prob[i] else self.alias[i]


class NeighborIndex:
    """Per-record neighbor sets S_x = {y != x : d(x, y) <= lambda}."""

    def __init__(self, dataset: Dataset, neighbors: dict, lam: float):
        self.dataset = dataset
        self.lam = lam
        self.neighbors = {x: tuple(sorted(ys)) for x, ys in neighbors.items()}
        self.total_size = sum(len(ys) for ys in self.neighbors.values())
        self._alias: Optional[AliasTable] = None

    def pairs(self):
        """All unordered pairs within threshold (the set K, folded)."""
        seen = set()
        for x, ys in self.neighbors.items():
            for y in ys:
                seen.add(canonical_pair(x, y))
        return sorted(seen)

    def alias_table(self) -> AliasTable:
        if self._alias is None:
            weights = [len(self.neighbors[x]) for x in self.dataset.ids]
            self._alias = AliasTable(weights)
        return self._alias


def build_neighbor_index(dataset: Dataset, model: DistanceModel, lam: float) -> NeighborIndex:
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must be in [0, 1], got {lam}")
    neighbors = {x: [] for x in dataset.ids}
    ids = dataset.ids
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            if model.distance(dataset, ids[i], ids[j]) <= lam:
                neighbors[ids[i]].append(ids[j])
                neighbors[ids[j]].append(ids[i])
    return NeighborIndex(dataset, neighbors, lam)


@dataclass(frozen=True)
class PairSample:
    pairs: tuple
    label: str  # "positive" or "negative"
    queries_spent: int

    @property
    def size(self) -> int:
        return len(self.pairs)


def sample_negative(
    dataset: Dataset,
    session: OracleSession,
    rng: random.Random,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> tuple:
    """One oracle-negative pair, distributed exactly uniformly over them."""
    if dataset.n < 2:
        raise ParameterError("need at least two records to sample pairs")
    gamma0 = session.positive_fraction()
    if gamma0 is not None and gamma0 == 1:
        raise NoNegativePairsError(
            "every pair is same-cluster, the negative sampler cannot terminate"
        )
    ids = dataset.ids
    n = len(ids)
    for _ in range(max_attempts):
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        if session.query(ids[i], ids[j]) == 0:
            return canonical_pair(ids[i], ids[j])
    raise BudgetExhaustedError(
        f"no negative pair accepted within {max_attempts} attempts"
    )


def sample_positive(
    dataset: Dataset,
    index: NeighborIndex,
    session: OracleSession,
    rng: random.Random,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> tuple:
    """One oracle-positive pair within threshold, uniform over all of them."""
    if index.total_size == 0:
        raise EmptyIndexError("no pair within the distance threshold")
    ids = dataset.ids
    alias = index.alias_table()
    for _ in range(max_attempts):
        x = ids[alias.sample(rng)]
        y = rng.choice(index.neighbors[x])
        if session.query(x, y) == 1:
            return canonical_pair(x, y)
    raise BudgetExhaustedError(
        f"no positive pair accepted within {max_attempts} attempts"
    )


def collect_sample(
    kind: str,
    m: int,
    dataset: Dataset,
    session: OracleSession,
    rng: random.Random,
    index: Optional[NeighborIndex] = None,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> PairSample:
    """m independent draws with replacement; queries_spent is the count delta."""
    if kind not in ("positive", "negative"):
        raise InvalidSampleError(f"sample kind must be positive or negative, got {kind!r}")
    if m < 1:
        raise InvalidSampleError(f"sample size must be at least 1, got {m}")
    if kind == "positive" and index is None:
        raise InvalidSampleError("positive sampling needs a neighbor index")
    start = session.query_count
    pairs = []
    for _ in range(m):
        if kind == "negative":
            pairs.append(sample_negative(dataset, session, rng, max_attempts))
        else:
            pairs.append(sample_positive(dataset, index, session, rng, max_attempts))
    return PairSample(
        pairs=tuple(pairs), label=kind, queries_spent=session.query_count - start
    )


def exact_reference_distribution(
    kind: str,
    dataset: Dataset,
    index: Optional[NeighborIndex] = None,
) -> dict:
    """Exact law over canonical pairs, by enumeration; values are Fractions.

    Kinds: "P-minus" is uniform over ordered negative pairs, "P-plus" uniform
    over ordered positive pairs, "K-plus-uniform" uniform over ordered
    within-threshold positive pairs (needs the index).  All are folded to
    unordered support, which doubles nothing since each unordered pair covers
    both ordered forms.
    """
    truth = dataset.truth_clustering()
    ids = dataset.ids
    if kind in ("P-minus", "P-plus"):
        want = 0 if kind == "P-minus" else 1
        support = [
            canonical_pair(ids[i], ids[j])
            for i in range(len(ids))
            for j in range(i + 1, len(ids))
            if truth.same(ids[i], ids[j]) == want
        ]
    elif kind == "K-plus-uniform":
        if index is None:
            raise InvalidSampleError("K-plus-uniform needs a neighbor index")
        support = [pair for pair in index.pairs() if truth.same(*pair) == 1]
    else:
        raise InvalidSampleError(f"unknown reference kind {kind!r}")
    if not support:
        raise EmptySupportError(f"reference distribution {kind!r} has empty support")
    share = Fraction(1, len(support))
    return {pair: share for pair in support}


def empirical_distribution(pairs) -> dict:
    """Relative frequencies of canonical pairs, as Fractions."""
    counts: dict = {}
    for pair in pairs:
        counts[pair] = counts.get(pair, 0) + 1
    total = len(pairs)
    if total == 0:
        raise EmptySupportError("empirical distribution over no draws")
    return {pair: Fraction(c, total) for pair, c in sorted(counts.items())}


def tv_distance(dist_a: dict, dist_b: dict) -> float:
    """Total variation distance: half the L1 gap over the union support."""
    keys = set(dist_a) | set(dist_b)
    gap = sum(abs(Fraction(dist_a.get(k, 0)) - Fraction(dist_b.get(k, 0))) for k in keys)
    return float(gap / 2)
