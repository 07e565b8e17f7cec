"""Pairwise distances and the structural parameters of an instance.

The parameters are population quantities over the ordered pair space and are
computed exactly by enumeration, never estimated: alpha is the fraction of
true positive pairs farther apart than the threshold, beta the fraction of
pairs within the threshold that are true positives, gamma0 the fraction of
ordered pairs that are same-cluster, and mu the weight that folds the two
loss weights and gamma0 into a single convex coefficient.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Clustering, Dataset, canonical_pair
from .errors import (
    DegenerateWeightsError,
    InvalidDistanceError,
    MissingDistanceError,
    MissingTextError,
    NoPairsUnderThresholdError,
    NoPositivePairsError,
    ParameterError,
    SchemaError,
)

DISTANCE_KINDS = ("normalized-edit", "token-jaccard", "precomputed")


def levenshtein(a: str, b: str) -> int:
    """Edit distance with the usual two-row dynamic program."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def normalized_edit(a: str, b: str) -> float:
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein(a, b) / longest


def token_jaccard(a: str, b: str) -> float:
    ta, tb = set(a.split()), set(b.split())
    if not ta and not tb:
        return 0.0
    return 1.0 - len(ta & tb) / len(ta | tb)


class DistanceModel:
    """Symmetric distance in [0, 1] over dataset records."""

    def __init__(self, kind: str, matrix: Optional[dict] = None):
        if kind not in DISTANCE_KINDS:
            raise ParameterError(f"unknown distance kind {kind!r}")
        if kind == "precomputed" and matrix is None:
            raise ParameterError("precomputed distance needs a matrix")
        self.kind = kind
        self.matrix = matrix

    def distance(self, dataset: Dataset, x, y) -> float:
        if x == y:
            dataset.require_id(x)
            return 0.0
        if self.kind == "precomputed":
            dataset.require_id(x)
            dataset.require_id(y)
            key = canonical_pair(x, y)
            if key not in self.matrix:
                raise MissingDistanceError(f"no distance for pair {key}")
            return self.matrix[key]
        ra, rb = dataset.require_id(x), dataset.require_id(y)
        if ra.text is None or rb.text is None:
            raise MissingTextError(
                f"distance kind {self.kind!r} needs text on both records ({x!r}, {y!r})"
            )
        if self.kind == "normalized-edit":
            return normalized_edit(ra.text, rb.text)
        return token_jaccard(ra.text, rb.text)


def load_distance_matrix(path, dataset: Dataset) -> DistanceModel:
    """CSV `id1,id2,distance` with one row per unordered pair, all pairs present."""
    matrix: dict = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["id1", "id2", "distance"]:
            raise SchemaError(f"{path}: expected header 'id1,id2,distance'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise SchemaError(f"{path}:{lineno}: expected 3 columns")
            a, b, raw = row[0].strip(), row[1].strip(), row[2].strip()
            dataset.require_id(a)
            dataset.require_id(b)
            try:
                value = float(raw)
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: bad distance {raw!r}") from None
            if not 0.0 <= value <= 1.0:
                raise InvalidDistanceError(
                    f"{path}:{lineno}: distance {value} outside [0, 1]"
                )
            key = canonical_pair(a, b)
            if key in matrix and matrix[key] != value:
                raise SchemaError(f"{path}:{lineno}: conflicting rows for pair {key}")
            matrix[key] = value
    expected = dataset.n * (dataset.n - 1) // 2
    if len(matrix) != expected:
        raise MissingDistanceError(
            f"{path}: matrix covers {len(matrix)} pairs, dataset needs {expected}"
        )
    return DistanceModel("precomputed", matrix=matrix)


@dataclass(frozen=True)
class InformativenessReport:
    lam: float
    alpha: float
    beta: float
    gamma0: float
    gamma: float
    mu: float

    def as_json(self) -> dict:
        return {
            "lambda": self.lam,
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma0": self.gamma0,
            "gamma": self.gamma,
            "mu": self.mu,
        }


def _pair_counts(dataset: Dataset, truth: Clustering, model: DistanceModel, lam: float):
    """Unordered-pair tallies behind alpha and beta.

    Returns (positives, positives beyond lam, pairs within lam, positive
    pairs within lam).  Ordered-pair ratios coincide by symmetry.
    """
    ids = dataset.ids
    pos = pos_far = near = near_pos = 0
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            x, y = ids[i], ids[j]
            same = truth.same(x, y)
            d = model.distance(dataset, x, y)
            if same:
                pos += 1
                if d > lam:
                    pos_far += 1
            if d <= lam:
                near += 1
                if same:
                    near_pos += 1
    return pos, pos_far, near, near_pos


def compute_alpha_beta(dataset: Dataset, model: DistanceModel, lam: float):
    """Exact (alpha, beta) at threshold lam, by full pair enumeration."""
    if not 0.0 <= lam <= 1.0:
        raise ParameterError(f"lambda must be in [0, 1], got {lam}")
    truth = dataset.truth_clustering()
    pos, pos_far, near, near_pos = _pair_counts(dataset, truth, model, lam)
    if pos == 0:
        raise NoPositivePairsError("no same-cluster pair exists, alpha is undefined")
    if near == 0:
        raise NoPairsUnderThresholdError(
            f"no pair within lambda = {lam}, beta is undefined"
        )
    return pos_far / pos, near_pos / near


def compute_alpha_beta_exact(dataset: Dataset, model: DistanceModel, lam: float):
    """Same as compute_alpha_beta but as exact Fractions, for zero-tolerance tests."""
    truth = dataset.truth_clustering()
    pos, pos_far, near, near_pos = _pair_counts(dataset, truth, model, lam)
    if pos == 0:
        raise NoPositivePairsError("no same-cluster pair exists, alpha is undefined")
    if near == 0:
        raise NoPairsUnderThresholdError(
            f"no pair within lambda = {lam}, beta is undefined"
        )
    return Fraction(pos_far, pos), Fraction(near_pos, near)


def compute_gamma0(dataset: Dataset) -> float:
    """Exact same-cluster fraction of ordered pairs: sum |Ci|(|Ci|-1) / n(n-1)."""
    truth = dataset.truth_clustering()
    n = dataset.n
    if n < 2:
        raise ParameterError("gamma0 needs at least two records")
    positive = sum(len(b) * (len(b) - 1) for b in truth.blocks)
    return positive / (n * (n - 1))


def gamma0_fraction(dataset: Dataset) -> Fraction:
    truth = dataset.truth_clustering()
    n = dataset.n
    positive = sum(len(b) * (len(b) - 1) for b in truth.blocks)
    return Fraction(positive, n * (n - 1))


def mu_from_weights(w1: float, w2: float, gamma0: float) -> float:
    """mu = w1*gamma0 / (w1*gamma0 + w2*(1 - gamma0))."""
    if w1 <= 0 or w2 <= 0:
        raise ParameterError("loss weights must be positive")
    if not 0.0 <= gamma0 <= 1.0:
        raise ParameterError(f"gamma0 must be in [0, 1], got {gamma0}")
    denom = w1 * gamma0 + w2 * (1.0 - gamma0)
    if denom == 0:
        raise DegenerateWeightsError(
            "weights and skew leave the normalizing denominator zero"
        )
    return w1 * gamma0 / denom


def informativeness(
    dataset: Dataset,
    model: DistanceModel,
    lam: float,
    w1: float,
    w2: float,
    gamma: Optional[float] = None,
) -> InformativenessReport:
    """Bundle of all structural parameters at one threshold.

    gamma defaults to the exact gamma0; a looser external bound may be
    supplied but must dominate it.
    """
    alpha, beta = compute_alpha_beta(dataset, model, lam)
    gamma0 = compute_gamma0(dataset)
    if gamma is None:
        gamma = gamma0
    elif gamma < gamma0 or gamma > 1.0:
        raise ParameterError(f"gamma must lie in [gamma0, 1], got {gamma}")
    mu = mu_from_weights(w1, w2, gamma0)
    return InformativenessReport(
        lam=lam, alpha=alpha, beta=beta, gamma0=gamma0, gamma=gamma, mu=mu
    )


def lambda_sweep(dataset: Dataset, model: DistanceModel, points: int = 20) -> list:
    """(lambda, alpha, beta) over an evenly spaced grid, as an aid to choosing lambda.

    Thresholds with no pair in range report beta as None.
    """
    rows = []
    for k in range(points):
        lam = k / (points - 1) if points > 1 else 0.0
        try:
            alpha, beta = compute_alpha_beta(dataset, model, lam)
            rows.append({"lambda": lam, "alpha": alpha, "beta": beta})
        except NoPairsUnderThresholdError:
            truth = dataset.truth_clustering()
            pos, pos_far, _, _ = _pair_counts(dataset, truth, model, lam)
            rows.append({"lambda": lam, "alpha": pos_far / pos, "beta": None})
    return rows
