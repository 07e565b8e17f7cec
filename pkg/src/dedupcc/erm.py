"""Empirical risk minimization over a clustering class.

The empirical loss of a clustering is mu times the fraction of sampled
positive pairs it separates plus (1 - mu) times the fraction of sampled
negative pairs it co-clusters.  Flat clusterings are scored directly; for a
tree the best pruning is found by a dynamic program over the tree rather
than by touching its exponentially many prunings.

All loss arithmetic is done in exact rational numbers internally so that
ties break identically on every platform; results surface as floats.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .core import Clustering, ClusteringClass, HierarchyTree, pruning_to_clustering
from .errors import (
    DegenerateTruthError,
    EmptySampleError,
    InvalidSampleError,
    ParameterError,
    UnknownIdError,
)
from .sampling import PairSample


def _check_sample(sample: PairSample, label: str):
    if sample.label != label:
        raise InvalidSampleError(f"expected a {label} sample, got {sample.label!r}")
    if sample.size == 0:
        raise EmptySampleError(f"empty {label} sample")


def _pos_error_frac(clustering: Clustering, s_plus: PairSample) -> Fraction:
    separated = sum(1 for x, y in s_plus.pairs if clustering.same(x, y) == 0)
    return Fraction(separated, s_plus.size)


def _neg_error_frac(clustering: Clustering, s_minus: PairSample) -> Fraction:
    together = sum(1 for x, y in s_minus.pairs if clustering.same(x, y) == 1)
    return Fraction(together, s_minus.size)


def empirical_pos_error(clustering: Clustering, s_plus: PairSample) -> float:
    """Fraction of sampled positive pairs the clustering separates."""
    _check_sample(s_plus, "positive")
    return float(_pos_error_frac(clustering, s_plus))


def empirical_neg_error(clustering: Clustering, s_minus: PairSample) -> float:
    """Fraction of sampled negative pairs the clustering co-clusters."""
    _check_sample(s_minus, "negative")
    return float(_neg_error_frac(clustering, s_minus))


@dataclass(frozen=True)
class LossEstimate:
    e_hat: float
    g_hat: float
    l_hat: float
    mu: float

    def as_json(self) -> dict:
        return {"e_hat": self.e_hat, "g_hat": self.g_hat, "l_hat": self.l_hat, "mu": self.mu}


def _mu_fraction(mu: float) -> Fraction:
    if not 0.0 <= mu <= 1.0:
        raise ParameterError(f"mu must be in [0, 1], got {mu}")
    return Fraction(mu)


def loss_estimate(
    clustering: Clustering, s_plus: PairSample, s_minus: PairSample, mu: float
) -> LossEstimate:
    _check_sample(s_plus, "positive")
    _check_sample(s_minus, "negative")
    mu_f = _mu_fraction(mu)
    e = _pos_error_frac(clustering, s_plus)
    g = _neg_error_frac(clustering, s_minus)
    l = mu_f * e + (1 - mu_f) * g
    return LossEstimate(e_hat=float(e), g_hat=float(g), l_hat=float(l), mu=mu)


def normalized_loss_exact(clustering: Clustering, truth: Clustering, mu: float) -> float:
    """Population loss by full pair enumeration; the oracle for all ERM tests."""
    return float(_normalized_loss_frac(clustering, truth, mu))


def _normalized_loss_frac(clustering: Clustering, truth: Clustering, mu: float) -> Fraction:
    mu_f = _mu_fraction(mu)
    ids = sorted(truth.ids)
    n_pos = n_neg = separated = together = 0
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            x, y = ids[i], ids[j]
            if truth.same(x, y):
                n_pos += 1
                separated += clustering.same(x, y) == 0
            else:
                n_neg += 1
                together += clustering.same(x, y) == 1
    if n_pos == 0 or n_neg == 0:
        raise DegenerateTruthError(
            "exact loss needs both positive and negative pairs in the truth"
        )
    return mu_f * Fraction(separated, n_pos) + (1 - mu_f) * Fraction(together, n_neg)


# ---------------------------------------------------------------------------
# Tree pruning


def _lca(tree: HierarchyTree, x, y) -> int:
    if x not in tree.leaf_ids or y not in tree.leaf_ids:
        raise UnknownIdError(f"pair ({x!r}, {y!r}) has endpoints outside the tree")
    node = 0
    while not tree.is_leaf(node):
        left, right = tree.left[node], tree.right[node]
        if x in tree.leaves_under[left] and y in tree.leaves_under[left]:
            node = left
        elif x in tree.leaves_under[right] and y in tree.leaves_under[right]:
            node = right
        else:
            break
    return node


def _best_pruning_weighted(tree: HierarchyTree, pos_weights: dict, neg_weights: dict):
    """Core dynamic program shared by the empirical and exact variants.

    Weights map canonical pairs to the loss they contribute: a positive pair
    pays its weight when separated, a negative pair when co-clustered.  For
    node v let negSub(v) be the total negative weight of pairs entirely
    inside v's subtree and posLCA(v) the positive weight of pairs whose
    lowest common ancestor is exactly v.  Then

        best(leaf) = 0
        best(v) = min(negSub(v),  best(l) + best(r) + posLCA(v))

    where the first branch prices clustering everything under v as one block
    (all inside positives kept, all inside negatives co-clustered) and the
    second prices splitting at v (positives straddling the split are
    separated; deeper pairs are charged recursively).  Ties prefer the
    cluster branch, the coarser pruning, which matches the first minimizer
    in enumeration order.
    """
    zero = Fraction(0)
    pos_lca = [zero] * tree.node_count
    neg_lca = [zero] * tree.node_count
    for (x, y), w in pos_weights.items():
        pos_lca[_lca(tree, x, y)] += w
    for (x, y), w in neg_weights.items():
        neg_lca[_lca(tree, x, y)] += w
    neg_sub = [zero] * tree.node_count
    best = [zero] * tree.node_count
    cluster_here = [True] * tree.node_count
    for node in tree.postorder:
        if tree.is_leaf(node):
            continue
        left, right = tree.left[node], tree.right[node]
        neg_sub[node] = neg_sub[left] + neg_sub[right] + neg_lca[node]
        split = best[left] + best[right] + pos_lca[node]
        if neg_sub[node] <= split:
            best[node] = neg_sub[node]
        else:
            best[node] = split
            cluster_here[node] = False
    frontier = []
    stack = [0]
    while stack:
        node = stack.pop()
        if cluster_here[node]:
            frontier.append(node)
        else:
            stack.append(tree.right[node])
            stack.append(tree.left[node])
    return tuple(sorted(frontier)), best[0]


def best_pruning(
    tree: HierarchyTree, s_plus: PairSample, s_minus: PairSample, mu: float
):
    """Pruning minimizing the empirical loss, and that loss.

    Equals the minimum over exhaustive pruning enumeration; multiplicity in
    the samples is respected.
    """
    frontier, value = _best_pruning_sample_frac(tree, s_plus, s_minus, mu)
    return pruning_to_clustering(tree, frontier), float(value)


def _best_pruning_sample_frac(
    tree: HierarchyTree, s_plus: PairSample, s_minus: PairSample, mu: float
):
    _check_sample(s_plus, "positive")
    _check_sample(s_minus, "negative")
    mu_f = _mu_fraction(mu)
    pos_w = {
        pair: mu_f * Fraction(count, s_plus.size)
        for pair, count in Counter(s_plus.pairs).items()
    }
    neg_w = {
        pair: (1 - mu_f) * Fraction(count, s_minus.size)
        for pair, count in Counter(s_minus.pairs).items()
    }
    return _best_pruning_weighted(tree, pos_w, neg_w)


def best_pruning_exact(tree: HierarchyTree, truth: Clustering, mu: float):
    """Pruning minimizing the exact population loss, and that loss."""
    mu_f = _mu_fraction(mu)
    ids = sorted(truth.ids)
    pos_pairs, neg_pairs = [], []
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            pair = (ids[i], ids[j])
            (pos_pairs if truth.same(*pair) else neg_pairs).append(pair)
    if not pos_pairs or not neg_pairs:
        raise DegenerateTruthError(
            "exact pruning needs both positive and negative pairs in the truth"
        )
    pos_w = {pair: mu_f * Fraction(1, len(pos_pairs)) for pair in pos_pairs}
    neg_w = {pair: (1 - mu_f) * Fraction(1, len(neg_pairs)) for pair in neg_pairs}
    frontier, value = _best_pruning_weighted(tree, pos_w, neg_w)
    return pruning_to_clustering(tree, frontier), float(value)


# ---------------------------------------------------------------------------
# ERM over a class


@dataclass(frozen=True)
class ErmResult:
    chosen: Clustering
    kind: str  # "flat" or "tree"
    index: int
    frontier: Optional[tuple]
    estimated: LossEstimate
    true_loss: Optional[float]
    queries_spent: int
    m_plus: int
    m_minus: int

    def as_json(self) -> dict:
        return {
            "kind": self.kind,
            "index": self.index,
            "frontier": list(self.frontier) if self.frontier is not None else None,
            "clusters": [list(b) for b in self.chosen.blocks],
            "estimated": self.estimated.as_json(),
            "exact_loss": self.true_loss,
            "queries_spent": self.queries_spent,
            "m_plus": self.m_plus,
            "m_minus": self.m_minus,
        }


def erm(
    cls: ClusteringClass,
    s_plus: PairSample,
    s_minus: PairSample,
    mu: float,
    truth: Optional[Clustering] = None,
) -> ErmResult:
    """Minimize empirical loss over every flat and every tree's best pruning.

    Ties break to flats before trees, then to the lower index, then to the
    pruning the dynamic program prefers (coarsest first).
    """
    _check_sample(s_plus, "positive")
    _check_sample(s_minus, "negative")
    mu_f = _mu_fraction(mu)
    best = None  # (value, kind_rank, index, clustering, frontier)
    for i, flat in enumerate(cls.flats):
        e = _pos_error_frac(flat, s_plus)
        g = _neg_error_frac(flat, s_minus)
        value = mu_f * e + (1 - mu_f) * g
        if best is None or value < best[0]:
            best = (value, 0, i, flat, None)
    for j, tree in enumerate(cls.trees):
        frontier, value = _best_pruning_sample_frac(tree, s_plus, s_minus, mu)
        if best is None or value < best[0]:
            best = (value, 1, j, pruning_to_clustering(tree, frontier), frontier)
    value, kind_rank, index, chosen, frontier = best
    estimate = loss_estimate(chosen, s_plus, s_minus, mu)
    true_loss = None
    if truth is not None:
        true_loss = normalized_loss_exact(chosen, truth, mu)
    return ErmResult(
        chosen=chosen,
        kind="flat" if kind_rank == 0 else "tree",
        index=index,
        frontier=frontier,
        estimated=estimate,
        true_loss=true_loss,
        queries_spent=s_plus.queries_spent + s_minus.queries_spent,
        m_plus=s_plus.size,
        m_minus=s_minus.size,
    )


def exact_class_minimum(cls: ClusteringClass, truth: Clustering, mu: float) -> float:
    """Minimum population loss over the class, via the exact pruning program."""
    values = [_normalized_loss_frac(flat, truth, mu) for flat in cls.flats]
    for tree in cls.trees:
        _, value = best_pruning_exact(tree, truth, mu)
        values.append(Fraction(value))
    return float(min(values))


# ---------------------------------------------------------------------------
# Sample-size and query-budget calculators


def required_sample_size(vcdim: int, epsilon: float, delta: float, a: float = 1.0) -> int:
    """ceil(a * (vcdim + ln(2/delta)) / epsilon^2), the per-sign sample size."""
    if vcdim < 1:
        raise ParameterError(f"vcdim must be at least 1, got {vcdim}")
    if not 0.0 < epsilon < 1.0:
        raise ParameterError(f"epsilon must be in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if a <= 0:
        raise ParameterError(f"a must be positive, got {a}")
    return math.ceil(a * (vcdim + math.log(2.0 / delta)) / (epsilon * epsilon))


def query_budget_bound(
    m_plus: int, m_minus: int, beta: float, gamma: float, nu: float
):
    """High-probability query budget (1+nu)(m-/(1-gamma) + m+/beta).

    Returns (bound, failure_probability); the failure probability is
    exp(-nu^2 m-/4) + exp(-nu^2 m+/4).
    """
    if not 0.0 < beta <= 1.0:
        raise ParameterError(f"beta must be in (0, 1], got {beta}")
    if not 0.0 <= gamma < 1.0:
        raise ParameterError(f"gamma must be in [0, 1), got {gamma}")
    if nu <= 0:
        raise ParameterError(f"nu must be positive, got {nu}")
    if m_plus < 1 or m_minus < 1:
        raise ParameterError("sample sizes must be at least 1")
    bound = (1.0 + nu) * (m_minus / (1.0 - gamma) + m_plus / beta)
    failure = math.exp(-nu * nu * m_minus / 4.0) + math.exp(-nu * nu * m_plus / 4.0)
    return bound, failure
