"""Shared test instances.

Three synthetic datasets carry most of the suite: a 10-record two-cluster
instance for the negative-sampler checks, a 12-record three-cluster instance
with a hand-built distance matrix for the threshold-sampler checks, and a
60-record ten-cluster instance with a seeded matrix for the end-to-end risk
checks.  The hand-built matrix pins alpha and beta to known fractions:
within-cluster pairs sit at 0.1 except three planted far pairs at 0.9, and
cross-cluster pairs sit at 0.8 except five planted near pairs at 0.2, so at
threshold 0.5 alpha is 3/18 and beta is 15/20.
"""

from __future__ import annotations

import random

import pytest

from dedupcc.core import Clustering, Dataset, HierarchyTree, Record, canonical_pair
from dedupcc.metrics import DistanceModel
from dedupcc.sampling import PairSample

LAM12 = 0.5


def make_dataset(cluster_of: dict, text_of: dict | None = None) -> Dataset:
    records = []
    for rid in sorted(cluster_of):
        text = text_of.get(rid) if text_of else None
        records.append(Record(id=rid, text=text, cluster=cluster_of[rid]))
    return Dataset(records)


@pytest.fixture(scope="session")
def ds10() -> Dataset:
    labels = {}
    for i, rid in enumerate("abcdefghij"):
        labels[rid] = "x" if i < 5 else "y"
    return make_dataset(labels)


def build_ds12():
    ids = [f"r{i:02d}" for i in range(1, 13)]
    labels = {rid: "abc"[(i) // 4] for i, rid in enumerate(ids)}
    far_within = {("r01", "r03"), ("r05", "r07"), ("r09", "r11")}
    near_cross = {
        ("r01", "r05"),
        ("r02", "r06"),
        ("r05", "r09"),
        ("r06", "r10"),
        ("r01", "r09"),
    }
    matrix = {}
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            pair = canonical_pair(ids[i], ids[j])
            same = labels[ids[i]] == labels[ids[j]]
            if pair in far_within:
                matrix[pair] = 0.9
            elif pair in near_cross:
                matrix[pair] = 0.2
            else:
                matrix[pair] = 0.1 if same else 0.8
    dataset = make_dataset(labels)
    return dataset, DistanceModel("precomputed", matrix=matrix)


@pytest.fixture(scope="session")
def ds12_model():
    return build_ds12()


def build_ds60():
    """60 records in 10 clusters of 6, distances drawn once from a fixed seed."""
    rng = random.Random("ds60-matrix")
    ids = [f"g{c}x{k}" for c in range(10) for k in range(6)]
    labels = {rid: rid.split("x")[0] for rid in ids}
    matrix = {}
    for i in range(len(ids)):
        for j in range(i + 1, len(ids)):
            pair = canonical_pair(ids[i], ids[j])
            same = labels[ids[i]] == labels[ids[j]]
            if same:
                d = rng.uniform(0.05, 0.35) if rng.random() < 0.9 else rng.uniform(0.45, 0.9)
            else:
                d = rng.uniform(0.5, 1.0) if rng.random() < 0.95 else rng.uniform(0.1, 0.38)
            matrix[pair] = round(d, 6)
    dataset = make_dataset(labels)
    return dataset, DistanceModel("precomputed", matrix=matrix)


def perturbed_truth(dataset: Dataset, moves: int, rng: random.Random) -> Clustering:
    """Ground truth with `moves` records relocated to other blocks."""
    truth = dataset.truth_clustering()
    blocks = [list(b) for b in truth.blocks]
    for _ in range(moves):
        src = rng.randrange(len(blocks))
        while len(blocks[src]) <= 1:
            src = rng.randrange(len(blocks))
        dst = rng.randrange(len(blocks))
        while dst == src:
            dst = rng.randrange(len(blocks))
        rid = blocks[src].pop(rng.randrange(len(blocks[src])))
        blocks[dst].append(rid)
    return Clustering(blocks, expected_ids=dataset.ids)


def agglomerative_tree(dataset: Dataset, model: DistanceModel) -> HierarchyTree:
    """Greedy single-linkage merge order, as a plausible input hierarchy."""
    active = list(dataset.ids)
    nested = {rid: rid for rid in active}
    dist = {}
    for i in range(len(active)):
        for j in range(i + 1, len(active)):
            pair = canonical_pair(active[i], active[j])
            dist[pair] = model.distance(dataset, *pair)
    while len(active) > 1:
        best = None
        for i in range(len(active)):
            for j in range(i + 1, len(active)):
                d = dist[canonical_pair(active[i], active[j])]
                if best is None or d < best[0]:
                    best = (d, i, j)
        _, i, j = best
        a, b = active[i], active[j]
        nested[a] = (nested[a], nested[b])
        del active[j]
        for other in active:
            if other != a:
                key_a, key_b = canonical_pair(a, other), canonical_pair(b, other)
                dist[key_a] = min(dist[key_a], dist[key_b])
    return HierarchyTree(nested[active[0]])


def random_balanced_tree(ids, rng: random.Random) -> HierarchyTree:
    items = list(ids)
    rng.shuffle(items)
    nested = list(items)
    while len(nested) > 1:
        nxt = []
        for k in range(0, len(nested) - 1, 2):
            nxt.append((nested[k], nested[k + 1]))
        if len(nested) % 2:
            nxt[-1] = (nxt[-1], nested[-1])
        nested = nxt
    return HierarchyTree(nested[0])


def random_tree(ids, rng: random.Random) -> HierarchyTree:
    """Uniformly random merge order; shape varies from path-like to balanced."""
    nested = list(ids)
    while len(nested) > 1:
        i = rng.randrange(len(nested))
        j = rng.randrange(len(nested) - 1)
        if j >= i:
            j += 1
        a, b = nested[i], nested[j]
        nested = [x for k, x in enumerate(nested) if k not in (i, j)]
        nested.append((a, b))
    return HierarchyTree(nested[0])


def random_clustering(ids, rng: random.Random, max_blocks: int | None = None) -> Clustering:
    ids = list(ids)
    k = rng.randint(1, max_blocks or len(ids))
    blocks = [[] for _ in range(k)]
    for rid in ids:
        blocks[rng.randrange(k)].append(rid)
    return Clustering([b for b in blocks if b], expected_ids=ids)


def sample_of(pairs, label: str, queries: int = 0) -> PairSample:
    return PairSample(pairs=tuple(canonical_pair(*p) for p in pairs), label=label, queries_spent=queries)


@pytest.fixture(scope="session")
def ds60_model():
    return build_ds60()
