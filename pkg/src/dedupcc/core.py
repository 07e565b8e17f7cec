"""Domain types: records, datasets, pair space, clusterings, trees, classes.

Conventions used throughout the package:

* The pair space is the set of ordered distinct pairs (x, y), x != y, of size
  n(n-1).  Pairs are stored canonically unordered (sorted two-tuple); every
  unordered pair stands for exactly two ordered ones, and all quantities we
  compute are symmetric, so nothing is lost.
* Clusterings are partitions kept in canonical form: ids sorted within each
  block, blocks sorted by their first id.  Canonical form makes equality,
  hashing, and report output deterministic.
* Trees are strictly binary.  Multiway input is rejected, not binarized.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .errors import (
    InvalidClusteringError,
    InvalidPairError,
    InvalidPruningError,
    InvalidTreeError,
    MissingGroundTruthError,
    SchemaError,
    UnknownIdError,
)


def canonical_pair(x, y) -> tuple:
    """Sorted two-tuple for a distinct pair; rejects x == y."""
    if x == y:
        raise InvalidPairError(f"pair endpoints must differ, got {x!r} twice")
    return (x, y) if x <= y else (y, x)


# ---------------------------------------------------------------------------
# Records and datasets


@dataclass(frozen=True)
class Record:
    id: str
    text: Optional[str] = None
    features: Optional[dict] = None
    cluster: Optional[str] = None


class Dataset:
    """Immutable collection of records with unique ids, in file order."""

    def __init__(self, records: Iterable[Record]):
        self.records = tuple(records)
        self.by_id = {}
        for rec in self.records:
            if rec.id in self.by_id:
                raise SchemaError(f"duplicate record id {rec.id!r}")
            self.by_id[rec.id] = rec
        self.ids = tuple(rec.id for rec in self.records)
        self.n = len(self.records)
        labeled = sum(1 for rec in self.records if rec.cluster is not None)
        if labeled not in (0, self.n):
            raise SchemaError(
                f"ground truth must cover all records or none, got {labeled}/{self.n}"
            )
        self.has_ground_truth = labeled == self.n and self.n > 0

    def require_id(self, x) -> Record:
        rec = self.by_id.get(x)
        if rec is None:
            raise UnknownIdError(f"unknown record id {x!r}")
        return rec

    def truth_clustering(self) -> "Clustering":
        """Ground-truth partition derived from the cluster labels."""
        if not self.has_ground_truth:
            raise MissingGroundTruthError("dataset has no cluster labels")
        by_label: dict = {}
        for rec in self.records:
            by_label.setdefault(rec.cluster, []).append(rec.id)
        return Clustering(by_label.values(), expected_ids=self.ids)


def _parse_record(obj, where: str) -> Record:
    if not isinstance(obj, dict):
        raise SchemaError(f"{where}: record must be a JSON object")
    rid = obj.get("id")
    if not isinstance(rid, str) or not rid:
        raise SchemaError(f"{where}: field 'id' must be a non-empty string")
    text = obj.get("text")
    if text is not None and not isinstance(text, str):
        raise SchemaError(f"{where}: field 'text' must be a string")
    features = obj.get("features")
    if features is not None:
        if not isinstance(features, dict) or not all(
            isinstance(k, str) and isinstance(v, str) for k, v in features.items()
        ):
            raise SchemaError(f"{where}: field 'features' must map strings to strings")
    cluster = obj.get("cluster")
    if cluster is not None and not isinstance(cluster, str):
        raise SchemaError(f"{where}: field 'cluster' must be a string")
    return Record(id=rid, text=text, features=features, cluster=cluster)


def load_dataset(path) -> Dataset:
    """Read a JSON-lines dataset file: one record object per line."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            records.append(_parse_record(obj, f"{path}:{lineno}"))
    return Dataset(records)


# ---------------------------------------------------------------------------
# Flat clusterings


class Clustering:
    """A partition in canonical form.

    Ids may be any orderable hashable type (record id strings, graph vertex
    ints), uniform within one clustering.
    """

    def __init__(self, blocks: Iterable[Iterable], expected_ids: Optional[Iterable] = None):
        canon = []
        seen = set()
        for block in blocks:
            ids = sorted(block)
            if not ids:
                raise InvalidClusteringError("empty cluster block")
            for x in ids:
                if x in seen:
                    raise InvalidClusteringError(f"id {x!r} appears in two blocks")
                seen.add(x)
            canon.append(tuple(ids))
        if not canon:
            raise InvalidClusteringError("clustering has no blocks")
        canon.sort(key=lambda b: b[0])
        self.blocks = tuple(canon)
        self._block_of = {x: i for i, block in enumerate(self.blocks) for x in block}
        if expected_ids is not None:
            expected = set(expected_ids)
            if seen != expected:
                missing = sorted(expected - seen)[:3]
                extra = sorted(seen - expected)[:3]
                raise InvalidClusteringError(
                    f"blocks do not partition the id set (missing {missing}, extra {extra})"
                )

    @classmethod
    def singletons(cls, ids: Iterable) -> "Clustering":
        return cls([[x] for x in ids])

    @property
    def ids(self):
        return self._block_of.keys()

    @property
    def max_cluster_size(self) -> int:
        return max(len(b) for b in self.blocks)

    def block_index(self, x) -> int:
        try:
            return self._block_of[x]
        except KeyError:
            raise UnknownIdError(f"id {x!r} not in clustering") from None

    def same(self, x, y) -> int:
        if x == y:
            raise InvalidPairError("same_cluster requires two distinct ids")
        return 1 if self.block_index(x) == self.block_index(y) else 0

    def encode(self) -> tuple:
        return self.blocks

    def as_json(self) -> dict:
        return {"clusters": [list(b) for b in self.blocks]}

    def __eq__(self, other):
        return isinstance(other, Clustering) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"Clustering({[list(b) for b in self.blocks]})"


def same_cluster(clustering: Clustering, x, y) -> int:
    """1 iff x and y share a block. Symmetric; rejects x == y and unknown ids."""
    return clustering.same(x, y)


def load_flat_clustering(path, expected_ids: Optional[Iterable] = None) -> Clustering:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc.msg})") from exc
    if not isinstance(obj, dict) or "clusters" not in obj:
        raise SchemaError(f"{path}: expected an object with a 'clusters' field")
    clusters = obj["clusters"]
    if not isinstance(clusters, list) or not all(isinstance(b, list) for b in clusters):
        raise SchemaError(f"{path}: 'clusters' must be a list of id lists")
    try:
        return Clustering(clusters, expected_ids=expected_ids)
    except InvalidClusteringError as exc:
        raise InvalidClusteringError(f"{path}: {exc.message}") from None


# ---------------------------------------------------------------------------
# Hierarchical clustering trees


class HierarchyTree:
    """Rooted strictly binary tree whose leaves carry distinct record ids.

    Nodes are integers in preorder (root = 0).  Structure is held in flat
    arrays so the pruning dynamic program can walk postorder without
    recursion.
    """

    def __init__(self, nested):
        # nested: leaf id, or a (left, right) pair of nested structures
        self.left: list = []
        self.right: list = []
        self.leaf_id: list = []
        self._build(nested)
        self.node_count = len(self.left)
        self.leaves_under = [frozenset()] * self.node_count
        self.postorder = []
        self._finish()
        self.leaf_ids = frozenset(x for x in self.leaf_id if x is not None)
        if len(self.leaf_ids) != sum(1 for x in self.leaf_id if x is not None):
            raise InvalidTreeError("tree leaves carry duplicate ids")

    def _build(self, nested) -> int:
        idx = len(self.left)
        self.left.append(-1)
        self.right.append(-1)
        self.leaf_id.append(None)
        if isinstance(nested, tuple):
            if len(nested) != 2:
                raise InvalidTreeError("internal nodes must have exactly two children")
            self.left[idx] = self._build(nested[0])
            self.right[idx] = self._build(nested[1])
        else:
            self.leaf_id[idx] = nested
        return idx

    def _finish(self):
        stack = [(0, False)]
        while stack:
            node, done = stack.pop()
            if done:
                if self.leaf_id[node] is not None:
                    self.leaves_under[node] = frozenset([self.leaf_id[node]])
                else:
                    self.leaves_under[node] = (
                        self.leaves_under[self.left[node]]
                        | self.leaves_under[self.right[node]]
                    )
                self.postorder.append(node)
            else:
                stack.append((node, True))
                if self.leaf_id[node] is None:
                    stack.append((self.right[node], False))
                    stack.append((self.left[node], False))

    def is_leaf(self, node: int) -> bool:
        return self.leaf_id[node] is not None

    def validate_against(self, ids: Iterable):
        expected = set(ids)
        if self.leaf_ids != expected:
            missing = sorted(expected - self.leaf_ids)[:3]
            extra = sorted(self.leaf_ids - expected)[:3]
            raise InvalidTreeError(
                f"tree leaves do not match the dataset (missing {missing}, extra {extra})"
            )

    @classmethod
    def from_json_obj(cls, obj, where: str = "tree") -> "HierarchyTree":
        return cls(_tree_nested(obj, where))


def _tree_nested(obj, where: str):
    if not isinstance(obj, dict):
        raise InvalidTreeError(f"{where}: node must be a JSON object")
    if "leaf" in obj:
        leaf = obj["leaf"]
        if not isinstance(leaf, str) or not leaf:
            raise InvalidTreeError(f"{where}: 'leaf' must be a non-empty string id")
        return leaf
    if "children" in obj:
        children = obj["children"]
        if not isinstance(children, list) or len(children) != 2:
            raise InvalidTreeError(f"{where}: 'children' must list exactly two nodes")
        return (_tree_nested(children[0], where), _tree_nested(children[1], where))
    raise InvalidTreeError(f"{where}: node needs either 'leaf' or 'children'")


def load_tree(path, expected_ids: Optional[Iterable] = None) -> HierarchyTree:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: invalid JSON ({exc.msg})") from exc
    tree = HierarchyTree.from_json_obj(obj, where=str(path))
    if expected_ids is not None:
        tree.validate_against(expected_ids)
    return tree


def pruning_to_clustering(tree: HierarchyTree, frontier: Iterable[int]) -> Clustering:
    """Turn a frontier (antichain of node ids covering all leaves) into a partition.

    Each frontier node becomes one cluster holding exactly its subtree leaves.
    Disjointness plus full coverage is equivalent to the antichain condition,
    so both are checked with one size count.
    """
    nodes = list(frontier)
    if not nodes:
        raise InvalidPruningError("empty frontier")
    total = 0
    covered: set = set()
    blocks = []
    for node in nodes:
        if not 0 <= node < tree.node_count:
            raise InvalidPruningError(f"node id {node} out of range")
        leaves = tree.leaves_under[node]
        total += len(leaves)
        covered |= leaves
        blocks.append(leaves)
    if total != len(covered) or covered != tree.leaf_ids:
        raise InvalidPruningError(
            "frontier is not an antichain covering all leaves"
        )
    return Clustering(blocks)


def count_prunings(tree: HierarchyTree) -> int:
    """Number of distinct prunings: count(leaf) = 1, count(v) = 1 + count(l)*count(r)."""
    counts = [0] * tree.node_count
    for node in tree.postorder:
        if tree.is_leaf(node):
            counts[node] = 1
        else:
            counts[node] = 1 + counts[tree.left[node]] * counts[tree.right[node]]
    return counts[0]


def enumerate_prunings(tree: HierarchyTree) -> Iterator[tuple]:
    """Yield every frontier as a tuple of node ids.

    At each internal node the single-cluster option {v} comes before the
    combinations of child frontiers, so coarser prunings of a subtree always
    appear before finer ones.  The tie-break in the pruning optimizer relies
    on this order.
    """

    def gen(node: int) -> Iterator[tuple]:
        yield (node,)
        if not tree.is_leaf(node):
            for lf in gen(tree.left[node]):
                for rf in gen(tree.right[node]):
                    yield lf + rf

    return gen(0)


# ---------------------------------------------------------------------------
# Clustering classes


@dataclass
class ClusteringClass:
    """The finite hypothesis class: flat clusterings plus hierarchy trees."""

    flats: list = field(default_factory=list)
    trees: list = field(default_factory=list)

    def __post_init__(self):
        if not self.flats and not self.trees:
            raise InvalidClusteringError("clustering class must be non-empty")

    def validate_against(self, ids: Iterable):
        expected = set(ids)
        for i, flat in enumerate(self.flats):
            if set(flat.ids) != expected:
                raise InvalidClusteringError(
                    f"flat clustering {i} is not over the dataset ids"
                )
        for i, tree in enumerate(self.trees):
            try:
                tree.validate_against(expected)
            except InvalidTreeError as exc:
                raise InvalidTreeError(f"tree {i}: {exc.message}") from None
