import json
import random

import pytest

from dedupcc.core import (
    Clustering,
    Dataset,
    HierarchyTree,
    Record,
    canonical_pair,
    count_prunings,
    enumerate_prunings,
    load_dataset,
    load_flat_clustering,
    load_tree,
    pruning_to_clustering,
    same_cluster,
)
from dedupcc.errors import (
    InvalidClusteringError,
    InvalidPairError,
    InvalidPruningError,
    InvalidTreeError,
    SchemaError,
    UnknownIdError,
)

from conftest import random_tree


def test_canonical_pair():
    assert canonical_pair("b", "a") == ("a", "b")
    assert canonical_pair(3, 7) == (3, 7)
    with pytest.raises(InvalidPairError):
        canonical_pair("a", "a")


def test_dataset_validation():
    with pytest.raises(SchemaError):
        Dataset([Record(id="a"), Record(id="a")])
    # ground truth must be all-or-none
    with pytest.raises(SchemaError):
        Dataset([Record(id="a", cluster="x"), Record(id="b")])
    ds = Dataset([Record(id="a", cluster="x"), Record(id="b", cluster="x")])
    assert ds.has_ground_truth
    assert ds.truth_clustering().blocks == (("a", "b"),)


def test_same_cluster_basics():
    c = Clustering([["a", "b"], ["c"]])
    assert same_cluster(c, "a", "b") == 1
    assert same_cluster(c, "a", "c") == 0
    assert same_cluster(c, "c", "a") == 0
    singles = Clustering.singletons("abc")
    assert all(same_cluster(singles, x, y) == 0 for x, y in [("a", "b"), ("b", "c"), ("a", "c")])
    with pytest.raises(InvalidPairError):
        same_cluster(c, "a", "a")
    with pytest.raises(UnknownIdError):
        same_cluster(c, "a", "z")


def test_same_cluster_is_an_equivalence_on_blocks():
    # symmetric and transitive over all distinct pairs, n = 20
    rng = random.Random(7)
    ids = [f"v{i}" for i in range(20)]
    blocks = {}
    for x in ids:
        blocks.setdefault(rng.randrange(5), []).append(x)
    c = Clustering(blocks.values(), expected_ids=ids)
    for x in ids:
        for y in ids:
            if x == y:
                continue
            assert c.same(x, y) == c.same(y, x)
            for z in ids:
                if z in (x, y):
                    continue
                if c.same(x, y) and c.same(y, z):
                    assert c.same(x, z)


def test_clustering_rejects_non_partitions():
    with pytest.raises(InvalidClusteringError):
        Clustering([["a", "b"], ["b"]])
    with pytest.raises(InvalidClusteringError):
        Clustering([["a"], []])
    with pytest.raises(InvalidClusteringError):
        Clustering([["a"]], expected_ids=["a", "b"])


def test_clustering_canonical_form():
    c = Clustering([["c", "b"], ["a"]])
    assert c.encode() == (("a",), ("b", "c"))
    assert c == Clustering([["a"], ["b", "c"]])
    assert c.max_cluster_size == 2


BALANCED4 = (("l1", "l2"), ("l3", "l4"))
CATERPILLAR4 = ((("a", "b"), "c"), "d")


def test_pruning_to_clustering_examples():
    tree = HierarchyTree(BALANCED4)
    root = pruning_to_clustering(tree, [0])
    assert root.blocks == (("l1", "l2", "l3", "l4"),)
    leaves = [i for i in range(tree.node_count) if tree.is_leaf(i)]
    assert pruning_to_clustering(tree, leaves) == Clustering.singletons(["l1", "l2", "l3", "l4"])
    # the two depth-1 nodes (preorder: root 0, left 1, right 4)
    depth1 = pruning_to_clustering(tree, [1, 4])
    assert depth1 == Clustering([["l1", "l2"], ["l3", "l4"]])
    assert any(
        pruning_to_clustering(tree, f) == depth1 for f in enumerate_prunings(tree)
    )


def test_pruning_rejects_bad_frontiers():
    tree = HierarchyTree(BALANCED4)
    with pytest.raises(InvalidPruningError):
        pruning_to_clustering(tree, [0, 1])  # not an antichain
    with pytest.raises(InvalidPruningError):
        pruning_to_clustering(tree, [1])  # does not cover
    with pytest.raises(InvalidPruningError):
        pruning_to_clustering(tree, [])
    with pytest.raises(InvalidPruningError):
        pruning_to_clustering(tree, [99])


def test_count_prunings_small_trees():
    assert count_prunings(HierarchyTree("only")) == 1
    assert count_prunings(HierarchyTree(BALANCED4)) == 5
    # explicit antichain enumeration of the caterpillar gives 4:
    # {root}, {N1, d}, {N2, c, d}, {a, b, c, d}
    assert count_prunings(HierarchyTree(CATERPILLAR4)) == 4


def test_count_matches_enumeration_random_trees():
    rng = random.Random(123)
    for trial in range(30):
        n = rng.randint(1, 10)
        tree = random_tree([f"x{i}" for i in range(n)], rng)
        frontiers = list(enumerate_prunings(tree))
        # every frontier yields a valid partition, and all partitions differ
        clusterings = {pruning_to_clustering(tree, f).encode() for f in frontiers}
        assert len(frontiers) == len(clusterings) == count_prunings(tree)


def test_enumeration_yields_coarser_first():
    tree = HierarchyTree(BALANCED4)
    frontiers = list(enumerate_prunings(tree))
    assert frontiers[0] == (0,)
    sizes = [len(f) for f in frontiers]
    assert sizes[0] == min(sizes)


def test_dataset_loader(tmp_path):
    path = tmp_path / "data.jsonl"
    rows = [
        {"id": "a", "text": "alpha one", "cluster": "g1"},
        {"id": "b", "features": {"city": "Pune"}, "cluster": "g1"},
        {"id": "c", "text": "gamma", "cluster": "g2"},
    ]
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n")
    ds = load_dataset(path)
    assert ds.n == 3 and ds.ids == ("a", "b", "c")
    assert ds.by_id["b"].features == {"city": "Pune"}
    assert ds.truth_clustering().same("a", "b") == 1

    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": 5}\n')
    with pytest.raises(SchemaError):
        load_dataset(bad)
    bad.write_text('{"text": "no id"}\n')
    with pytest.raises(SchemaError):
        load_dataset(bad)
    bad.write_text("not json\n")
    with pytest.raises(SchemaError):
        load_dataset(bad)


def test_tree_loader(tmp_path):
    path = tmp_path / "tree.json"
    path.write_text(
        json.dumps(
            {"children": [{"leaf": "a"}, {"children": [{"leaf": "b"}, {"leaf": "c"}]}]}
        )
    )
    tree = load_tree(path, expected_ids=["a", "b", "c"])
    assert tree.leaf_ids == {"a", "b", "c"}
    assert count_prunings(tree) == 3

    path.write_text(json.dumps({"children": [{"leaf": "a"}, {"leaf": "b"}, {"leaf": "c"}]}))
    with pytest.raises(InvalidTreeError):
        load_tree(path)  # multiway trees are rejected, not binarized
    path.write_text(json.dumps({"children": [{"leaf": "a"}, {"leaf": "a"}]}))
    with pytest.raises(InvalidTreeError):
        load_tree(path)
    path.write_text(json.dumps({"leaf": "a"}))
    with pytest.raises(InvalidTreeError):
        load_tree(path, expected_ids=["a", "b"])


def test_flat_loader(tmp_path):
    path = tmp_path / "flat.json"
    path.write_text(json.dumps({"clusters": [["b", "a"], ["c"]]}))
    flat = load_flat_clustering(path, expected_ids=["a", "b", "c"])
    assert flat.blocks == (("a", "b"), ("c",))
    path.write_text(json.dumps({"clusters": [["a", "a"]]}))
    with pytest.raises(InvalidClusteringError):
        load_flat_clustering(path)
    path.write_text(json.dumps([1, 2]))
    with pytest.raises(SchemaError):
        load_flat_clustering(path)
