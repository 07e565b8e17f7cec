import random
from fractions import Fraction

import pytest

from dedupcc.core import Dataset, Record, canonical_pair
from dedupcc.errors import (
    InvalidDistanceError,
    MissingDistanceError,
    MissingTextError,
    NoPairsUnderThresholdError,
    NoPositivePairsError,
    ParameterError,
    SchemaError,
)
from dedupcc.metrics import (
    DistanceModel,
    compute_alpha_beta,
    compute_alpha_beta_exact,
    compute_gamma0,
    informativeness,
    lambda_sweep,
    levenshtein,
    load_distance_matrix,
    mu_from_weights,
    normalized_edit,
    token_jaccard,
)

from conftest import make_dataset


def test_levenshtein_and_normalized_edit():
    assert levenshtein("abc", "abc") == 0
    assert levenshtein("abc", "abd") == 1
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("", "abc") == 3
    assert normalized_edit("abc", "abc") == 0.0
    assert normalized_edit("abc", "abd") == pytest.approx(1 / 3)
    assert normalized_edit("", "") == 0.0


def test_token_jaccard():
    assert token_jaccard("a b", "a b") == 0.0
    assert token_jaccard("a b", "b c") == pytest.approx(1 - 1 / 3)
    assert token_jaccard("", "") == 0.0
    assert token_jaccard("a", "b") == 1.0


def test_distance_model_text_kinds():
    ds = Dataset([Record(id="a", text="abc"), Record(id="b", text="abd"), Record(id="c")])
    edit = DistanceModel("normalized-edit")
    assert edit.distance(ds, "a", "b") == pytest.approx(1 / 3)
    assert edit.distance(ds, "a", "a") == 0.0
    with pytest.raises(MissingTextError):
        edit.distance(ds, "a", "c")
    with pytest.raises(ParameterError):
        DistanceModel("cosine")


def test_precomputed_model():
    ds = Dataset([Record(id="a"), Record(id="b"), Record(id="c")])
    model = DistanceModel(
        "precomputed", matrix={("a", "b"): 0.25, ("a", "c"): 1.0, ("b", "c"): 0.0}
    )
    assert model.distance(ds, "b", "a") == 0.25  # symmetric via canonical keys
    with pytest.raises(MissingDistanceError):
        DistanceModel("precomputed", matrix={}).distance(ds, "a", "b")


def test_matrix_loader(tmp_path):
    ds = Dataset([Record(id="a"), Record(id="b"), Record(id="c")])
    path = tmp_path / "m.csv"
    path.write_text("id1,id2,distance\na,b,0.2\nc,a,0.3\nb,c,0.4\n")
    model = load_distance_matrix(path, ds)
    assert model.distance(ds, "a", "c") == 0.3

    path.write_text("id1,id2,distance\na,b,0.2\n")
    with pytest.raises(MissingDistanceError):
        load_distance_matrix(path, ds)  # incomplete matrix
    path.write_text("id1,id2,distance\na,b,0.2\nc,a,1.3\nb,c,0.4\n")
    with pytest.raises(InvalidDistanceError):
        load_distance_matrix(path, ds)
    path.write_text("x,y,z\na,b,0.2\n")
    with pytest.raises(SchemaError):
        load_distance_matrix(path, ds)
    path.write_text("id1,id2,distance\na,b,0.2\nb,a,0.5\nc,a,0.3\nb,c,0.4\n")
    with pytest.raises(SchemaError):
        load_distance_matrix(path, ds)  # conflicting duplicate row


def test_alpha_beta_trivial_cases():
    labels = {"a": "g", "b": "g", "c": "h"}
    ds = make_dataset(labels)
    zero = DistanceModel("precomputed", matrix={p: 0.0 for p in
        [("a", "b"), ("a", "c"), ("b", "c")]})
    alpha, beta = compute_alpha_beta(ds, zero, 0.5)
    assert alpha == 0.0  # no positive pair beyond the threshold

    one_cluster = make_dataset({"a": "g", "b": "g", "c": "g"})
    alpha, beta = compute_alpha_beta(one_cluster, zero, 0.5)
    assert beta == 1.0  # every near pair is positive


def test_alpha_beta_against_double_loop(ds12_model):
    # independent recount of the 6-record sub-instance and the full instance
    dataset, model = ds12_model
    for lam in (0.15, 0.5, 0.85):
        truth = dataset.truth_clustering()
        pos = pos_far = near = near_pos = 0
        ids = list(dataset.ids)
        for x in ids:
            for y in ids:
                if x >= y:
                    continue
                d = model.distance(dataset, x, y)
                s = truth.same(x, y)
                pos += s
                pos_far += s and d > lam
                near += d <= lam
                near_pos += s and d <= lam
        alpha, beta = compute_alpha_beta(dataset, model, lam)
        assert alpha == pos_far / pos
        assert beta == near_pos / near


def test_alpha_beta_pinned_values(ds12_model):
    dataset, model = ds12_model
    alpha, beta = compute_alpha_beta_exact(dataset, model, 0.5)
    assert alpha == Fraction(3, 18)
    assert beta == Fraction(15, 20)


def test_alpha_beta_error_cases():
    ds = make_dataset({"a": "g", "b": "h"})
    far = DistanceModel("precomputed", matrix={("a", "b"): 0.9})
    with pytest.raises(NoPositivePairsError):
        compute_alpha_beta(ds, far, 0.5)
    ds2 = make_dataset({"a": "g", "b": "g"})
    with pytest.raises(NoPairsUnderThresholdError):
        compute_alpha_beta(ds2, far, 0.5)


def test_gamma0():
    assert compute_gamma0(make_dataset({x: x for x in "abcd"})) == 0.0
    assert compute_gamma0(make_dataset({x: "g" for x in "abcd"})) == 1.0
    six = make_dataset({x: "abc"[i // 2] for i, x in enumerate("uvwxyz")})
    assert compute_gamma0(six) == pytest.approx(6 / 30)
    ten = make_dataset({x: ("p" if i < 5 else "q") for i, x in enumerate("abcdefghij")})
    assert compute_gamma0(ten) == pytest.approx(4 / 9)


def test_mu_from_weights():
    assert mu_from_weights(1.0, 1.0, 0.2) == pytest.approx(0.2)
    assert mu_from_weights(2.0, 1.0, 0.2) == pytest.approx(1 / 3)
    assert mu_from_weights(1.0, 1.0, 0.0) == 0.0
    with pytest.raises(ParameterError):
        mu_from_weights(0.0, 1.0, 0.2)
    with pytest.raises(ParameterError):
        mu_from_weights(1.0, 1.0, 1.5)


def test_mu_monotonicity():
    # increasing in w1 and in gamma0, on a 10x10 grid
    for g_idx in range(10):
        gamma0 = (g_idx + 1) / 12
        values = [mu_from_weights(w1 / 2, 1.0, gamma0) for w1 in range(1, 11)]
        assert values == sorted(values)
    for w_idx in range(10):
        w1 = (w_idx + 1) / 2
        values = [mu_from_weights(w1, 1.0, g / 11) for g in range(1, 11)]
        assert values == sorted(values)


def test_informativeness_bundle(ds12_model):
    dataset, model = ds12_model
    info = informativeness(dataset, model, 0.5, 1.0, 1.0)
    assert info.alpha == pytest.approx(3 / 18)
    assert info.beta == pytest.approx(15 / 20)
    assert info.gamma0 == pytest.approx(3 / 11)
    assert info.gamma == info.gamma0
    assert info.mu == pytest.approx(3 / 11)
    with pytest.raises(ParameterError):
        informativeness(dataset, model, 0.5, 1.0, 1.0, gamma=0.1)  # below gamma0


def test_lambda_sweep(ds12_model):
    dataset, model = ds12_model
    rows = lambda_sweep(dataset, model, points=20)
    assert len(rows) == 20
    assert rows[0]["lambda"] == 0.0 and rows[-1]["lambda"] == 1.0
    # beta undefined below the smallest distance
    assert rows[0]["beta"] is None
    # at lambda = 1 every pair is near, so beta equals gamma0's unordered twin
    assert rows[-1]["alpha"] == 0.0
    assert rows[-1]["beta"] == pytest.approx(18 / 66)


def test_seeded_random_recounts():
    # property loop: alpha/beta from the module equal naive recounts
    rng = random.Random(42)
    for trial in range(10):
        n = rng.randint(4, 9)
        ids = [f"n{i}" for i in range(n)]
        labels = {x: f"c{rng.randrange(3)}" for x in ids}
        if len({labels[x] for x in ids}) < 2:
            labels[ids[0]] = "solo"
        matrix = {}
        for i in range(n):
            for j in range(i + 1, n):
                matrix[canonical_pair(ids[i], ids[j])] = round(rng.random(), 4)
        ds = make_dataset(labels)
        model = DistanceModel("precomputed", matrix=matrix)
        lam = rng.choice([0.25, 0.5, 0.75])
        truth = ds.truth_clustering()
        pos_pairs = [(x, y) for x in ids for y in ids if x < y and truth.same(x, y)]
        near_pairs = [
            (x, y) for x in ids for y in ids if x < y and model.distance(ds, x, y) <= lam
        ]
        if not pos_pairs or not near_pairs:
            continue
        alpha, beta = compute_alpha_beta(ds, model, lam)
        assert alpha == sum(model.distance(ds, *p) > lam for p in pos_pairs) / len(pos_pairs)
        assert beta == sum(truth.same(*p) for p in near_pairs) / len(near_pairs)
