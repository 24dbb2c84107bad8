import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from gcao.evaluation import EvaluationReport, acc, ari, contingency, evaluate, homogeneity, nmi

labels_pairs = st.integers(min_value=2, max_value=40).flatmap(
    lambda n: st.tuples(
        st.lists(st.integers(min_value=0, max_value=4), min_size=n, max_size=n),
        st.lists(st.integers(min_value=0, max_value=4), min_size=n, max_size=n),
    )
)


def test_contingency_hand_count():
    tab = contingency([0, 0, 1], [1, 1, 0])
    assert tab.counts.tolist() == [[0, 2], [1, 0]]
    assert tab.row_totals.tolist() == [2, 1]
    assert tab.col_totals.tolist() == [1, 2]
    assert tab.n == 3


def test_contingency_identical_is_diagonal():
    tab = contingency([0, 1, 2, 1], [0, 1, 2, 1])
    assert np.array_equal(tab.counts, np.diag([1, 2, 1]))


def test_contingency_marginals_sum():
    rng = np.random.default_rng(50)
    t = rng.integers(0, 7, 500)
    p = rng.integers(0, 5, 500)
    tab = contingency(t, p)
    assert tab.counts.sum() == 500
    assert tab.row_totals.sum() == 500
    assert tab.col_totals.sum() == 500


def test_contingency_length_mismatch():
    with pytest.raises(ValueError, match="mismatch"):
        contingency([0, 1], [0])


def test_nmi_perfect_is_exactly_one():
    for labels in ([0, 1, 0, 2, 2], [3, 1, 4, 1, 5, 9, 2, 6]):
        assert nmi(contingency(labels, labels)) == 1.0


def test_nmi_single_cluster_is_zero():
    assert nmi(contingency([0, 0, 1, 1], [0, 0, 0, 0])) == 0.0
    assert nmi(contingency([2, 2, 2], [0, 1, 2])) == 0.0


def test_nmi_independent_two_by_two():
    # Frozen by the direct sum evaluation: a fully balanced 2x2 table has
    # zero mutual information.
    assert nmi(contingency([0, 0, 1, 1], [0, 1, 0, 1])) == 0.0


def test_nmi_matches_oracle_random():
    rng = np.random.default_rng(51)
    for _ in range(30):
        n = int(rng.integers(2, 80))
        t = rng.integers(0, 4, n)
        p = rng.integers(0, 5, n)
        got = nmi(contingency(t, p))
        assert got == pytest.approx(oracles.nmi_oracle(t, p), abs=1e-12)
        assert -1e-12 <= got <= 1 + 1e-12


def test_ari_perfect_and_permutation():
    assert ari(contingency([0, 0, 1, 1], [0, 0, 1, 1])) == 1.0
    assert ari(contingency([0, 0, 1, 1, 2], [2, 2, 0, 0, 1])) == 1.0


def test_ari_frozen_pair_example():
    # 6 pairs: TP=1, FP=2, FN=1, TN=2 -> chance-corrected index 0.
    assert ari(contingency([0, 0, 1, 1], [0, 0, 0, 1])) == 0.0


def test_ari_needs_pairs():
    with pytest.raises(ValueError):
        ari(contingency([0], [0]))


def test_ari_degenerate_single_class():
    assert ari(contingency([0, 0, 0], [1, 1, 1])) == 0.0


def test_ari_matches_pair_oracle_random():
    rng = np.random.default_rng(52)
    for _ in range(30):
        n = int(rng.integers(2, 60))
        t = rng.integers(0, 4, n)
        p = rng.integers(0, 4, n)
        assert ari(contingency(t, p)) == pytest.approx(oracles.adjusted_rand(t, p), abs=1e-12)


def test_homogeneity_pure_clusters():
    assert homogeneity(contingency([0, 0, 1, 1], [0, 1, 2, 2])) == 1.0


def test_homogeneity_single_cluster_balanced():
    assert homogeneity(contingency([0, 0, 1, 1], [0, 0, 0, 0])) == 0.0


def test_homogeneity_zero_class_entropy():
    assert homogeneity(contingency([5, 5, 5], [0, 1, 0])) == 1.0


def test_homogeneity_matches_oracle_random():
    rng = np.random.default_rng(53)
    for _ in range(30):
        n = int(rng.integers(2, 80))
        t = rng.integers(0, 3, n)
        p = rng.integers(0, 3, n)
        got = homogeneity(contingency(t, p))
        assert got == pytest.approx(oracles.homogeneity_oracle(t, p), abs=1e-12)


def test_acc_permutation_of_truth():
    assert acc(contingency([0, 1, 2, 0], [2, 0, 1, 2])) == 1.0


def test_acc_two_points_one_cluster():
    assert acc(contingency([0, 1], [0, 0])) == 0.5


def test_acc_matches_exhaustive_matching():
    rng = np.random.default_rng(54)
    for _ in range(30):
        n = int(rng.integers(2, 60))
        t = rng.integers(0, 5, n)
        p = rng.integers(0, 6, n)
        assert acc(contingency(t, p)) == pytest.approx(oracles.best_match_accuracy(t, p), abs=0)


def test_relabeling_invariance_exact():
    rng = np.random.default_rng(55)
    t = rng.integers(0, 4, 120)
    p = rng.integers(0, 5, 120)
    base = evaluate(t, p)
    for _ in range(20):
        perm = rng.permutation(5)
        relabeled = perm[p]
        assert evaluate(t, relabeled) == base


def test_evaluate_all_metrics_and_report():
    t = [0, 0, 1, 1, 2, 2]
    metrics = evaluate(t, t)
    assert metrics == {"nmi": 1.0, "ari": 1.0, "homogeneity": 1.0, "acc": 1.0}
    report = EvaluationReport.from_metrics(metrics, {"load": 0.1})
    data = report.to_dict()
    assert data["nmi"] == 1.0 and data["timings"] == {"load": 0.1}


def test_metrics_match_sklearn_on_random_labels():
    sklearn = pytest.importorskip("sklearn")
    from sklearn.metrics import (
        adjusted_rand_score,
        homogeneity_score,
        normalized_mutual_info_score,
    )

    rng = np.random.default_rng(56)
    for _ in range(20):
        n = int(rng.integers(10, 200))
        t = rng.integers(0, 4, n)
        p = rng.integers(0, 5, n)
        tab = contingency(t, p)
        assert nmi(tab) == pytest.approx(normalized_mutual_info_score(t, p, average_method="geometric"), abs=1e-9)
        assert ari(tab) == pytest.approx(adjusted_rand_score(t, p), abs=1e-9)
        assert homogeneity(tab) == pytest.approx(homogeneity_score(t, p), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(labels_pairs)
def test_property_ranges_and_pair_oracle(pair):
    t, p = pair
    tab = contingency(t, p)
    assert 0.0 <= nmi(tab) <= 1.0 + 1e-12
    assert 0.0 <= homogeneity(tab) <= 1.0 + 1e-12
    assert 0.0 <= acc(tab) <= 1.0
    a = ari(tab)
    assert a <= 1.0 + 1e-12
    assert a == pytest.approx(oracles.adjusted_rand(t, p), abs=1e-12)
