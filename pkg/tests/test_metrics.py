import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import adjusted_rand_score

from oracles import ari_by_pairs
from qbkmeans.metrics import (
    DEFAULT_TIMING,
    TimingModel,
    adjusted_rand_index,
    contingency,
    estimate_anneal_time,
    estimate_embedding_time,
)

labelings = st.lists(st.integers(0, 4), min_size=2, max_size=30)


def test_identical_partitions():
    assert adjusted_rand_index([0, 0, 1, 1], [0, 0, 1, 1]) == 1.0
    assert adjusted_rand_index([0, 0, 1, 1], [5, 5, 2, 2]) == 1.0


def test_cross_partition():
    assert adjusted_rand_index([0, 0, 1, 1], [0, 1, 0, 1]) == -0.5
    assert ari_by_pairs([0, 0, 1, 1], [0, 1, 0, 1]) == pytest.approx(-0.5, abs=1e-15)


def test_degenerate_convention():
    assert adjusted_rand_index([0, 0, 0], [0, 0, 0]) == 1.0
    assert adjusted_rand_index([0, 1, 2], [2, 0, 1]) == 1.0
    assert adjusted_rand_index([0, 0, 0], [0, 1, 2]) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_ari_properties(data):
    a = data.draw(labelings)
    b = data.draw(st.lists(st.integers(0, 4), min_size=len(a), max_size=len(a)))
    ari = adjusted_rand_index(a, b)
    assert -1.0 <= ari <= 1.0
    assert ari == adjusted_rand_index(b, a)
    relabel = np.array([3, 0, 4, 1, 2])
    assert ari == pytest.approx(adjusted_rand_index(relabel[a], b), abs=1e-15)
    assert ari == pytest.approx(adjusted_rand_score(a, b), abs=1e-12)
    if len(set(a)) > 1 or len(set(b)) > 1:
        try:
            ref = ari_by_pairs(a, b)
        except ZeroDivisionError:
            return
        assert ari == pytest.approx(ref, abs=1e-12)


def test_random_balanced_partitions_average_zero():
    rng = np.random.default_rng(0)
    base = np.repeat([0, 1], 10)
    scores = [adjusted_rand_index(base, rng.permutation(base)) for _ in range(1000)]
    assert abs(np.mean(scores)) <= 0.05


def test_contingency_examples():
    t = contingency([0, 0, 1, 1], [0, 0, 1, 1])
    assert t.counts.tolist() == [[2, 0], [0, 2]]
    t = contingency([0, 0, 1, 1], [0, 1, 0, 1])
    assert t.counts.tolist() == [[1, 1], [1, 1]]
    assert t.total == 4 == t.counts.sum()
    with pytest.raises(ValueError):
        contingency([0, 1], [0, 1, 2])


def test_embedding_time_examples():
    assert estimate_embedding_time(256) == pytest.approx(0.1253, abs=0.0002)
    assert estimate_embedding_time(512) == pytest.approx(0.4974, abs=0.0002)
    assert estimate_embedding_time(1) == pytest.approx(4.08719e-4, rel=1e-12)
    with pytest.raises(ValueError):
        estimate_embedding_time(0)


def test_embedding_time_exactly_quadratic():
    vals = [estimate_embedding_time(n) for n in range(1, 200)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    second = np.diff(vals, 2)
    assert np.allclose(second, 2 * DEFAULT_TIMING.embed_c2, rtol=1e-6, atol=0)


def test_anneal_time():
    assert estimate_anneal_time() == 0.03481
    assert estimate_anneal_time(TimingModel(anneal_mean=1.0)) == 1.0
