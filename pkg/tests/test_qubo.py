import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import blockwise_energy, dense_qubo, ordered_pair_objective, penalty_forms, permutation_1based, sq_dist_loop
from qbkmeans.dataspace import Dataset
from qbkmeans.qubo import (
    ClusterAssignment,
    DegenerateDatasetError,
    DistanceMatrix,
    build_permutation,
    build_qubo,
    decode,
    distance_matrix,
    encode,
    energy,
    feasible_objective,
    pairwise_variance_objective,
    penalty_weights,
    read_qubo,
    variance_objective,
    write_qubo,
)

# Dense A for 1-D points 0 and 1 with k=2, frozen from oracles.dense_qubo
A_01 = np.array(
    [
        [-2.0, 2.0, 1.0, 0.0],
        [2.0, -2.0, 0.0, 1.0],
        [1.0, 0.0, -2.0, 2.0],
        [0.0, 1.0, 2.0, -2.0],
    ]
)


def line(*xs):
    return Dataset(np.array(xs, dtype=float)[:, None])


def random_ds(rng, n, d=2):
    return Dataset(rng.normal(size=(n, d)))


def balanced_labels(rng, n, k):
    return rng.permutation(np.repeat(np.arange(k), n // k))


def test_distance_examples():
    dm = distance_matrix(Dataset(np.array([[0.0, 0.0], [3.0, 4.0]])))
    assert np.array_equal(dm.entries, [[0, 25], [25, 0]])
    assert dm.max_entry == 25
    assert not distance_matrix(Dataset(np.array([[1.5, 2.0], [1.5, 2.0]]))).entries.any()
    assert np.array_equal(distance_matrix(line(0, 1, 3)).entries, [[0, 1, 9], [1, 0, 4], [9, 4, 0]])


def test_distance_matches_scalar_loop():
    x = np.random.default_rng(0).normal(size=(9, 5))
    assert np.allclose(distance_matrix(Dataset(x)).entries, sq_dist_loop(x), rtol=1e-14, atol=0)


def test_penalty_weights():
    assert penalty_weights(DistanceMatrix(np.zeros((2, 2)), 1.0), 2, 2) == (1.0, 1.0)
    alpha, beta = penalty_weights(DistanceMatrix(np.zeros((8, 8)), 10.0), 8, 2)
    assert alpha == pytest.approx(10 / 7, rel=1e-15) and beta == 10.0
    with pytest.raises(DegenerateDatasetError):
        penalty_weights(DistanceMatrix(np.zeros((2, 2)), 0.0), 2, 2)


def test_degenerate_dataset_rejected():
    with pytest.raises(DegenerateDatasetError):
        build_qubo(Dataset(np.ones((4, 3))), 2)


def test_two_point_instance():
    inst = build_qubo(line(0, 1), 2)
    assert np.array_equal(inst.matrix, A_01)
    assert (inst.alpha, inst.beta, inst.dropped_offset) == (1.0, 1.0, 4.0)
    assert energy(inst, [0, 0, 0, 0]) == 0.0
    assert energy(inst, [1, 0, 0, 1]) == -4.0


@pytest.mark.parametrize("n,k,d", [(4, 2, 1), (6, 3, 2), (8, 4, 3), (9, 3, 2), (7, 2, 2), (5, 5, 1)])
def test_matches_dense_kronecker_construction(n, k, d):
    x = np.random.default_rng(n * 100 + k).normal(size=(n, d))
    inst = build_qubo(Dataset(x), k)
    assert np.allclose(inst.matrix, dense_qubo(x, k), rtol=1e-12, atol=1e-12)
    assert np.array_equal(inst.matrix, inst.matrix.T)
    assert inst.n_vars == n * k


def test_q_congruence_matches_index_bookkeeping():
    # row penalty assembled through Q^T (I_N kron beta G) Q against build_qubo's direct fill
    rng = np.random.default_rng(1)
    ds = random_ds(rng, 6)
    inst = build_qubo(ds, 3)
    n, k = 6, 3
    q = build_permutation(n, k).astype(float)
    g = np.ones((k, k)) - 2 * np.eye(k)
    row_term = q.T @ np.kron(np.eye(n), inst.beta * g) @ q
    d = distance_matrix(ds).entries
    f = np.ones((n, n)) - (2 * n / k) * np.eye(n)
    col_term = np.kron(np.eye(k), d + inst.alpha * f)
    assert np.array_equal(col_term + row_term, inst.matrix)


def test_translation_invariance():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(6, 3))
    a = build_qubo(Dataset(x), 2).matrix
    b = build_qubo(Dataset(x + np.array([10.0, -3.0, 0.5])), 2).matrix
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


def test_permutation_two_by_two():
    q = build_permutation(2, 2)
    w = np.array([11, 21, 12, 22])  # stacked columns: w_ij with i the point, j the cluster
    assert (q @ w).tolist() == [11, 12, 21, 22]


@pytest.mark.parametrize("n,k", [(1, 1), (1, 4), (2, 2), (3, 2), (5, 3), (4, 7)])
def test_permutation_matches_one_based_rule(n, k):
    q = build_permutation(n, k)
    assert np.array_equal(q, permutation_1based(n, k))
    assert np.all(q.sum(axis=0) == 1) and np.all(q.sum(axis=1) == 1)
    if n == 1:
        assert np.array_equal(q, np.eye(k))


def test_energy_two_paths_agree():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(7, 2))
    inst = build_qubo(Dataset(x), 3)
    for _ in range(50):
        bits = rng.integers(0, 2, size=21)
        direct = energy(inst, bits)
        blockwise = blockwise_energy(x, 3, bits, inst.alpha, inst.beta)
        assert abs(direct - blockwise) <= 1e-12 * max(1.0, abs(direct))


def test_energy_rejects_bad_bits():
    inst = build_qubo(line(0, 1), 2)
    with pytest.raises(ValueError):
        energy(inst, [1, 0, 0])
    with pytest.raises(ValueError):
        energy(inst, [2, 0, 0, 0])


@pytest.mark.parametrize("n,k", [(4, 2), (6, 3), (8, 4), (9, 3), (10, 2)])
def test_feasibility_bridge(n, k):
    rng = np.random.default_rng(n + k)
    for _ in range(20):
        ds = random_ds(rng, n, d=3)
        inst = build_qubo(ds, k)
        labels = balanced_labels(rng, n, k)
        lhs = energy(inst, encode(labels, k)) + inst.dropped_offset
        rhs = ordered_pair_objective(ds.points, labels)
        assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)
        assert feasible_objective(ds, labels) == pytest.approx(rhs, rel=1e-12)


def test_penalties_vanish_exactly_at_feasibility():
    n, k = 4, 2
    for bits in itertools.product((0, 1), repeat=n * k):
        w = np.array(bits).reshape(k, n).T
        col, row = penalty_forms(n, k, bits)
        assert (col == 0) == bool(np.all(w.sum(axis=0) == n // k))
        assert (row == 0) == bool(np.all(w.sum(axis=1) == 1))


def test_decode_cases():
    inst = build_qubo(line(0, 1, 5), 2)
    asg, stats = decode(inst, encode([1, 0, 1], 2))
    assert asg.labels.tolist() == [1, 0, 1] and stats.total == 0
    # point 0 in both clusters, others one-hot
    asg, stats = decode(inst, [1, 1, 0, 1, 0, 1])
    assert asg.labels.tolist() == [0, 0, 1]
    assert (stats.multi_assigned, stats.unassigned) == (1, 0)
    asg, stats = decode(inst, np.zeros(6, dtype=int))
    assert asg.labels.tolist() == [0, 0, 0]
    assert (stats.multi_assigned, stats.unassigned) == (0, 3)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 5).flatmap(lambda k: st.tuples(st.just(k), st.lists(st.integers(0, k - 1), min_size=k, max_size=9))))
def test_decode_inverts_encode(case):
    k, labels = case
    n = len(labels)
    ds = Dataset(np.arange(n, dtype=float)[:, None])
    inst = build_qubo(ds, k)
    asg, stats = decode(inst, encode(ClusterAssignment(np.array(labels), k)))
    assert asg.labels.tolist() == labels and stats.total == 0


def test_objective_examples():
    ds = line(0, 1, 3)
    assert feasible_objective(ds, [0, 1, 2]) == 0.0
    assert feasible_objective(ds, [0, 0, 0]) == 28.0
    assert variance_objective(ds, ClusterAssignment(np.array([0, 1, 2]), 3)) == 0.0
    pair = line(0, 2)
    assert variance_objective(pair, [0, 0]) == 2.0
    assert pairwise_variance_objective(pair, [0, 0]) == 2.0
    with pytest.raises(ValueError):
        variance_objective(pair, ClusterAssignment(np.array([0, 0]), 2))


def test_qubo_file_round_trip(tmp_path):
    inst = build_qubo(Dataset(np.random.default_rng(4).normal(size=(5, 2))), 2)
    path = tmp_path / "a.qubo"
    write_qubo(inst, path)
    a = read_qubo(path, inst.n_vars)
    assert np.allclose(a, inst.matrix, rtol=1e-15, atol=0)
    for line_ in path.read_text().splitlines():
        i, j, _ = line_.split()
        assert int(i) <= int(j)


def test_non_divisible_uses_real_target():
    ds = line(0, 1, 2, 4, 8)
    inst = build_qubo(ds, 2)
    assert inst.alpha == pytest.approx(64 / 4)
    assert inst.dropped_offset == pytest.approx(2 * inst.alpha * 6.25 + 5 * inst.beta)
