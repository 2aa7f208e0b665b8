import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_coarse_weights, random_network
from gwcoarsen.coarsen import (
    averaging_matrix,
    coarsen,
    coupling_from_assignment,
    lift,
    merge_pair,
    pair_partition,
)
from gwcoarsen.netcore import Partition, build_network


def random_partition(rng, n):
    m = int(rng.integers(1, n + 1))
    labels = np.concatenate([np.arange(m), rng.integers(0, m, n - m)])
    return Partition.from_labels(rng.permutation(labels))


def test_coupling_identity_and_collapse(rng):
    net = random_network(rng, 4)
    np.testing.assert_array_equal(coupling_from_assignment(net, Partition.identity(4)).plan, np.diag(net.mass))
    one = coupling_from_assignment(net, Partition(np.zeros(4, int), 1))
    np.testing.assert_array_equal(one.plan[:, 0], net.mass)


def test_coupling_k3(k3):
    pi = coupling_from_assignment(k3, Partition.from_labels([0, 0, 1]))
    np.testing.assert_allclose(pi.plan, [[1 / 3, 0], [1 / 3, 0], [0, 1 / 3]], rtol=1e-15)
    np.testing.assert_allclose(pi.col_marginal, [2 / 3, 1 / 3], rtol=1e-15)


def test_averaging_matrix_examples():
    net = build_network(np.zeros((4, 4)))
    Cw = averaging_matrix(net, Partition.from_labels([0, 0, 1, 2]))
    np.testing.assert_allclose(Cw[:, 0], [0.5, 0.5, 0, 0])

    net = build_network(np.zeros((3, 3)), [2 / 3, 1 / 6, 1 / 6])
    Cw = averaging_matrix(net, Partition.from_labels([0, 1, 1]))
    np.testing.assert_allclose(Cw[:, 1], [0, 0.5, 0.5], rtol=1e-15)

    np.testing.assert_array_equal(averaging_matrix(net, Partition.identity(3)), np.eye(3))


def test_averaging_columns_are_stochastic(rng):
    for _ in range(20):
        net = random_network(rng, 8)
        Cw = averaging_matrix(net, random_partition(rng, 8))
        np.testing.assert_allclose(Cw.sum(axis=0), 1.0, atol=1e-12)


def test_coarsen_identity(rng):
    net = random_network(rng, 5)
    out = coarsen(net, Partition.identity(5))
    np.testing.assert_array_equal(out.weights, net.weights)
    np.testing.assert_array_equal(out.mass, net.mass)
    assert out.provenance == net.provenance


def test_coarsen_k3(k3):
    out = coarsen(k3, Partition.from_labels([0, 0, 1]))
    np.testing.assert_allclose(out.weights, [[0.5, 1], [1, 0]], rtol=1e-15)
    np.testing.assert_allclose(out.mass, [2 / 3, 1 / 3], rtol=1e-15)
    assert out.provenance == (frozenset({0, 1}), frozenset({2}))


def test_coarsen_to_single_node(rng):
    net = random_network(rng, 5)
    out = coarsen(net, Partition(np.zeros(5, int), 1))
    assert out.weights[0, 0] == pytest.approx(net.mass @ net.weights @ net.mass, rel=1e-13)
    assert out.mass.tolist() == [1.0] or out.mass[0] == pytest.approx(1.0, abs=1e-15)


def test_coarsen_matches_explicit_averages(rng):
    for _ in range(20):
        net = random_network(rng, 7, symmetric=False)
        part = random_partition(rng, 7)
        ref, ref_mass = brute_coarse_weights(net.weights.tolist(), net.mass.tolist(),
                                             part.assignment.tolist(), part.n_blocks)
        out = coarsen(net, part)
        np.testing.assert_allclose(out.weights, ref, rtol=1e-12, atol=1e-13)
        np.testing.assert_allclose(out.mass, ref_mass, rtol=1e-15)


def test_lift_examples(k3, rng):
    net = random_network(rng, 4)
    np.testing.assert_array_equal(lift(net, Partition.identity(4)), net.weights)
    np.testing.assert_allclose(
        lift(k3, Partition.from_labels([0, 0, 1])),
        [[0.5, 0.5, 1], [0.5, 0.5, 1], [1, 1, 0]], rtol=1e-15,
    )
    const = build_network(np.full((5, 5), 3.25), rng.uniform(0.1, 1, 5))
    np.testing.assert_allclose(lift(const, random_partition(rng, 5)), 3.25, rtol=1e-14)


def test_mass_conservation_and_symmetry(rng):
    for _ in range(30):
        net = random_network(rng, 9)
        part = random_partition(rng, 9)
        out = coarsen(net, part)
        assert abs(out.mass.sum() - 1) <= 1e-12
        for k, block in enumerate(part.blocks()):
            total = 0.0
            for i in block:
                total += net.mass[i]
            assert out.mass[k] == total
        np.testing.assert_allclose(out.weights, out.weights.T, atol=1e-12)
        L = lift(net, part)
        np.testing.assert_allclose(L, L.T, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_composition(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 10))
    net = random_network(rng, n, symmetric=bool(seed % 2))
    p1 = random_partition(rng, n)
    p2 = random_partition(rng, p1.n_blocks)
    twice = coarsen(coarsen(net, p1), p2)
    once = coarsen(net, p1.compose(p2))
    np.testing.assert_allclose(twice.weights, once.weights, rtol=0, atol=1e-12 * max(1, np.abs(net.weights).max()))
    np.testing.assert_allclose(twice.mass, once.mass, rtol=1e-15)
    assert twice.provenance == once.provenance


def test_projection_idempotence(rng):
    for _ in range(20):
        net = random_network(rng, 8, symmetric=False)
        part = random_partition(rng, 8)
        Cw = averaging_matrix(net, part)
        np.testing.assert_allclose(Cw.T @ lift(net, part) @ Cw, coarsen(net, part).weights, atol=1e-12)


def test_merge_pair_returns_new_index(rng):
    net = random_network(rng, 5)
    out, part, idx = merge_pair(net, 3, 1)
    assert idx == 1
    assert part.assignment.tolist() == [0, 1, 2, 1, 3]
    assert out.n == 4
    assert out.provenance[1] == frozenset({1, 3})


def test_dimension_mismatch(k3):
    with pytest.raises(ValueError):
        coarsen(k3, Partition.identity(4))
    with pytest.raises(ValueError):
        pair_partition(3, 2, 2)
