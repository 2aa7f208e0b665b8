"""Coarsening a measure network along a node partition.

Supernode weights are mass-weighted averages of the member weights,
``S' = C_w^T S C_w`` with ``C_w = diag(mu) C_p diag(1 / C_p^T mu)``, and
supernode masses are block sums ``mu' = C_p^T mu``.
"""

from __future__ import annotations

import numpy as np

from .netcore import Coupling, MeasureNetwork, Partition


def _check(net: MeasureNetwork, part: Partition) -> None:
    if part.n != net.n:
        raise ValueError(
            f"partition covers {part.n} nodes but the network has {net.n}"
        )


def block_mass(net: MeasureNetwork, part: Partition) -> np.ndarray:
    _check(net, part)
    # bincount accumulates in node order, so the block sums are reproducible
    return np.bincount(part.assignment, weights=net.mass, minlength=part.n_blocks)


def coupling_from_assignment(net: MeasureNetwork, part: Partition) -> Coupling:
    """Transport plan ``diag(mu) C_p`` sending each node to its supernode."""
    _check(net, part)
    plan = np.zeros((net.n, part.n_blocks))
    plan[np.arange(net.n), part.assignment] = net.mass
    return Coupling(plan, net.mass, block_mass(net, part))


def averaging_matrix(net: MeasureNetwork, part: Partition) -> np.ndarray:
    """Column-stochastic matrix ``C_w``; column ``k`` holds the in-block mass shares."""
    mu_blk = block_mass(net, part)
    Cw = np.zeros((net.n, part.n_blocks))
    Cw[np.arange(net.n), part.assignment] = net.mass / mu_blk[part.assignment]
    return Cw


def coarsen(net: MeasureNetwork, part: Partition) -> MeasureNetwork:
    """Coarsened network ``(C_w^T S C_w, C_p^T mu)`` with merged provenance."""
    Cw = averaging_matrix(net, part)
    S_c = Cw.T @ net.weights @ Cw
    mu_c = block_mass(net, part)
    prov = [frozenset()] * part.n_blocks
    for i, k in enumerate(part.assignment):
        prov[k] = prov[k] | net.provenance[i]
    return MeasureNetwork(S_c, mu_c, tuple(prov))


def lift(net: MeasureNetwork, part: Partition) -> np.ndarray:
    """``C_p C_w^T S C_w C_p^T``: the coarsened weights pulled back to ``n x n``."""
    S_c = coarsen(net, part).weights
    a = part.assignment
    return S_c[np.ix_(a, a)]


def pair_partition(n: int, i: int, j: int) -> Partition:
    """Partition of ``n`` nodes merging exactly ``i`` and ``j``."""
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range for network of size {n}")
    if i == j:
        raise ValueError("cannot merge a node with itself")
    labels = np.arange(n)
    labels[max(i, j)] = min(i, j)
    return Partition.from_labels(labels)


def merge_pair(net: MeasureNetwork, i: int, j: int) -> tuple[MeasureNetwork, Partition, int]:
    """Merge nodes ``i`` and ``j``.

    Returns the coarsened network, the merging partition and the index of the
    merged node, which is ``min(i, j)`` under first-occurrence numbering.
    """
    part = pair_partition(net.n, i, j)
    return coarsen(net, part), part, min(i, j)
