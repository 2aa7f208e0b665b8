"""Seeded generators for test instances.

Complete k-partite networks and blow-ups have known minimal representatives;
planted-partition networks have a known block structure that greedy
coarsening is guaranteed to recover when blocks are tight and well separated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netcore import MeasureNetwork, Partition, build_network

MAX_ATTEMPTS = 100


def complete_k_partite(part_sizes, weight: float = 1.0) -> MeasureNetwork:
    """Complete multipartite network with uniform mass.

    ``S[i, j] = weight`` when ``i`` and ``j`` lie in different parts, else 0.
    """
    sizes = [int(s) for s in part_sizes]
    if len(sizes) < 2:
        raise ValueError("complete k-partite network needs at least two parts")
    if any(s < 1 for s in sizes):
        raise ValueError("every part needs at least one node")
    labels = np.repeat(np.arange(len(sizes)), sizes)
    S = np.where(labels[:, None] != labels[None, :], float(weight), 0.0)
    return build_network(S)


def _exact_split(total: float, shares: np.ndarray) -> np.ndarray:
    """Split ``total`` by ``shares`` so the sequential sum is exactly ``total``."""
    if shares.size == 1:
        return np.array([total])
    # on a grid of ulp(total) every partial sum and the remainder are exact
    q = np.spacing(total)
    head = np.round(total * shares[:-1] / shares.sum() / q) * q
    acc = 0.0
    for x in head:
        acc += x
    last = total - acc
    if not (np.all(head > 0) and last > 0) or acc + last != total:
        raise ValueError("mass split produced a nonpositive share")
    return np.append(head, last)


def blow_up(
    net: MeasureNetwork,
    copies,
    seed: int | None = None,
    proportions=None,
    return_partition: bool = False,
):
    """Split every node into mass-sharing copies with inherited weights.

    Node ``i`` becomes ``copies[i]`` nodes. Weights between copies of ``i``
    and ``j`` equal ``S[i, j]``, including ``S[i, i]`` among copies of ``i``.
    Masses are split equally unless ``proportions[i]`` gives relative shares;
    the copies of ``i`` always sum to exactly ``mu_i``.

    With a ``seed`` the output nodes are shuffled. With ``return_partition``
    the partition grouping copies back onto their source node is returned too.
    """
    copies = [int(c) for c in copies]
    if len(copies) != net.n:
        raise ValueError(f"need one copy count per node ({net.n}), got {len(copies)}")
    if any(c < 1 for c in copies):
        raise ValueError("copy counts must be at least 1")
    source = np.repeat(np.arange(net.n), copies)
    if seed is not None:
        source = source[np.random.default_rng(seed).permutation(source.size)]
    S = net.weights[np.ix_(source, source)]
    mu = np.empty(source.size)
    for i, c in enumerate(copies):
        shares = np.ones(c) if proportions is None else np.asarray(proportions[i], float)
        if shares.shape != (c,) or np.any(shares <= 0):
            raise ValueError(f"proportions for node {i} must be {c} positive numbers")
        mu[np.flatnonzero(source == i)] = _exact_split(net.mass[i], shares)
    out = MeasureNetwork(S, mu, tuple(frozenset((k,)) for k in range(source.size)))
    if return_partition:
        return out, Partition(source, net.n)
    return out


def prop2_alpha_threshold(n: int) -> float:
    """Separation multiplier above which greedy coarsening recovers planted blocks."""
    return 4.0 + 4.0 * np.sqrt(n * n / (n - 1.0))


def same_block_merge_bound(eps: float, m1: float, m2: float) -> float:
    """Upper bound on the squared merge distortion of two same-block supernodes."""
    return 32.0 * eps**2 * m1 * m2 / (m1 + m2)


def cross_block_merge_bound(eps: float, alpha: float, m1: float, m3: float) -> float:
    """Lower bound on the squared merge distortion of two cross-block supernodes."""
    return eps**2 * (alpha - 4.0) ** 2 * m1 * m3 / (2.0 * (m1 + m3))


@dataclass(frozen=True)
class PlantedPartitionSpec:
    """Parameters of a planted-partition network.

    ``jitter`` scales the uniform within-block noise, drawn from
    ``(-jitter * epsilon / 2, jitter * epsilon / 2)``; ``jitter=0`` gives an
    exact blow-up of ``base_weights``.
    """

    block_sizes: tuple
    epsilon: float
    alpha: float
    base_weights: np.ndarray | None = None
    seed: int = 0
    jitter: float = 1.0
    shuffle: bool = True

    @property
    def n(self) -> int:
        return int(sum(self.block_sizes))

    @property
    def n_blocks(self) -> int:
        return len(self.block_sizes)


def default_base_weights(n_blocks: int, spacing: float) -> np.ndarray:
    """Symmetric block weights whose columns are pairwise ``spacing`` apart."""
    b = np.arange(n_blocks)
    return spacing * (b[:, None] + b[None, :] + 1.0)


def verify_planted(S, part: Partition, eps: float, alpha: float) -> bool:
    """Check the tight-block and separated-block conditions.

    Same-block rows differ by less than ``eps`` in every entry; rows from
    different blocks differ by at least ``alpha * eps`` in every entry.
    """
    S = np.asarray(S, dtype=float)
    lab = part.assignment
    diff = np.abs(S[:, None, :] - S[None, :, :])
    same = lab[:, None] == lab[None, :]
    iu, ju = np.triu_indices(S.shape[0], 1)
    within = same[iu, ju]
    if np.any(within) and diff[iu[within], ju[within]].max() >= eps:
        return False
    cross = ~within
    if np.any(cross) and diff[iu[cross], ju[cross]].min() < alpha * eps:
        return False
    return True


def planted_partition(spec: PlantedPartitionSpec) -> tuple[MeasureNetwork, Partition]:
    """Generate a symmetric planted-partition network and its true partition.

    Weights are ``base_weights[block(i), block(j)]`` plus symmetric bounded
    uniform noise. Each draw is verified; failing draws are redrawn from a
    fresh sub-seed up to ``MAX_ATTEMPTS`` times.
    """
    sizes = [int(s) for s in spec.block_sizes]
    if len(sizes) < 1 or any(s < 1 for s in sizes):
        raise ValueError("block sizes must be positive")
    if spec.epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if not 0.0 <= spec.jitter <= 1.0:
        raise ValueError("jitter must lie in [0, 1]")
    m = len(sizes)
    B = spec.base_weights
    if B is None:
        B = default_base_weights(m, (spec.alpha + 3.0) * spec.epsilon)
    B = np.asarray(B, dtype=float)
    if B.shape != (m, m):
        raise ValueError(f"base weights must be {m}x{m}")
    children = np.random.SeedSequence(spec.seed).spawn(MAX_ATTEMPTS)
    for child in children:
        rng = np.random.default_rng(child)
        labels = np.repeat(np.arange(m), sizes)
        if spec.shuffle:
            labels = labels[rng.permutation(labels.size)]
        U = rng.uniform(-0.5, 0.5, size=(labels.size, labels.size))
        noise = spec.jitter * spec.epsilon * np.triu(U)
        noise = noise + np.triu(noise, 1).T
        S = B[np.ix_(labels, labels)] + noise
        part = Partition.from_labels(labels)
        if verify_planted(S, part, spec.epsilon, spec.alpha):
            return build_network(S), part
    raise ValueError(
        f"no draw satisfied the planted-partition conditions in {MAX_ATTEMPTS} attempts"
    )
