"""k-means Greedy Pair Coarsening.

Nodes are clustered by k-means on the rows of the pair-merge distortion
matrix ``H``, then merged block-wise in a single coarsening.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .coarsen import averaging_matrix, coarsen
from .distort import coarsening_objective, pair_distortion_matrix
from .gpc import CoarsenResult
from .netcore import MeasureNetwork, Partition


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = 100
    tol: float = 1e-6
    seed: int = 0
    restarts: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass
class KMeansResult:
    partition: Partition
    centers: np.ndarray
    inertia: float
    history: list = field(default_factory=list)
    restart: int = 0


def _spread_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """First center uniform at random, then repeatedly the farthest point."""
    idx = [int(rng.integers(X.shape[0]))]
    dmin = np.sum((X - X[idx[0]]) ** 2, axis=1)
    for _ in range(1, k):
        nxt = int(np.argmax(dmin))
        idx.append(nxt)
        dmin = np.minimum(dmin, np.sum((X - X[nxt]) ** 2, axis=1))
    return X[idx].copy()


def _lloyd(X: np.ndarray, centers: np.ndarray, cfg: KMeansConfig):
    k = centers.shape[0]
    history = []
    labels = None
    prev = np.inf
    for _ in range(cfg.max_iters):
        D = cdist(X, centers, "sqeuclidean")
        new = np.argmin(D, axis=1)
        counts = np.bincount(new, minlength=k)
        for e in np.flatnonzero(counts == 0):
            # repair: move the point farthest from its center into the empty cluster
            cost = D[np.arange(X.shape[0]), new]
            cost[np.bincount(new, minlength=k)[new] <= 1] = -np.inf
            p = int(np.argmax(cost))
            new[p] = e
            D[p, e] = 0.0
        for c in range(k):
            centers[c] = X[new == c].mean(axis=0)
        inertia = float(np.sum((X - centers[new]) ** 2))
        history.append(inertia)
        unchanged = labels is not None and np.array_equal(new, labels)
        labels = new
        if unchanged or (np.isfinite(prev) and prev - inertia <= cfg.tol * prev):
            break
        prev = inertia
    return labels, centers, history


def kmeans(points, cfg: KMeansConfig) -> KMeansResult:
    """Lloyd's algorithm with spread initialization and seeded restarts.

    The restart with the smallest final inertia wins; ties go to the earliest
    restart. Clusters left empty are refilled with the point farthest from
    its center, so the returned partition always has ``cfg.k`` blocks.
    """
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise ValueError("points must be a 2-D array")
    n = X.shape[0]
    if cfg.k > n:
        raise ValueError(f"k={cfg.k} exceeds the number of points {n}")
    best = None
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        labels, centers, history = _lloyd(X, _spread_init(X, cfg.k, rng), cfg)
        if best is None or history[-1] < best.inertia:
            part = Partition.from_labels(labels)
            # reorder centers to the partition's first-occurrence block numbering
            first = np.array([np.flatnonzero(part.assignment == b)[0] for b in range(cfg.k)])
            best = KMeansResult(part, centers[labels[first]], history[-1], history, r)
    return best


def kgpc_surrogate(H: np.ndarray, net: MeasureNetwork, part: Partition) -> float:
    """``||H - C_p C_w^T H C_w C_p^T||_F^2``, the clustering surrogate for ``H``."""
    Cw = averaging_matrix(net, part)
    a = part.assignment
    R = H - (Cw.T @ H @ Cw)[np.ix_(a, a)]
    return float(np.sum(R * R))


def kgpc(net: MeasureNetwork, k: int, cfg: KMeansConfig | None = None) -> CoarsenResult:
    """k-means Greedy Pair Coarsening down to ``k`` supernodes.

    Parameters
    ----------
    net : MeasureNetwork
        Network to coarsen. Pair distortions use its true masses even when
        they are not uniform; the clustering itself is unweighted.
    k : int
        Number of supernodes, in ``[2, n - 1]``.
    cfg : KMeansConfig, optional
        Clustering settings. ``cfg.k`` is overridden by ``k``.
    """
    if not 2 <= k < net.n:
        raise ValueError(f"k must lie in [2, {net.n - 1}], got {k}")
    if cfg is None:
        cfg = KMeansConfig(k=k)
    elif cfg.k != k:
        cfg = KMeansConfig(k, cfg.max_iters, cfg.tol, cfg.seed, cfg.restarts)
    H = pair_distortion_matrix(net).values
    km = kmeans(H, cfg)
    part = km.partition
    return CoarsenResult(
        network=coarsen(net, part),
        partition=part,
        objective=coarsening_objective(net, part),
        extras={
            "kmeans_inertia": km.inertia,
            "kmeans_restart": km.restart,
            "surrogate": kgpc_surrogate(H, net, part),
        },
    )
