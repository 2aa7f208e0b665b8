"""Gromov-Wasserstein distortion of couplings between measure networks.

``tensor_product`` and ``distortion_sq`` evaluate the definition directly and
serve as the reference every fast path is checked against. The pair-merge
routines evaluate the distortion of the coupling that merges two nodes and
fixes all others in O(n) per pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .coarsen import coarsen, coupling_from_assignment, lift
from .netcore import Coupling, MeasureNetwork, Partition

#: Largest ``n_x * n_y`` accepted by the reference tensor product.
ORACLE_LIMIT = 4096
MARGINAL_TOL = 1e-9


def _check_coupling(net_x: MeasureNetwork, net_y: MeasureNetwork, pi: Coupling) -> None:
    if pi.shape != (net_x.n, net_y.n):
        raise ValueError(
            f"coupling has shape {pi.shape}, expected {(net_x.n, net_y.n)}"
        )
    if np.max(np.abs(pi.plan.sum(axis=1) - net_x.mass)) > MARGINAL_TOL:
        raise ValueError("coupling row marginal differs from the source mass")
    if np.max(np.abs(pi.plan.sum(axis=0) - net_y.mass)) > MARGINAL_TOL:
        raise ValueError("coupling column marginal differs from the target mass")


def tensor_product(net_x: MeasureNetwork, net_y: MeasureNetwork, pi: Coupling) -> np.ndarray:
    r"""Return :math:`[\mathcal{L}(S_X, S_Y) \otimes \pi]_{ik} = \sum_{jl} |S_X[i,j] - S_Y[k,l]|^2 \pi_{jl}`.

    Evaluated term by term (no square-loss factorization), one source row at
    a time. Limited to ``n_x * n_y <= ORACLE_LIMIT``.

    Parameters
    ----------
    net_x, net_y : MeasureNetwork
        Source and target networks.
    pi : Coupling
        Plan of shape ``(net_x.n, net_y.n)`` with the networks' masses as
        marginals.

    Returns
    -------
    ndarray, shape (net_x.n, net_y.n)
    """
    _check_coupling(net_x, net_y, pi)
    nx_, ny_ = net_x.n, net_y.n
    if nx_ * ny_ > ORACLE_LIMIT:
        raise ValueError(
            f"reference tensor product limited to n_x*n_y <= {ORACLE_LIMIT}, got {nx_ * ny_}"
        )
    SX, SY, P = net_x.weights, net_y.weights, pi.plan
    out = np.empty((nx_, ny_))
    for i in range(nx_):
        # diff[k, j, l] = SX[i, j] - SY[k, l]
        diff = SX[i][None, :, None] - SY[:, None, :]
        out[i] = np.einsum("kjl,jl->k", diff * diff, P)
    return out


def distortion_sq(net_x: MeasureNetwork, net_y: MeasureNetwork, pi: Coupling) -> float:
    """Squared distortion ``<L(S_X, S_Y) (x) pi, pi>`` of a coupling."""
    return float(np.sum(tensor_product(net_x, net_y, pi) * pi.plan))


def _merge_terms(S: np.ndarray, mu: np.ndarray, i: int, j: int) -> tuple[float, float]:
    """Block term and weight ``mu_i mu_j / (mu_i + mu_j)`` for merging ``i, j``."""
    mi, mj = mu[i], mu[j]
    ti, tj = mi / (mi + mj), mj / (mi + mj)
    sii, sij, sji, sjj = S[i, i], S[i, j], S[j, i], S[j, j]
    merged = ti * ti * sii + ti * tj * (sij + sji) + tj * tj * sjj
    block = (
        mi * mi * (sii - merged) ** 2
        + mi * mj * ((sij - merged) ** 2 + (sji - merged) ** 2)
        + mj * mj * (sjj - merged) ** 2
    )
    return block, mi * mj / (mi + mj)


def merge_pair_distortion_sq(net: MeasureNetwork, i: int, j: int) -> float:
    """Squared distortion of merging nodes ``i`` and ``j``, in O(n).

    Only entries touching the merged pair change. The result is the exact
    ``{i, j}`` block term plus ``mu_i mu_j / (mu_i + mu_j)`` times the
    mass-weighted squared row and column differences over all other nodes.
    """
    n = net.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range for network of size {n}")
    if i == j:
        raise ValueError("cannot merge a node with itself")
    S, mu = net.weights, net.mass
    block, w = _merge_terms(S, mu, i, j)
    rest = np.ones(n, dtype=bool)
    rest[[i, j]] = False
    row = S[i, rest] - S[j, rest]
    off = np.dot(mu[rest], row * row)
    if net.is_symmetric:
        off *= 2.0
    else:
        col = S[rest, i] - S[rest, j]
        off += np.dot(mu[rest], col * col)
    return float(block + w * off)


def coarsening_objective(net: MeasureNetwork, part: Partition) -> float:
    """``||(S - C_p C_w^T S C_w C_p^T) * sqrt(mu mu^T)||_F^2`` with entrywise root."""
    if part.n != net.n:
        raise ValueError(f"partition covers {part.n} nodes but the network has {net.n}")
    R = net.weights - lift(net, part)
    return float(net.mass @ (R * R) @ net.mass)


def row_col_spread(S: np.ndarray, mu: np.ndarray, method: str = "direct") -> np.ndarray:
    """``F[i, j] = sum_n mu_n ((S[i,n] - S[j,n])**2 + (S[n,i] - S[n,j])**2)`` over all n.

    ``method="gram"`` uses ``g_ii + g_jj - 2 g_ij`` with ``G = S diag(mu) S^T``;
    ``"direct"`` sums squared differences and avoids the cancellation.
    """
    r = np.sqrt(mu)
    symmetric = np.max(np.abs(S - S.T), initial=0.0) <= 1e-12
    if method == "direct":
        X = S * r[None, :]
        F = cdist(X, X, "sqeuclidean")
        if symmetric:
            return 2.0 * F
        Y = S.T * r[None, :]
        return F + cdist(Y, Y, "sqeuclidean")
    if method == "gram":
        mats = (S,) if symmetric else (S, S.T)
        F = np.zeros_like(S)
        for A in mats:
            G = (A * mu[None, :]) @ A.T
            g = np.diag(G)
            F += np.maximum(g[:, None] + g[None, :] - 2.0 * G, 0.0)
        return 2.0 * F if symmetric else F
    raise ValueError(f"unknown method {method!r}")


def pair_values_from_spread(S: np.ndarray, mu: np.ndarray, F: np.ndarray) -> np.ndarray:
    """All pair-merge squared distortions given the full spread matrix ``F``."""
    d = np.diag(S)
    ST = S.T
    mi, mj = mu[:, None], mu[None, :]
    # n = i and n = j contributions are inside F but belong to the block term
    own = mi * ((d[:, None] - ST) ** 2 + (d[:, None] - S) ** 2) + mj * (
        (S - d[None, :]) ** 2 + (ST - d[None, :]) ** 2
    )
    off = np.maximum(F - own, 0.0)
    tot = mi + mj
    ti, tj = mi / tot, mj / tot
    sii, sjj = d[:, None], d[None, :]
    merged = ti * ti * sii + ti * tj * (S + ST) + tj * tj * sjj
    block = (
        mi * mi * (sii - merged) ** 2
        + mi * mj * ((S - merged) ** 2 + (ST - merged) ** 2)
        + mj * mj * (sjj - merged) ** 2
    )
    V = block + (mi * mj / tot) * off
    np.fill_diagonal(V, 0.0)
    return V


def pair_distortion_sq_matrix(net: MeasureNetwork, method: str = "direct") -> np.ndarray:
    """Matrix of squared pair-merge distortions (zero diagonal)."""
    F = row_col_spread(net.weights, net.mass, method)
    V = np.triu(pair_values_from_spread(net.weights, net.mass, F), 1)
    return V + V.T


@dataclass(frozen=True, eq=False)
class PairDistortionMatrix:
    """``values[i, j]`` is the (unsquared) distortion of merging ``i`` and ``j``."""

    values: np.ndarray

    def __post_init__(self):
        H = np.array(self.values, dtype=float, copy=True)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("pair distortion matrix must be square")
        if np.any(H < 0) or np.any(np.diag(H) != 0) or not np.array_equal(H, H.T):
            raise ValueError("pair distortion matrix must be symmetric, nonnegative, zero-diagonal")
        H.setflags(write=False)
        object.__setattr__(self, "values", H)

    @property
    def n(self) -> int:
        return self.values.shape[0]


def pair_distortion_matrix(net: MeasureNetwork, method: str = "direct") -> PairDistortionMatrix:
    """``H[i, j] = dis(pi^{ij})`` for every pair of nodes."""
    if net.n < 2:
        raise ValueError("pair distortion matrix needs at least two nodes")
    V = pair_distortion_sq_matrix(net, method)
    return PairDistortionMatrix(np.sqrt(V))


def partition_distortion_sq(net: MeasureNetwork, part: Partition) -> float:
    """Distortion of ``diag(mu) C_p`` against the coarsened network, via the reference path."""
    return distortion_sq(net, coarsen(net, part), coupling_from_assignment(net, part))
