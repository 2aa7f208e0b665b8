"""Measure networks, partitions, couplings and graph representations.

A measure network is a square weight matrix ``S`` together with a strictly
positive probability vector ``mu`` on its nodes. Every node also carries the
set of original node indices it stands for, so coarsened networks remain
self-describing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

SYMMETRY_TOL = 1e-12
MASS_TOL = 1e-12
DEFAULT_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MeasureNetwork:
    """Weighted network with a fully supported probability measure on nodes.

    Parameters
    ----------
    weights : ndarray, shape (n, n)
        Weight matrix ``S``. Need not be symmetric.
    mass : ndarray, shape (n,)
        Node masses; strictly positive, summing to one.
    provenance : tuple of frozenset of int
        Original node indices represented by each node.
    """

    weights: np.ndarray
    mass: np.ndarray
    provenance: tuple

    def __post_init__(self):
        S = _frozen(self.weights)
        mu = _frozen(self.mass)
        if S.ndim != 2 or S.shape[0] != S.shape[1]:
            raise ValueError(f"weights must be square, got shape {S.shape}")
        n = S.shape[0]
        if n < 1:
            raise ValueError("network must have at least one node")
        if mu.shape != (n,):
            raise ValueError(f"mass must have shape ({n},), got {mu.shape}")
        if not np.all(np.isfinite(S)):
            raise ValueError("weights must be finite")
        if not np.all(mu > 0):
            raise ValueError("mass entries must be strictly positive")
        if abs(mu.sum() - 1.0) > MASS_TOL:
            raise ValueError(f"mass must sum to 1, got {mu.sum()!r}")
        prov = tuple(frozenset(int(v) for v in p) for p in self.provenance)
        if len(prov) != n:
            raise ValueError("provenance length must equal node count")
        seen: set[int] = set()
        for p in prov:
            if not p:
                raise ValueError("provenance sets must be nonempty")
            if seen & p:
                raise ValueError("provenance sets must be pairwise disjoint")
            seen |= p
        object.__setattr__(self, "weights", S)
        object.__setattr__(self, "mass", mu)
        object.__setattr__(self, "provenance", prov)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return bool(np.max(np.abs(self.weights - self.weights.T)) <= SYMMETRY_TOL)

    def weight_scale(self) -> float:
        """``max(1, max|S|**2)``, the reference scale for zero tests."""
        return max(1.0, float(np.max(np.abs(self.weights))) ** 2)

    def __repr__(self):
        return f"MeasureNetwork(n={self.n}, symmetric={self.is_symmetric})"


def normalize_mass(mass) -> np.ndarray:
    mu = np.asarray(mass, dtype=float)
    if mu.ndim != 1:
        raise ValueError("mass must be a vector")
    if not np.all(np.isfinite(mu)) or not np.all(mu > 0):
        raise ValueError("mass entries must be finite and strictly positive")
    total = mu.sum()
    # leave already-normalized vectors bit-identical so rebuilding is idempotent
    if abs(total - 1.0) > 1e-14:
        mu = mu / total
    return mu


def build_network(weights, mass=None) -> MeasureNetwork:
    """Build a network from a weight matrix, defaulting to uniform mass.

    Given masses are renormalized to sum to one. Provenance is the singleton
    ``{i}`` for every node.
    """
    S = np.asarray(weights, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"weights must be a square matrix, got shape {S.shape}")
    n = S.shape[0]
    if n == 0:
        raise ValueError("weights must be nonempty")
    if mass is None:
        mu = np.full(n, 1.0 / n)
    else:
        mu = normalize_mass(mass)
        if mu.shape != (n,):
            raise ValueError(f"mass has length {mu.shape[0]}, expected {n}")
    return MeasureNetwork(S, mu, tuple(frozenset((i,)) for i in range(n)))


@dataclass(frozen=True, eq=False)
class Partition:
    """Surjective map from ``n`` nodes onto ``n_blocks`` supernodes."""

    assignment: np.ndarray
    n_blocks: int

    def __post_init__(self):
        a = np.array(self.assignment, dtype=np.int64, copy=True)
        if a.ndim != 1 or a.size == 0:
            raise ValueError("assignment must be a nonempty vector")
        m = int(self.n_blocks)
        if m < 1 or m > a.size:
            raise ValueError(f"block count {m} must lie in [1, {a.size}]")
        if a.min() < 0 or a.max() >= m:
            raise ValueError(f"block indices must lie in [0, {m})")
        if np.unique(a).size != m:
            raise ValueError("partition must be surjective (every block nonempty)")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)
        object.__setattr__(self, "n_blocks", m)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Partition from arbitrary labels; blocks numbered by first occurrence."""
        labels = np.asarray(labels)
        _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
        rank = np.empty(first.size, dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(first.size)
        return cls(rank[inverse.ravel()], first.size)

    @classmethod
    def identity(cls, n: int) -> "Partition":
        return cls(np.arange(n), n)

    @classmethod
    def from_blocks(cls, blocks, n: int | None = None) -> "Partition":
        blocks = [sorted(int(v) for v in b) for b in blocks]
        if n is None:
            n = sum(len(b) for b in blocks)
        labels = np.full(n, -1, dtype=np.int64)
        for k, b in enumerate(blocks):
            if np.any(labels[b] >= 0):
                raise ValueError("blocks overlap")
            labels[b] = k
        if np.any(labels < 0):
            raise ValueError("blocks do not cover all nodes")
        return cls.from_labels(labels)

    @property
    def n(self) -> int:
        return self.assignment.size

    def blocks(self) -> list[np.ndarray]:
        return [np.flatnonzero(self.assignment == k) for k in range(self.n_blocks)]

    def block_sets(self) -> set[frozenset[int]]:
        return {frozenset(b.tolist()) for b in self.blocks()}

    def assignment_matrix(self) -> np.ndarray:
        """0/1 indicator matrix ``C_p`` of shape (n, n_blocks)."""
        C = np.zeros((self.n, self.n_blocks))
        C[np.arange(self.n), self.assignment] = 1.0
        return C

    def compose(self, then: "Partition") -> "Partition":
        """Apply ``self`` first, then ``then`` (which partitions self's blocks)."""
        if then.n != self.n_blocks:
            raise ValueError("partitions do not compose: size mismatch")
        return Partition(then.assignment[self.assignment], then.n_blocks)

    def same_blocks(self, other: "Partition") -> bool:
        return self.n == other.n and self.block_sets() == other.block_sets()

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.n_blocks == other.n_blocks and np.array_equal(
            self.assignment, other.assignment
        )

    def __hash__(self):
        return hash((self.n_blocks, self.assignment.tobytes()))

    def __repr__(self):
        return f"Partition(n={self.n}, n_blocks={self.n_blocks})"


@dataclass(frozen=True, eq=False)
class Coupling:
    """Nonnegative transport plan with its two marginals."""

    plan: np.ndarray
    row_marginal: np.ndarray
    col_marginal: np.ndarray

    def __post_init__(self):
        P = _frozen(self.plan)
        r = _frozen(self.row_marginal)
        c = _frozen(self.col_marginal)
        if P.ndim != 2 or P.shape != (r.size, c.size):
            raise ValueError("plan shape does not match marginals")
        if np.any(P < 0):
            raise ValueError("plan entries must be nonnegative")
        if np.max(np.abs(P.sum(axis=1) - r)) > MASS_TOL:
            raise ValueError("plan row sums differ from row marginal")
        if np.max(np.abs(P.sum(axis=0) - c)) > MASS_TOL:
            raise ValueError("plan column sums differ from column marginal")
        if abs(P.sum() - 1.0) > MASS_TOL:
            raise ValueError("plan must have total mass 1")
        object.__setattr__(self, "plan", P)
        object.__setattr__(self, "row_marginal", r)
        object.__setattr__(self, "col_marginal", c)

    @classmethod
    def from_plan(cls, plan) -> "Coupling":
        P = np.asarray(plan, dtype=float)
        return cls(P, P.sum(axis=1), P.sum(axis=0))

    @property
    def shape(self) -> tuple[int, int]:
        return self.plan.shape


class Representation(enum.Enum):
    ADJACENCY = "adjacency"
    LAPLACIAN = "laplacian"
    SIGNLESS_LAPLACIAN = "signless-laplacian"


def to_representation(adjacency, kind: Representation | str) -> np.ndarray:
    """Adjacency, Laplacian ``D - A`` or signless Laplacian ``D + A``."""
    kind = Representation(kind)
    A = np.asarray(adjacency, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("adjacency must be square")
    if kind is Representation.ADJACENCY:
        return A.copy()
    if np.max(np.abs(A - A.T), initial=0.0) > SYMMETRY_TOL:
        raise ValueError(f"{kind.value} requires a symmetric adjacency matrix")
    if np.any(np.diag(A) != 0):
        raise ValueError(f"{kind.value} requires an adjacency without self-loops")
    D = np.diag(A.sum(axis=1))
    return D - A if kind is Representation.LAPLACIAN else D + A


def duplicate_rows(net: MeasureNetwork, i: int, j: int, tol: float = DEFAULT_TOL) -> bool:
    """Whether merging nodes ``i`` and ``j`` is distortion free.

    True iff rows (and columns) ``i`` and ``j`` agree entrywise within ``tol``
    and the four entries of the ``{i, j}`` block agree with each other.
    """
    n = net.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"node index out of range for network of size {n}")
    if i == j:
        raise ValueError("duplicate_rows requires two distinct nodes")
    S = net.weights
    if np.max(np.abs(S[i] - S[j])) > tol or np.max(np.abs(S[:, i] - S[:, j])) > tol:
        return False
    block = np.array([S[i, i], S[i, j], S[j, i], S[j, j]])
    return bool(block.max() - block.min() <= tol)
