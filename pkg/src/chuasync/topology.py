"""Interconnection graphs and the auxiliary matrices seen from a pivot node."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, TooFewNodes, ValidationError


@dataclass(frozen=True, eq=False)
class Topology:
    """Binary adjacency with zero diagonal. Directed graphs are allowed."""

    adjacency: np.ndarray = field(repr=False)

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=np.int64, copy=True)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise ValidationError(f"adjacency must be a non-empty square matrix, got shape {adj.shape}")
        if not np.isin(adj, (0, 1)).all():
            raise ValidationError("adjacency entries must be 0 or 1")
        if np.any(np.diag(adj)):
            raise ValidationError("adjacency diagonal must be zero")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def is_symmetric(self) -> bool:
        return bool((self.adjacency == self.adjacency.T).all())

    def __eq__(self, other):
        return isinstance(other, Topology) and np.array_equal(self.adjacency, other.adjacency)

    def __hash__(self):
        return hash(self.adjacency.tobytes())

    def __repr__(self):
        return f"Topology(n={self.n}, edges={int(self.adjacency.sum())})"

    @classmethod
    def from_edges(cls, n, edges, directed=False):
        adj = np.zeros((n, n), dtype=np.int64)
        for e in edges:
            i, j = (int(v) for v in e)
            if not (0 <= i < n and 0 <= j < n):
                raise IndexOutOfRange(f"edge ({i}, {j}) out of range for n={n}")
            if i == j:
                raise ValidationError(f"self-loop ({i}, {i}) not allowed")
            adj[i, j] = 1
            if not directed:
                adj[j, i] = 1
        return cls(adj)

    @classmethod
    def complete(cls, n):
        return cls(np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))

    @classmethod
    def empty(cls, n):
        return cls(np.zeros((n, n), dtype=np.int64))

    @classmethod
    def path(cls, n):
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def ring(cls, n):
        if n < 3:
            return cls.path(n)
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def star(cls, n, center=0):
        return cls.from_edges(n, [(center, j) for j in range(n) if j != center])

    @classmethod
    def random(cls, n, density, seed=0):
        """Undirected Erdos-Renyi graph with edge probability ``density``."""
        rng = np.random.default_rng(seed)
        upper = np.triu(rng.random((n, n)) < density, k=1).astype(np.int64)
        return cls(upper + upper.T)

    def edges(self):
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(self.adjacency))]

    def _check_node(self, i):
        if not 0 <= i < self.n:
            raise IndexOutOfRange(f"node index {i} out of range for n={self.n}")


def degree(t: Topology, i: int) -> int:
    t._check_node(i)
    return int(t.adjacency[i].sum())


def non_pivot_nodes(t: Topology, pivot: int) -> np.ndarray:
    """Ascending node indices with ``pivot`` removed; the row/column order of the aux matrices."""
    t._check_node(pivot)
    return np.array([i for i in range(t.n) if i != pivot], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class ResidualCoefficients:
    pivot: int
    values: np.ndarray


def residual_coefficients(t: Topology, pivot: int = 0) -> ResidualCoefficients:
    """``values[i, j] = adj[pivot, j] - adj[i, j]`` over all node pairs."""
    t._check_node(pivot)
    adj = t.adjacency
    return ResidualCoefficients(pivot, adj[pivot][None, :] - adj)


def build_aux_matrices(t: Topology, pivot: int = 0):
    """Return ``(A1, A2)`` of size ``(n-1, n-1)`` over the non-pivot nodes.

    ``A1[r, c] = |adj[i, j]|`` and ``A2[r, c] = |adj[i, j] - adj[pivot, j]|`` with
    zero diagonals, where ``i, j`` are the ``r``-th and ``c``-th non-pivot nodes.
    """
    if t.n < 2:
        raise TooFewNodes(f"need at least 2 nodes, got {t.n}")
    idx = non_pivot_nodes(t, pivot)
    sub = t.adjacency[np.ix_(idx, idx)]
    a1 = np.abs(sub).astype(float)
    a2 = np.abs(sub - t.adjacency[pivot, idx][None, :]).astype(float)
    np.fill_diagonal(a1, 0.0)
    np.fill_diagonal(a2, 0.0)
    return a1, a2
