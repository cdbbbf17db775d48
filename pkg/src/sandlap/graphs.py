"""Random directed-graph ensembles and their Laplacians.

Two models: a bipartite digraph on parts of size n and floor(alpha*n)
with every crossing edge (both orientations, independently) present
with probability q, and an Erdos-Renyi digraph for comparison runs.
Laplacians follow the convention: off-diagonal entry (i, j) is the 0/1
indicator of edge i -> j, diagonal entry is minus the out-degree, so
every row sums to zero.  Vertex order puts all first-part vertices
before the second part.
"""

from __future__ import annotations

import math

import numpy as np

from .gflinalg import GfMatrix, is_prime
from .snf import IntMatrix

__all__ = [
    "BipartiteDigraph",
    "Digraph",
    "ModelParams",
    "laplacian",
    "laplacian_mod_p",
    "restrict",
    "sample_bipartite_digraph",
    "sample_er_digraph",
]


class ModelParams:
    """Parameters of one sampling run: sizes, edge density, prime, seed.

    alpha > 1/p is deliberately not enforced; sweeps below that
    threshold are a supported use, not an error.
    """

    __slots__ = ("n", "alpha", "q", "p", "seed")

    def __init__(self, n: int, alpha: float, q: float, p: int, seed: int):
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if not 0 < alpha <= 1:
            raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
        if not 0 < q < 1:
            raise ValueError(f"q must lie in (0, 1), got {q}")
        if not is_prime(p) or p >= (1 << 16):
            raise ValueError(f"p must be a prime below 2**16, got {p}")
        if not 0 <= seed < (1 << 64):
            raise ValueError(f"seed must fit in 64 bits, got {seed}")
        if math.floor(alpha * n) < 1:
            raise ValueError(
                f"floor(alpha * n) = {math.floor(alpha * n)} leaves the second part empty"
            )
        self.n = int(n)
        self.alpha = float(alpha)
        self.q = float(q)
        self.p = int(p)
        self.seed = int(seed)

    @property
    def m(self) -> int:
        """Size of the second part, floor(alpha * n)."""
        return math.floor(self.alpha * self.n)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "q": self.q,
            "p": self.p,
            "seed": self.seed,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "ModelParams":
        return cls(n=d["n"], alpha=d["alpha"], q=d["q"], p=d["p"], seed=d["seed"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return (self.n, self.alpha, self.q, self.p, self.seed) == (
            other.n,
            other.alpha,
            other.q,
            other.p,
            other.seed,
        )

    def __repr__(self) -> str:
        return (
            f"ModelParams(n={self.n}, alpha={self.alpha}, q={self.q}, "
            f"p={self.p}, seed={self.seed})"
        )


def _indicator_array(entries, rows: int, cols: int, what: str) -> np.ndarray:
    arr = np.asarray(entries, dtype=np.int64)
    if arr.shape != (rows, cols):
        raise ValueError(f"{what} must have shape {(rows, cols)}, got {arr.shape}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise ValueError(f"{what} entries must be 0 or 1")
    out = arr.astype(np.uint8)
    out.flags.writeable = False
    return out


class BipartiteDigraph:
    """Directed bipartite graph given by crossing-edge indicator blocks."""

    __slots__ = ("n", "m", "edges_12", "edges_21")

    def __init__(self, n: int, m: int, edges_12, edges_21):
        if n < 1 or m < 1:
            raise ValueError(f"both parts must be nonempty, got n={n}, m={m}")
        self.n = int(n)
        self.m = int(m)
        self.edges_12 = _indicator_array(edges_12, n, m, "edges_12")
        self.edges_21 = _indicator_array(edges_21, m, n, "edges_21")

    @property
    def order(self) -> int:
        return self.n + self.m

    @property
    def edge_count(self) -> int:
        return int(self.edges_12.sum()) + int(self.edges_21.sum())

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "edges_12": self.edges_12.tolist(),
            "edges_21": self.edges_21.tolist(),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "BipartiteDigraph":
        return cls(d["n"], d["m"], d["edges_12"], d["edges_21"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, BipartiteDigraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and np.array_equal(self.edges_12, other.edges_12)
            and np.array_equal(self.edges_21, other.edges_21)
        )

    def __repr__(self) -> str:
        return f"BipartiteDigraph(n={self.n}, m={self.m}, edges={self.edge_count})"


class Digraph:
    """Simple directed graph as a 0/1 adjacency matrix with zero diagonal."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, adj):
        if n < 1:
            raise ValueError(f"vertex count must be positive, got {n}")
        self.n = int(n)
        self.adj = _indicator_array(adj, n, n, "adj")
        if np.diagonal(self.adj).any():
            raise ValueError("adjacency diagonal must be zero (no self-loops)")

    @property
    def order(self) -> int:
        return self.n

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum())

    def to_json_dict(self) -> dict:
        return {"n": self.n, "adj": self.adj.tolist()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "Digraph":
        return cls(d["n"], d["adj"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.adj, other.adj)

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, edges={self.edge_count})"


def sample_bipartite_digraph(
    params: ModelParams, rng: np.random.Generator
) -> BipartiteDigraph:
    """Draw each of the 2*n*m crossing edges independently with probability q.

    The rng is single-owner; the draw order (first-to-second block, then
    second-to-first) is part of the reproducibility contract.
    """
    n, m, q = params.n, params.m, params.q
    edges_12 = (rng.random((n, m)) < q).astype(np.uint8)
    edges_21 = (rng.random((m, n)) < q).astype(np.uint8)
    return BipartiteDigraph(n, m, edges_12, edges_21)


def sample_er_digraph(n: int, q: float, rng: np.random.Generator) -> Digraph:
    """Erdos-Renyi digraph: each ordered pair an edge with probability q."""
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    adj = (rng.random((n, n)) < q).astype(np.uint8)
    np.fill_diagonal(adj, 0)
    return Digraph(n, adj)


def _adjacency(g: BipartiteDigraph | Digraph) -> np.ndarray:
    """Full square 0/1 adjacency with zero diagonal, int64."""
    if isinstance(g, BipartiteDigraph):
        full = np.zeros((g.order, g.order), dtype=np.int64)
        full[: g.n, g.n:] = g.edges_12
        full[g.n:, : g.n] = g.edges_21
        return full
    if isinstance(g, Digraph):
        return g.adj.astype(np.int64)
    raise TypeError(f"expected a graph, got {type(g).__name__}")


def _laplacian_array(g: BipartiteDigraph | Digraph) -> np.ndarray:
    lap = _adjacency(g)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return lap


def laplacian(g: BipartiteDigraph | Digraph) -> IntMatrix:
    """Integer Laplacian: indicators off the diagonal, minus out-degree on it."""
    return IntMatrix(_laplacian_array(g).tolist())


def laplacian_mod_p(g: BipartiteDigraph | Digraph, p: int) -> GfMatrix:
    """Laplacian with entries reduced into [0, p); rows sum to 0 mod p."""
    return GfMatrix(p, _laplacian_array(g) % p)


def restrict(m: GfMatrix, row_set, col_set) -> GfMatrix:
    """Submatrix on the given strictly increasing row and column indices."""
    rows = [int(i) for i in row_set]
    cols = [int(j) for j in col_set]
    for name, idx, bound in (("row", rows, m.rows), ("column", cols, m.cols)):
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"{name} indices must be strictly increasing")
        if idx and not (0 <= idx[0] and idx[-1] < bound):
            raise ValueError(f"{name} indices out of range for {bound}")
    sub = m.data[np.ix_(rows, cols)] if rows and cols else np.zeros(
        (len(rows), len(cols)), dtype=np.int64
    )
    return GfMatrix(m.p, sub)
