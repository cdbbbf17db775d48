"""Smith normal form over the integers and sandpile-group invariants.

Exact arbitrary-precision arithmetic throughout: entries live in numpy
object arrays holding Python ints, so nothing ever overflows.  Pivots
are chosen by minimal absolute value to damp entry growth.  This is the
offline verification path; the Monte Carlo hot loop only ever needs
corank mod p and never calls into here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "IntMatrix",
    "InvariantFactors",
    "SmithNormalForm",
    "determinant",
    "p_rank",
    "sandpile_invariants",
    "smith_normal_form",
]


def _to_object_array(entries, rows: int | None = None, cols: int | None = None):
    mat = [[int(x) for x in row] for row in entries]
    r = len(mat)
    c = len(mat[0]) if mat else (cols or 0)
    if any(len(row) != c for row in mat):
        raise ValueError("rows must all have the same length")
    if rows is not None and r != rows:
        raise ValueError(f"expected {rows} rows, got {r}")
    if cols is not None and c != cols:
        raise ValueError(f"expected {cols} columns, got {c}")
    arr = np.empty((r, c), dtype=object)
    for i, row in enumerate(mat):
        for j, x in enumerate(row):
            arr[i, j] = x
    return arr


class IntMatrix:
    """Immutable integer matrix with arbitrary-precision entries."""

    __slots__ = ("_data",)

    def __init__(self, entries):
        arr = _to_object_array(entries)
        arr.flags.writeable = False
        self._data = arr

    @classmethod
    def from_flat(cls, rows: int, cols: int, entries) -> "IntMatrix":
        flat = [int(x) for x in entries]
        if len(flat) != rows * cols:
            raise ValueError(
                f"expected {rows * cols} entries for a {rows}x{cols} matrix, "
                f"got {len(flat)}"
            )
        return cls([flat[i * cols:(i + 1) * cols] for i in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, entries) -> "IntMatrix":
        ents = [int(x) for x in entries]
        n = len(ents)
        return cls([[ents[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @property
    def data(self) -> np.ndarray:
        """Read-only object-dtype view of the entries."""
        return self._data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    def tolists(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self._data]

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}"
            )
        return IntMatrix(self._data @ other._data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._data.shape == other._data.shape and bool(
            (self._data == other._data).all()
        )

    def __hash__(self):
        return hash((self._data.shape, tuple(int(x) for x in self._data.flat)))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True)
class InvariantFactors:
    """Diagonal of a Smith normal form.

    diag lists the positive invariant factors d_1 | d_2 | ... | d_r;
    free_rank counts the zero factors that follow them.
    """

    diag: tuple[int, ...]
    free_rank: int = 0

    def __post_init__(self):
        if any(d < 1 for d in self.diag):
            raise ValueError("listed invariant factors must be positive")
        for a, b in zip(self.diag, self.diag[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken: {a} does not divide {b}")
        if self.free_rank < 0:
            raise ValueError("free_rank must be nonnegative")

    @property
    def rank(self) -> int:
        """Rank over Q, i.e. the number of nonzero factors."""
        return len(self.diag)

    @property
    def torsion(self) -> tuple[int, ...]:
        """Factors greater than 1; the cyclic decomposition of the torsion part."""
        return tuple(d for d in self.diag if d > 1)

    @property
    def degenerate(self) -> bool:
        """True when free rank remains after the expected quotient."""
        return self.free_rank > 0


class SmithNormalForm(NamedTuple):
    factors: InvariantFactors
    u: IntMatrix
    v: IntMatrix


def _min_nonzero(a: np.ndarray, t: int) -> tuple[int, int] | None:
    """Position of a minimal-|value| nonzero entry of a[t:, t:], or None."""
    rows, cols = a.shape
    best = None
    best_abs = 0
    for i in range(t, rows):
        row = a[i]
        for j in range(t, cols):
            val = row[j]
            if val:
                mag = -val if val < 0 else val
                if best is None or mag < best_abs:
                    best = (i, j)
                    best_abs = mag
                    if mag == 1:
                        return best
    return best


def smith_normal_form(m: IntMatrix) -> SmithNormalForm:
    """Decompose m as u @ m @ v = diag(factors) with u, v unimodular.

    Returns the invariant factors (positive entries first, zeros counted
    in free_rank) together with the square transforms u (rows x rows)
    and v (cols x cols), each of determinant +-1.
    """
    rows, cols = m.rows, m.cols
    a = _to_object_array(m.tolists(), rows, cols) if rows else np.empty((0, cols), dtype=object)
    u = _to_object_array(IntMatrix.identity(rows).tolists()) if rows else np.empty((0, 0), dtype=object)
    v = _to_object_array(IntMatrix.identity(cols).tolists()) if cols else np.empty((0, 0), dtype=object)
    t = 0
    limit = min(rows, cols)
    while t < limit:
        if _min_nonzero(a, t) is None:
            break
        while True:
            i0, j0 = _min_nonzero(a, t)
            if i0 != t:
                a[[t, i0]] = a[[i0, t]]
                u[[t, i0]] = u[[i0, t]]
            if j0 != t:
                a[:, [t, j0]] = a[:, [j0, t]]
                v[:, [t, j0]] = v[:, [j0, t]]
            pivot = a[t, t]
            clean = True
            for i in range(t + 1, rows):
                if a[i, t]:
                    q = a[i, t] // pivot
                    if q:
                        a[i] = a[i] - q * a[t]
                        u[i] = u[i] - q * u[t]
                    if a[i, t]:
                        # remainder is strictly smaller than |pivot|; rescan
                        clean = False
            for j in range(t + 1, cols):
                if a[t, j]:
                    q = a[t, j] // pivot
                    if q:
                        a[:, j] = a[:, j] - q * a[:, t]
                        v[:, j] = v[:, j] - q * v[:, t]
                    if a[t, j]:
                        clean = False
            if not clean:
                continue
            # pivot is alone in its row and column; enforce the chain by
            # folding in any entry it does not divide and re-reducing
            violation = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if a[i, j] % pivot:
                        violation = i
                        break
                if violation is not None:
                    break
            if violation is None:
                break
            a[t] = a[t] + a[violation]
            u[t] = u[t] + u[violation]
        if a[t, t] < 0:
            a[t] = -a[t]
            u[t] = -u[t]
        t += 1
    factors = InvariantFactors(
        diag=tuple(int(a[i, i]) for i in range(t)), free_rank=limit - t
    )
    return SmithNormalForm(factors, IntMatrix(u), IntMatrix(v))


def determinant(m: IntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if m.rows != m.cols:
        raise ValueError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    if n == 0:
        return 1
    a = m.tolists()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exactness of this division is the Bareiss identity
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def sandpile_invariants(laplacian: IntMatrix) -> InvariantFactors:
    """Invariant factors of the sandpile group of a digraph Laplacian.

    The cokernel of a Laplacian always has free rank at least one
    (every row sums to zero); that guaranteed Z summand is removed.
    For the generic connected case the result has free_rank 0 and
    torsion gives the cyclic decomposition of the group; any leftover
    free rank is reported via degenerate rather than dropped.
    """
    bad = [i for i in range(laplacian.rows) if sum(laplacian.data[i]) != 0]
    if bad:
        raise ValueError(f"not a Laplacian: rows {bad} have nonzero sum")
    factors = smith_normal_form(laplacian).factors
    if factors.free_rank < 1:
        raise ValueError("Laplacian cokernel must have free rank at least 1")
    return InvariantFactors(diag=factors.diag, free_rank=factors.free_rank - 1)


def p_rank(factors: InvariantFactors, p: int) -> int:
    """Number of listed invariant factors divisible by the prime p."""
    if p < 2:
        raise ValueError(f"p must be at least 2, got {p}")
    return sum(1 for d in factors.diag if d % p == 0)
