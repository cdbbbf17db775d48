"""Dense linear algebra over Z/pZ for small primes p.

Rank, corank, nullspace and row-span membership via Gaussian elimination
with deterministic pivoting (first nonzero entry in column order, rows
top-down).  For p = 2 the elimination kernels run on bit-packed rows
(one Python int per row, word-wide XOR); all other primes use vectorized
numpy row operations.  Both sit behind the same interface.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

__all__ = [
    "GfMatrix",
    "GfVector",
    "RankTracker",
    "RowSpan",
    "in_row_span",
    "is_prime",
    "nullspace_basis",
    "rank_and_corank",
    "rank_of_residue_array",
]

MAX_PRIME = 1 << 16


@lru_cache(maxsize=None)
def is_prime(p: int) -> bool:
    """Primality by trial division; intended for moduli below 2**16."""
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def _check_modulus(p: int) -> None:
    if not isinstance(p, (int, np.integer)):
        raise TypeError(f"modulus must be an integer, got {type(p).__name__}")
    if not 2 <= p < MAX_PRIME:
        raise ValueError(f"modulus must satisfy 2 <= p < 2**16, got {p}")
    if not is_prime(int(p)):
        raise ValueError(f"modulus must be prime, got {p}")


def _as_residues(entries, p: int, ndim: int) -> np.ndarray:
    arr = np.asarray(entries)
    if arr.dtype == object or not np.issubdtype(arr.dtype, np.integer):
        if arr.size and not np.issubdtype(arr.dtype, np.integer):
            raise TypeError("entries must be integers")
        arr = arr.astype(np.int64)
    arr = arr.astype(np.int64, copy=True)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {arr.shape}")
    if arr.size and ((arr < 0).any() or (arr >= p).any()):
        raise ValueError(f"entries must lie in [0, {p})")
    arr.flags.writeable = False
    return arr


class GfVector:
    """Immutable vector of residues mod a prime p."""

    __slots__ = ("p", "_data")

    def __init__(self, p: int, entries):
        _check_modulus(p)
        self.p = int(p)
        self._data = _as_residues(entries, self.p, ndim=1)

    @property
    def data(self) -> np.ndarray:
        """Read-only int64 view of the entries."""
        return self._data

    def __len__(self) -> int:
        return self._data.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, GfVector):
            return NotImplemented
        return self.p == other.p and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self.p, self._data.tobytes()))

    def tolist(self) -> list[int]:
        return self._data.tolist()

    def __repr__(self) -> str:
        return f"GfVector(p={self.p}, {self.tolist()})"


class GfMatrix:
    """Immutable dense matrix of residues mod a prime p.

    Entries are stored row-major as int64; callers never observe
    mutation (elimination always works on internal copies).
    """

    __slots__ = ("p", "_data")

    def __init__(self, p: int, entries):
        _check_modulus(p)
        self.p = int(p)
        self._data = _as_residues(entries, self.p, ndim=2)

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "GfMatrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "GfMatrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @classmethod
    def from_flat(cls, p: int, rows: int, cols: int, entries) -> "GfMatrix":
        arr = np.asarray(entries, dtype=np.int64)
        if arr.size != rows * cols:
            raise ValueError(
                f"expected {rows * cols} entries for a {rows}x{cols} matrix, got {arr.size}"
            )
        return cls(p, arr.reshape(rows, cols))

    @property
    def data(self) -> np.ndarray:
        """Read-only int64 view, shape (rows, cols)."""
        return self._data

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    def row(self, i: int) -> GfVector:
        return GfVector(self.p, self._data[i])

    def transpose(self) -> "GfMatrix":
        return GfMatrix(self.p, self._data.T)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GfMatrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self._data, other._data)

    def __hash__(self):
        return hash((self.p, self._data.shape, self._data.tobytes()))

    def tolists(self) -> list[list[int]]:
        return self._data.tolist()

    def __repr__(self) -> str:
        return f"GfMatrix(p={self.p}, {self.rows}x{self.cols})"


# ---------------------------------------------------------------------------
# elimination kernels
# ---------------------------------------------------------------------------

def _work_dtype(p: int):
    # intermediates are bounded by p**2 in magnitude before reduction
    if p * p < (1 << 15):
        return np.int16
    if p * p < (1 << 31):
        return np.int32
    return np.int64


def _echelon(data: np.ndarray, p: int, reduced: bool = False):
    """Row echelon form with pivots normalized to 1.

    Returns (work, pivots) where pivots lists the pivot columns in
    order; row i of work has its leading 1 in column pivots[i].  With
    reduced=True entries above each pivot are cleared as well (RREF,
    which is unique, hence deterministic output).
    """
    work = data.astype(_work_dtype(p), copy=True)
    rows, cols = work.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(work[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            work[[r, pr]] = work[[pr, r]]
        piv = int(work[r, c])
        if piv != 1:
            work[r] = (work[r] * pow(piv, p - 2, p)) % p
        below = np.nonzero(work[r + 1:, c])[0]
        targets = r + 1 + below
        if reduced:
            above = np.nonzero(work[:r, c])[0]
            if above.size:
                targets = np.concatenate([above, targets])
        if targets.size:
            sub = work[targets]
            sub -= sub[:, c][:, None] * work[r]
            sub %= p
            work[targets] = sub
        pivots.append(c)
        r += 1
    return work, pivots


def _pack_rows(data: np.ndarray) -> list[int]:
    """Pack 0/1 rows into Python ints; bit k of a row word is column k."""
    rows, cols = data.shape
    if cols == 0 or rows == 0:
        return [0] * rows
    packed = np.packbits(data.astype(np.uint8, copy=False), axis=1, bitorder="little")
    width = packed.shape[1]
    buf = packed.tobytes()
    return [int.from_bytes(buf[i * width:(i + 1) * width], "little") for i in range(rows)]


def _gf2_insert(basis: dict[int, int], word: int) -> bool:
    """Reduce word against the echelon basis; insert the remainder.

    Returns True if the word was independent (rank grew).  Pivots are
    lowest set bits, i.e. first nonzero entries in column order.
    """
    while word:
        c = (word & -word).bit_length() - 1
        row = basis.get(c)
        if row is None:
            basis[c] = word
            return True
        word ^= row
    return False


def _gf2_rank(words: list[int]) -> int:
    basis: dict[int, int] = {}
    for w in words:
        _gf2_insert(basis, w)
    return len(basis)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def rank_and_corank(m: GfMatrix) -> tuple[int, int]:
    """Rank and right-nullspace dimension of m over F_p.

    Always satisfies rank + corank == m.cols; the input is not
    modified.
    """
    rank = rank_of_residue_array(m.p, m.data)
    return rank, m.cols - rank


def rank_of_residue_array(p: int, arr: np.ndarray) -> int:
    """Rank of a plain residue array; hot-path variant of rank_and_corank.

    Skips the GfMatrix validation copy; the caller guarantees entries
    already lie in [0, p) and p is prime.  The array is not modified.
    """
    if p == 2:
        return _gf2_rank(_pack_rows(arr))
    return len(_echelon(arr, p)[1])


def nullspace_basis(m: GfMatrix) -> list[GfVector]:
    """Canonical basis of the right nullspace {v : m v = 0}.

    The returned vectors, stacked as rows, are in reduced row echelon
    form, so the output is deterministic; their count equals the
    corank.
    """
    rref, pivots = _echelon(m.data, m.p, reduced=True)
    free = [c for c in range(m.cols) if c not in set(pivots)]
    if not free:
        return []
    kernel = np.zeros((len(free), m.cols), dtype=np.int64)
    for k, f in enumerate(free):
        kernel[k, f] = 1
        for i, c in enumerate(pivots):
            kernel[k, c] = (-int(rref[i, f])) % m.p
    canon, _ = _echelon(kernel, m.p, reduced=True)
    return [GfVector(m.p, canon[i].astype(np.int64)) for i in range(len(free))]


class RowSpan:
    """Row space of a matrix with O(rank * cols) membership tests."""

    def __init__(self, m: GfMatrix):
        self.p = m.p
        self.cols = m.cols
        if self.p == 2:
            self._basis: dict[int, int] = {}
            for w in _pack_rows(m.data):
                _gf2_insert(self._basis, w)
        else:
            ech, pivots = _echelon(m.data, m.p)
            self._ech = ech[: len(pivots)]
            self._pivots = pivots

    @property
    def rank(self) -> int:
        if self.p == 2:
            return len(self._basis)
        return len(self._pivots)

    def contains(self, v: GfVector) -> bool:
        if v.p != self.p or len(v) != self.cols:
            raise ValueError(
                f"vector of length {len(v)} mod {v.p} against span of width "
                f"{self.cols} mod {self.p}"
            )
        if self.p == 2:
            word = _pack_rows(v.data[None, :])[0]
            while word:
                c = (word & -word).bit_length() - 1
                row = self._basis.get(c)
                if row is None:
                    return False
                word ^= row
            return True
        vec = v.data.astype(_work_dtype(self.p), copy=True)
        for i, c in enumerate(self._pivots):
            if vec[c]:
                vec -= vec[c] * self._ech[i]
                vec %= self.p
        return not vec.any()


def in_row_span(m: GfMatrix, v: GfVector) -> bool:
    """True iff v is an F_p-linear combination of the rows of m."""
    return RowSpan(m).contains(v)


class RankTracker:
    """Incremental rank of a growing stack of rows.

    Maintains an echelon basis of the row space; each add_row is a
    single elimination pass against that basis.  Single-owner mutable:
    do not share a tracker across threads.
    """

    def __init__(self, initial: GfMatrix):
        self.p = initial.p
        self.cols = initial.cols
        self._bits: dict[int, int] = {}
        self._rows: list[np.ndarray] = []
        self._pivots: list[int] = []
        if self.p == 2:
            for w in _pack_rows(initial.data):
                _gf2_insert(self._bits, w)
        else:
            for i in range(initial.rows):
                self._absorb(initial.data[i])

    @property
    def rank(self) -> int:
        return len(self._bits) if self.p == 2 else len(self._pivots)

    @property
    def corank(self) -> int:
        """Codimension of the row space in F_p^cols."""
        return self.cols - self.rank

    def _absorb(self, row: np.ndarray) -> bool:
        vec = row.astype(_work_dtype(self.p), copy=True)
        while True:
            nz = np.nonzero(vec)[0]
            if nz.size == 0:
                return False
            c = int(nz[0])
            try:
                i = self._pivots.index(c)
            except ValueError:
                piv = int(vec[c])
                if piv != 1:
                    vec = (vec * pow(piv, self.p - 2, self.p)) % self.p
                self._pivots.append(c)
                self._rows.append(vec)
                return True
            vec -= vec[c] * self._rows[i]
            vec %= self.p

    def add_row(self, v: GfVector) -> tuple[bool, int]:
        """Add one row; returns (entered_span, corank of the new row space).

        entered_span is True when v already lay in the span of the rows
        seen so far.
        """
        if v.p != self.p or len(v) != self.cols:
            raise ValueError(
                f"row of length {len(v)} mod {v.p} added to tracker of width "
                f"{self.cols} mod {self.p}"
            )
        return self.add_row_array(v.data)

    def add_row_array(self, row: np.ndarray) -> tuple[bool, int]:
        """add_row on a plain residue array; skips the GfVector wrapper.

        Hot-path variant: the caller guarantees the entries lie in
        [0, p) and the length matches.
        """
        if self.p == 2:
            grew = _gf2_insert(self._bits, _pack_rows(row[None, :])[0])
        else:
            grew = self._absorb(row)
        return (not grew, self.corank)
