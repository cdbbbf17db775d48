"""Shared matrix text format.

Header line "p rows cols", then one whitespace-separated line per row.
A header p of 0 marks an integer matrix (arbitrary precision); any
prime marks residues mod p.  Lines that are blank or start with '#'
are skipped, so files may carry comments.
"""

from __future__ import annotations

from .gflinalg import GfMatrix, GfVector, is_prime
from .snf import IntMatrix

__all__ = [
    "MatrixFormatError",
    "as_vector",
    "load_matrix",
    "read_matrix_text",
    "save_matrix",
    "write_matrix_text",
]


class MatrixFormatError(ValueError):
    """Raised with a line-numbered message when a matrix file is malformed."""


def write_matrix_text(m: GfMatrix | IntMatrix) -> str:
    if isinstance(m, GfMatrix):
        header = f"{m.p} {m.rows} {m.cols}"
        rows = m.tolists()
    elif isinstance(m, IntMatrix):
        header = f"0 {m.rows} {m.cols}"
        rows = m.tolists()
    else:
        raise TypeError(f"expected GfMatrix or IntMatrix, got {type(m).__name__}")
    lines = [header]
    lines.extend(" ".join(str(x) for x in row) for row in rows)
    return "\n".join(lines) + "\n"


def read_matrix_text(text: str) -> GfMatrix | IntMatrix:
    entries: list[tuple[int, list[int]]] = []
    header: tuple[int, int, int] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values = [int(tok) for tok in line.split()]
        except ValueError as exc:
            raise MatrixFormatError(f"line {lineno}: non-integer token ({exc})") from None
        if header is None:
            if len(values) != 3:
                raise MatrixFormatError(
                    f"line {lineno}: header must be 'p rows cols', got {len(values)} fields"
                )
            p, rows, cols = values
            if p != 0 and not is_prime(p):
                raise MatrixFormatError(f"line {lineno}: modulus {p} is neither 0 nor prime")
            if rows < 0 or cols < 0:
                raise MatrixFormatError(f"line {lineno}: negative dimensions {rows}x{cols}")
            header = (p, rows, cols)
            continue
        entries.append((lineno, values))
    if header is None:
        raise MatrixFormatError("empty input: missing 'p rows cols' header")
    p, rows, cols = header
    if len(entries) != rows:
        raise MatrixFormatError(f"expected {rows} rows, found {len(entries)}")
    data = []
    for lineno, values in entries:
        if len(values) != cols:
            raise MatrixFormatError(
                f"line {lineno}: expected {cols} entries, found {len(values)}"
            )
        data.append(values)
    if p == 0:
        return IntMatrix(data)
    try:
        return GfMatrix(p, data) if rows else GfMatrix.zeros(p, 0, cols)
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from None


def load_matrix(path) -> GfMatrix | IntMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return read_matrix_text(fh.read())


def save_matrix(m: GfMatrix | IntMatrix, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_matrix_text(m))


def as_vector(m: GfMatrix) -> GfVector:
    """Read a 1 x n (or n x 1) residue matrix as a vector."""
    if not isinstance(m, GfMatrix):
        raise TypeError(f"vectors must be residue matrices, got {type(m).__name__}")
    if m.rows == 1:
        return m.row(0)
    if m.cols == 1:
        return GfVector(m.p, m.data[:, 0])
    raise ValueError(f"a {m.rows}x{m.cols} matrix is not a vector")
