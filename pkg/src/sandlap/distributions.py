"""Limiting corank distributions as truncated infinite products.

Two closed forms are evaluated: the bipartite-Laplacian limit

    P(corank = 1 + k) = p^-(k^2+k) * prod_{i=k+2..inf}(1 - p^-i)
                                   / prod_{i=1..k}(1 - p^-i)

and the iid (n+u) x n limit

    P(corank = k) = p^-k(u+k) * prod_{i=k+1..inf}(1 - p^-i)
                              / prod_{i=1..k+u}(1 - p^-i).

The two agree at u = 1 after cancelling one factor.  Infinite products
are truncated at an index where the geometric tail bound says the
dropped factors multiply the result by something within tol of 1;
double precision is adequate for every tolerance used here (>= 1e-12).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .gflinalg import is_prime

__all__ = [
    "CorankPmf",
    "iid_pmf",
    "pmf_table",
    "q_product",
    "theorem_pmf",
]

_MASS_SLACK = 1e-6


@dataclass(frozen=True)
class CorankPmf:
    """Probability mass over corank values.

    kind is "theorem", "iid(u)" for the explicit u, or "empirical".
    For the theorem pmf the k-th term carries corank value 1 + k, so
    masses line up with measured corank histograms without shifting.
    """

    p: int
    kind: str
    mass: dict[int, float] = field(compare=False)
    truncation_error: float = 0.0

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")
        for corank, prob in self.mass.items():
            if corank < 0:
                raise ValueError(f"corank values must be nonnegative, got {corank}")
            if not 0.0 <= prob <= 1.0:
                raise ValueError(f"mass[{corank}] = {prob} outside [0, 1]")
        total = sum(self.mass.values())
        if total > 1.0 + _MASS_SLACK:
            raise ValueError(f"total mass {total} exceeds 1")

    @property
    def total_mass(self) -> float:
        return sum(self.mass.values())

    @classmethod
    def from_counts(cls, p: int, counts: dict[int, int]) -> "CorankPmf":
        """Empirical pmf from a corank histogram."""
        total = sum(counts.values())
        if total <= 0:
            raise ValueError("histogram is empty")
        mass = {int(k): c / total for k, c in sorted(counts.items())}
        return cls(p=p, kind="empirical", mass=mass, truncation_error=0.0)

    def support(self) -> list[int]:
        return sorted(self.mass)


def _check_prime_tol(p: int, tol: float) -> None:
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")


def q_product(p: int, start: int, tol: float = 1e-12) -> float:
    """Truncation of prod_{i=start..inf}(1 - p^-i) with tail within tol.

    The factors dropped beyond the truncation index I multiply the
    product by at least 1 - sum_{i>I} p^-i = 1 - p^-I/(p-1) > 1 - tol,
    so the returned value is within a factor (1 - tol, 1] of the true
    infinite product.
    """
    _check_prime_tol(p, tol)
    if start < 1:
        raise ValueError(f"start must be at least 1, got {start}")
    stop = 1
    while p ** float(-stop) >= tol * (p - 1):
        stop += 1
    out = 1.0
    for i in range(start, stop + 1):
        out *= 1.0 - p ** float(-i)
    return out


def _finite_product(p: int, upto: int) -> float:
    """prod_{i=1..upto}(1 - p^-i), exact number of factors."""
    out = 1.0
    for i in range(1, upto + 1):
        out *= 1.0 - p ** float(-i)
    return out


def theorem_pmf(p: int, k: int, tol: float = 1e-12) -> float:
    """Limiting P(corank = 1 + k) for the bipartite Laplacian mod p."""
    _check_prime_tol(p, tol)
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    lead = p ** float(-(k * k + k))
    return lead * q_product(p, k + 2, tol) / _finite_product(p, k)


def iid_pmf(p: int, u: int, k: int, tol: float = 1e-12) -> float:
    """Limiting P(corank = k) for an iid (n+u) x n matrix mod p.

    The closed form is p^-k(u+k) prod_{i=k+1..inf} / prod_{i=1..k+u};
    the factors for i in k+1..k+u appear in both products and are
    cancelled before truncating, which keeps wide-matrix values (large
    u) from drifting above 1 by the truncation tolerance.
    """
    _check_prime_tol(p, tol)
    if u < 0 or k < 0:
        raise ValueError(f"u and k must be nonnegative, got u={u}, k={k}")
    lead = p ** float(-k * (u + k))
    return lead * q_product(p, k + u + 1, tol) / _finite_product(p, k)


def pmf_table(
    p: int, kind: str, k_max: int, tol: float = 1e-12, u: int | None = None
) -> CorankPmf:
    """Tabulate k = 0..k_max of one of the limiting distributions.

    kind "theorem" stores term k under corank 1 + k; kind "iid"
    requires u and stores term k under corank k.  truncation_error
    records 1 minus the tabulated mass.
    """
    if k_max < 0:
        raise ValueError(f"k_max must be nonnegative, got {k_max}")
    if kind == "theorem":
        if u is not None:
            raise ValueError("u applies only to kind='iid'")
        mass = {1 + k: theorem_pmf(p, k, tol) for k in range(k_max + 1)}
        label = "theorem"
    elif kind == "iid":
        if u is None:
            raise ValueError("kind='iid' requires u")
        mass = {k: iid_pmf(p, u, k, tol) for k in range(k_max + 1)}
        label = f"iid({u})"
    else:
        raise ValueError(f"unknown kind {kind!r}; expected 'theorem' or 'iid'")
    return CorankPmf(
        p=p, kind=label, mass=mass, truncation_error=1.0 - sum(mass.values())
    )
