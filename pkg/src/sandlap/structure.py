"""Exact diagnostics for structured Laplacian rows.

The row law here is X = (x_1, ..., x_n, 0, ..., -sum x_i, 0, ..., 0):
n iid Bernoulli(q) coordinates up front, one coordinate carrying minus
their sum, zeros elsewhere.  Everything in this module is either an
exact computation (dynamic programs, brute-force enumeration) or an
explicitly empirical checker that takes its own rng; nothing here is a
Monte Carlo estimate unless the name says so.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .gflinalg import GfMatrix, GfVector, is_prime, nullspace_basis, rank_and_corank

__all__ = [
    "LaplacianRowLaw",
    "MinEntropyEstimate",
    "OdlyzkoCheck",
    "check_odlyzko_empirically",
    "min_entropy_estimate",
    "min_nonconstant_support",
    "odlyzko_bound",
    "rho_L",
    "subspace_hit_prob_bruteforce",
    "zero_sum_prob",
]

_BRUTEFORCE_MAX_N = 20


@dataclass(frozen=True)
class LaplacianRowLaw:
    """Distribution of one structured row.

    Coordinates 0..n-1 are iid Bernoulli(q); the coordinate at
    neg_sum_index (0-based, strictly past the iid block) carries minus
    their sum mod p; all remaining coordinates are zero.
    """

    n: int
    total_dim: int
    neg_sum_index: int
    q: float
    p: int

    def __post_init__(self):
        if not 0 < self.n < self.total_dim:
            raise ValueError(
                f"need 0 < n < total_dim, got n={self.n}, total_dim={self.total_dim}"
            )
        if not self.n <= self.neg_sum_index < self.total_dim:
            raise ValueError(
                f"neg_sum_index must lie in [{self.n}, {self.total_dim}), "
                f"got {self.neg_sum_index}"
            )
        if not 0 < self.q < 1:
            raise ValueError(f"q must lie in (0, 1), got {self.q}")
        if not is_prime(self.p):
            raise ValueError(f"p must be prime, got {self.p}")


def rho_L(w: GfVector, law: LaplacianRowLaw) -> float:
    """sup over a of |P(X . w = a) - 1/p|, computed exactly.

    Dynamic program over the joint distribution of the pair (partial
    dot product, partial iid sum) mod p: p^2 states, one step per iid
    coordinate.  Tracking the pair is what makes the -sum coordinate
    exact; only at the end is the dot product corrected by
    -sum * w[neg_sum_index], which is the proof's shift reduction
    applied in one move.
    """
    if len(w) != law.total_dim or w.p != law.p:
        raise ValueError(
            f"vector of length {len(w)} mod {w.p} against law with "
            f"total_dim={law.total_dim}, p={law.p}"
        )
    p, q = law.p, law.q
    idx = np.arange(p)
    state = np.zeros((p, p))
    state[0, 0] = 1.0
    for i in range(law.n):
        v = int(w.data[i])
        shifted = state[np.ix_((idx - v) % p, (idx - 1) % p)]
        state = (1.0 - q) * state + q * shifted
    wj = int(w.data[law.neg_sum_index])
    out = np.zeros(p)
    for s in range(p):
        np.add.at(out, (idx - s * wj) % p, state[:, s])
    return float(np.abs(out - 1.0 / p).max())


def min_nonconstant_support(w: GfVector, n: int) -> int:
    """min over a in F_p of #{i < n : w_i != a}.

    Equals n minus the largest residue multiplicity in the window; 0
    exactly when the window is constant.
    """
    if not 0 <= n <= len(w):
        raise ValueError(f"window n={n} outside vector of length {len(w)}")
    if n == 0:
        return 0
    counts = np.bincount(w.data[:n], minlength=w.p)
    return n - int(counts.max())


def zero_sum_prob(n: int, q: float, p: int) -> float:
    """Exact P(x_1 + ... + x_n = 0 mod p) for iid Bernoulli(q) terms."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    dist = np.zeros(p)
    dist[0] = 1.0
    for _ in range(n):
        dist = (1.0 - q) * dist + q * np.roll(dist, 1)
    return float(dist[0])


def odlyzko_bound(beta: float, codim: int) -> float:
    """(1 - beta)^codim: hit probability cap for a min-entropy-beta vector."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    if codim < 0:
        raise ValueError(f"codim must be nonnegative, got {codim}")
    return (1.0 - beta) ** codim


@dataclass(frozen=True)
class OdlyzkoCheck:
    """Empirical subspace-hit frequency next to its analytic cap."""

    frequency: float
    bound: float
    sigma_hat: float
    codim: int
    trials: int

    @property
    def passed(self) -> bool:
        return self.frequency <= self.bound + 4.0 * self.sigma_hat


def check_odlyzko_empirically(
    sample_fn,
    normals: GfMatrix,
    beta: float,
    trials: int,
    rng: np.random.Generator,
) -> OdlyzkoCheck:
    """Sample vectors and compare their hit rate into ker(normals) to the cap.

    sample_fn(rng) must return a length-cols residue array whose
    coordinates have min-entropy beta; the subspace is the common
    kernel of the normal rows, so its codimension is their rank.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    codim = rank_and_corank(normals)[0]
    p = normals.p
    hits = 0
    for _ in range(trials):
        v = np.asarray(sample_fn(rng), dtype=np.int64)
        if v.shape != (normals.cols,):
            raise ValueError(
                f"sample of shape {v.shape} against {normals.cols} columns"
            )
        if not ((normals.data @ v) % p).any():
            hits += 1
    freq = hits / trials
    sigma = math.sqrt(max(freq * (1.0 - freq), 1.0 / trials) / trials)
    return OdlyzkoCheck(
        frequency=freq,
        bound=odlyzko_bound(beta, codim),
        sigma_hat=sigma,
        codim=codim,
        trials=trials,
    )


def subspace_hit_prob_bruteforce(h_basis: GfMatrix, law: LaplacianRowLaw) -> float:
    """Exact P(X in H) by enumerating all 2^n Bernoulli supports.

    H is the row span of h_basis; membership is tested against a basis
    of its orthogonal complement, so each support costs one small
    matrix product.  The deviation target |P - p^(1-d)| for codimension
    d is meaningful when the all-ones vector lies in H; the enumeration
    itself does not require that.
    """
    if h_basis.p != law.p or h_basis.cols != law.total_dim:
        raise ValueError(
            f"basis is {h_basis.cols} wide mod {h_basis.p}, law wants "
            f"{law.total_dim} mod {law.p}"
        )
    if law.n > _BRUTEFORCE_MAX_N:
        raise ValueError(
            f"law.n={law.n} exceeds the enumeration cap {_BRUTEFORCE_MAX_N}"
        )
    kernel = nullspace_basis(h_basis)
    if not kernel:
        return 1.0
    normals = np.stack([v.data for v in kernel])
    p, q, n = law.p, law.q, law.n
    iid_cols = normals[:, :n]
    neg_col = normals[:, law.neg_sum_index]
    total = 0.0
    step = 1 << 14
    count = 1 << n
    exponents = np.arange(n, dtype=np.uint32)
    for lo in range(0, count, step):
        codes = np.arange(lo, min(lo + step, count), dtype=np.uint32)
        bits = (codes[:, None] >> exponents) & 1
        popcount = bits.sum(axis=1)
        dots = (bits @ iid_cols.T - popcount[:, None] * neg_col) % p
        hit = ~dots.any(axis=1)
        if hit.any():
            weights = q ** popcount[hit] * (1.0 - q) ** (n - popcount[hit])
            total += float(weights.sum())
    return total


@dataclass(frozen=True)
class MinEntropyEstimate:
    """Worst observed conditional mode frequency, reported as 1 - freq."""

    beta_hat: float
    ci_half_width: float
    worst_context: object
    trials: int


def min_entropy_estimate(
    sample_fn, trials: int, rng: np.random.Generator, z: float = 1.96
) -> MinEntropyEstimate:
    """Empirical min-entropy of a value under caller-chosen conditioning.

    sample_fn(rng) returns (value, context); draws are grouped by
    context and the mode frequency is taken within each group.  The
    estimate is 1 minus the worst mode frequency, with a normal
    half-width from the worst group.  Sanity harness only: contexts
    observed a handful of times make the estimate noisy, and the caller
    controls that by fixing the conditioning inside sample_fn.
    """
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    groups: dict[object, Counter] = defaultdict(Counter)
    for _ in range(trials):
        value, context = sample_fn(rng)
        groups[context][value] += 1
    worst_freq = -1.0
    worst_context = None
    worst_size = 0
    for context, counts in groups.items():
        size = sum(counts.values())
        freq = max(counts.values()) / size
        if freq > worst_freq:
            worst_freq = freq
            worst_context = context
            worst_size = size
    half = z * math.sqrt(max(worst_freq * (1.0 - worst_freq), 1.0 / worst_size) / worst_size)
    return MinEntropyEstimate(
        beta_hat=1.0 - worst_freq,
        ci_half_width=half,
        worst_context=worst_context,
        trials=trials,
    )
