"""Independent reference implementations used to derive expected values.

Everything here is deliberately naive and shares no code path with the
package: determinants by permutation expansion, invariant factors by
determinantal divisors (gcds of k x k minors) and by chain-free
diagonal reduction.  Exponential cost, small inputs only.
"""

import itertools
import math
from collections import defaultdict


def perm_det(rows):
    """Determinant by summing over all permutations."""
    n = len(rows)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        inversions = sum(
            1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j]
        )
        term = 1 if inversions % 2 == 0 else -1
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


def minor_gcd(rows, k):
    """gcd of all k x k minors; 0 if they all vanish, 1 for k = 0."""
    if k == 0:
        return 1
    nrows, ncols = len(rows), len(rows[0])
    g = 0
    for rs in itertools.combinations(range(nrows), k):
        for cs in itertools.combinations(range(ncols), k):
            sub = [[rows[i][j] for j in cs] for i in rs]
            g = math.gcd(g, perm_det(sub))
            if g == 1:
                return 1
    return g


def factors_by_minor_gcds(rows):
    """Invariant factors via d_k = D_k / D_{k-1} on determinantal divisors.

    Returns (diag, free_rank) in the same convention as the package:
    positive factors in chain order, zeros counted separately.
    """
    limit = min(len(rows), len(rows[0]))
    divisors = [1]
    for k in range(1, limit + 1):
        d = minor_gcd(rows, k)
        if d == 0:
            break
        divisors.append(d)
    rank = len(divisors) - 1
    diag = tuple(divisors[k] // divisors[k - 1] for k in range(1, rank + 1))
    return diag, limit - rank


def _factorize(n):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def chain_from_diagonal(diagonal):
    """Canonical divisibility chain of the group sum of Z/d for d in diagonal.

    Zeros contribute free rank; returns (diag, free_rank).  Works by
    sorting p-adic valuations per prime, so it never performs the
    chain-enforcing matrix moves the package uses.
    """
    nonzero = sorted(abs(d) for d in diagonal if d)
    free = sum(1 for d in diagonal if d == 0)
    valuations = defaultdict(list)
    for d in nonzero:
        for q, e in _factorize(d):
            valuations[q].append(e)
    r = len(nonzero)
    chain = [1] * r
    for q, es in valuations.items():
        es.sort()
        for idx, e in enumerate(es):
            chain[r - len(es) + idx] *= q**e
    return tuple(chain), free


def reduce_to_diagonal(rows):
    """Diagonalize by elementary row/column moves, no chain enforcement.

    Gausses each pivot position with repeated subtraction (Euclid on
    entries) and returns the resulting diagonal as a list, zeros
    included up to min(rows, cols).
    """
    a = [[int(x) for x in row] for row in rows]
    nrows = len(a)
    ncols = len(a[0]) if a else 0
    diag = []
    t = 0
    while t < min(nrows, ncols):
        pivot_pos = None
        best = None
        for i in range(t, nrows):
            for j in range(t, ncols):
                if a[i][j] and (best is None or abs(a[i][j]) < best):
                    best = abs(a[i][j])
                    pivot_pos = (i, j)
        if pivot_pos is None:
            break
        while True:
            i0, j0 = pivot_pos
            a[t], a[i0] = a[i0], a[t]
            for row in a:
                row[t], row[j0] = row[j0], row[t]
            piv = a[t][t]
            dirty = False
            for i in range(t + 1, nrows):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, ncols):
                q = a[t][j] // piv
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    dirty = True
            if not dirty:
                break
            pivot_pos = None
            best = None
            for i in range(t, nrows):
                for j in range(t, ncols):
                    if a[i][j] and (best is None or abs(a[i][j]) < best):
                        best = abs(a[i][j])
                        pivot_pos = (i, j)
        diag.append(abs(a[t][t]))
        t += 1
    while len(diag) < min(nrows, ncols):
        diag.append(0)
    return diag


def cokernel_factors_naive(rows):
    """Invariant factors via diagonal reduction plus valuation sorting."""
    return chain_from_diagonal(reduce_to_diagonal(rows))


def complete_digraph_laplacian(n):
    """Laplacian of the digraph with both arcs between every vertex pair."""
    return [[n - 1 if i == j else -1 for j in range(n)] for i in range(n)]
