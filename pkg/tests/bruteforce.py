"""Independent enumeration oracles used by the tests.

Everything here is computed from first principles (explicit enumeration of
graphs or subsets, exact rational weights), deliberately sharing no code
path with the library's solvers and formulas.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations


def bipartite_no_isolated_brute(N: int, p: float) -> Fraction:
    """Pr(no isolated vertex in G(N,N,p)) by summing over all 2^(N*N)
    bipartite graphs with exact rational weights (p taken at its exact
    float value)."""
    pf = Fraction(p)
    qf = 1 - pf
    M = N * N
    total = Fraction(0)
    for mask in range(1 << M):
        rows = [0] * N
        for t in range(M):
            if mask >> t & 1:
                rows[t // N] |= 1 << (t % N)
        if all(rows):
            cols = 0
            for r in rows:
                cols |= r
            if cols == (1 << N) - 1:
                m = mask.bit_count()
                total += pf**m * qf ** (M - m)
    return total


def dominates(rows: list[int], n: int, members: tuple[int, ...]) -> bool:
    """Direct definition check: every vertex outside the set has a neighbour
    inside it."""
    inside = set(members)
    for v in range(n):
        if v in inside:
            continue
        if not any(rows[v] >> u & 1 for u in members):
            return False
    return True


def gamma_brute(rows: list[int], n: int) -> int:
    for r in range(n + 1):
        for members in combinations(range(n), r):
            if dominates(rows, n, members):
                return r
    raise AssertionError("the full vertex set always dominates")


def count_dominating_brute(rows: list[int], n: int, r: int) -> int:
    return sum(1 for members in combinations(range(n), r) if dominates(rows, n, members))


def graph_from_edge_mask(n: int, mask: int) -> list[int]:
    rows = [0] * n
    t = 0
    for u in range(n):
        for v in range(u + 1, n):
            if mask >> t & 1:
                rows[u] |= 1 << v
                rows[v] |= 1 << u
            t += 1
    return rows


def dom_count_moments(n: int) -> tuple[list[list[int]], list[list[int]]]:
    """Aggregate over all 2^C(n,2) graphs: counts[m][r] sums X_r and
    counts_sq[m][r] sums X_r^2 over the graphs with exactly m edges, where
    X_r is the number of dominating r-subsets.  Exact integers."""
    M = n * (n - 1) // 2
    counts = [[0] * (n + 1) for _ in range(M + 1)]
    counts_sq = [[0] * (n + 1) for _ in range(M + 1)]
    full = (1 << n) - 1
    popcount = [s.bit_count() for s in range(1 << n)]
    for mask in range(1 << M):
        rows = graph_from_edge_mask(n, mask)
        closed = [rows[v] | (1 << v) for v in range(n)]
        cover = [0] * (1 << n)
        per_r = [0] * (n + 1)
        if full == 0:
            per_r[0] += 1
        for subset in range(1, 1 << n):
            low = subset & -subset
            cover[subset] = cover[subset ^ low] | closed[low.bit_length() - 1]
            if cover[subset] == full:
                per_r[popcount[subset]] += 1
        m = mask.bit_count()
        for r in range(n + 1):
            counts[m][r] += per_r[r]
            counts_sq[m][r] += per_r[r] * per_r[r]
    return counts, counts_sq


def moments_at_p(
    counts: list[list[int]], counts_sq: list[list[int]], n: int, r: int, p: float
) -> tuple[Fraction, Fraction]:
    """(E X_r, Var X_r) as exact rationals of the float p."""
    pf = Fraction(p)
    qf = 1 - pf
    M = n * (n - 1) // 2
    ex = Fraction(0)
    ex2 = Fraction(0)
    for m in range(M + 1):
        weight = pf**m * qf ** (M - m)
        ex += counts[m][r] * weight
        ex2 += counts_sq[m][r] * weight
    return ex, ex2 - ex * ex


def mutual_dom_brute(r: int, s: int, p: float) -> Fraction:
    """Pr(two fixed r-sets with overlap s dominate each other) by enumerating
    every graph on their union (only pairs with at least one endpoint in the
    symmetric difference matter, but we stay fully literal here)."""
    span = 2 * r - s
    members_a = tuple(range(r))
    members_b = tuple(range(r - s, span))
    pf = Fraction(p)
    qf = 1 - pf
    M = span * (span - 1) // 2
    total = Fraction(0)
    set_a, set_b = set(members_a), set(members_b)
    for mask in range(1 << M):
        rows = graph_from_edge_mask(span, mask)
        ok = True
        for x in set_a - set_b:
            if not any(rows[x] >> y & 1 for y in members_b):
                ok = False
                break
        if ok:
            for y in set_b - set_a:
                if not any(rows[y] >> x & 1 for x in members_a):
                    ok = False
                    break
        if ok:
            total += pf ** mask.bit_count() * qf ** (M - mask.bit_count())
    return total


def rho_brute(n: int, p: float, r: int, s: int) -> Fraction:
    """Pr(two fixed r-sets with overlap s are both dominating in G(n,p)),
    by enumerating all 2^C(n,2) graphs."""
    members_a = tuple(range(r))
    members_b = tuple(range(r - s, 2 * r - s))
    pf = Fraction(p)
    qf = 1 - pf
    M = n * (n - 1) // 2
    total = Fraction(0)
    for mask in range(1 << M):
        rows = graph_from_edge_mask(n, mask)
        if dominates(rows, n, members_a) and dominates(rows, n, members_b):
            total += pf ** mask.bit_count() * qf ** (M - mask.bit_count())
    return total
