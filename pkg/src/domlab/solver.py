"""Exact domination predicates, an exact branch-and-bound solver for the
domination number, and exhaustive dominating-set counting for oracle use.

Vertex sets are plain int bitmasks over the vertex positions.  The solver
works on the set-cover view: the universe is the vertex set and the
available covers are the closed neighbourhoods N[v].
"""

from __future__ import annotations

import math

from .errors import CapacityError, ValidationError
from .graphs import Graph

# Bitmask ops stay cheap while rows fit in a couple of machine words.
DEFAULT_SOLVER_CAP = 128
DEFAULT_WORK_CAP = 10**8


def _closed_rows(G: Graph) -> list[int]:
    return [G.rows[v] | (1 << v) for v in range(G.n)]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def is_dominating(G: Graph, S: int) -> bool:
    """True iff every vertex outside S has a neighbour in S (members of S
    dominate themselves)."""
    cover = S
    for v in _bits(S):
        cover |= G.rows[v]
    return cover == (1 << G.n) - 1


def mutually_dominate(G: Graph, A: int, B: int) -> bool:
    """True iff every vertex of B\\A has a neighbour in A and every vertex of
    A\\B has a neighbour in B."""
    for v in _bits(A & ~B):
        if G.rows[v] & B == 0:
            return False
    for v in _bits(B & ~A):
        if G.rows[v] & A == 0:
            return False
    return True


def greedy_dominating_set(G: Graph) -> int:
    """Greedy cover: repeatedly take the vertex covering the most uncovered
    vertices (smallest index on ties).  Returns the chosen set as a bitmask."""
    full = (1 << G.n) - 1
    closed = _closed_rows(G)
    covered = 0
    chosen = 0
    while covered != full:
        best_v, best_c = -1, -1
        for v in range(G.n):
            c = (closed[v] & ~covered).bit_count()
            if c > best_c:
                best_c, best_v = c, v
        covered |= closed[best_v]
        chosen |= 1 << best_v
    return chosen


def domination_number(
    G: Graph,
    upper_hint: int | None = None,
    *,
    solver_cap: int = DEFAULT_SOLVER_CAP,
) -> int:
    """Exact domination number via branch and bound on the set-cover view.

    Branches on an uncovered vertex with the fewest allowed dominators
    (smallest index on ties); candidates are its closed neighbourhood.
    Already-tried candidates are banned in later branches of the same node,
    which keeps every dominating set reachable exactly once.  Pruning uses
    the admissible cover bound: with k picks left, the k largest per-vertex
    coverages of the uncovered set must reach its size.

    With ``upper_hint`` the search is cut off above the hint; the result is
    exact whenever it is <= upper_hint, otherwise it only certifies that
    the true value exceeds the hint.
    """
    if G.n < 1:
        raise ValidationError("domination number needs n >= 1")
    if G.n > solver_cap:
        raise CapacityError(
            f"n={G.n} exceeds solver cap {solver_cap}", reason="capacity:solver"
        )
    full = (1 << G.n) - 1
    closed = _closed_rows(G)
    best = greedy_dominating_set(G).bit_count()
    if upper_hint is not None and upper_hint + 1 < best:
        best = upper_hint + 1

    def descend(covered: int, banned: int, chosen: int) -> None:
        nonlocal best
        if covered == full:
            if chosen < best:
                best = chosen
            return
        if chosen + 1 >= best:
            return
        uncovered = full & ~covered
        # branch vertex: fewest allowed dominators, smallest index on ties
        branch_cands = -1
        branch_count = G.n + 1
        for w in _bits(uncovered):
            cands = closed[w] & ~banned
            c = cands.bit_count()
            if c < branch_count:
                branch_count, branch_cands = c, cands
                if c == 0:
                    return
        # admissible lower bound: k-step lookahead over coverage sizes
        coverages = sorted(
            (
                (closed[v] & uncovered).bit_count()
                for v in _bits(full & ~banned)
            ),
            reverse=True,
        )
        need = uncovered.bit_count()
        picks, reach = 0, 0
        for c in coverages:
            if c == 0 or reach >= need:
                break
            reach += c
            picks += 1
        if reach < need or chosen + picks >= best:
            return
        # candidate order: coverage descending, smaller index on ties
        order = sorted(
            _bits(branch_cands),
            key=lambda v: (-(closed[v] & uncovered).bit_count(), v),
        )
        newly_banned = banned
        for v in order:
            descend(covered | closed[v], newly_banned | (1 << v), chosen + 1)
            newly_banned |= 1 << v

    descend(0, 0, 0)
    return best


def count_dominating_sets(
    G: Graph, r: int, work_cap: int = DEFAULT_WORK_CAP
) -> int:
    """Exact number of r-subsets S with is_dominating(G, S).

    Enumerates C(n,r) subsets with two exact shortcuts: a branch whose
    partial union already covers everything contributes a closed-form count,
    and a branch that cannot cover the rest is dropped whole.
    """
    if not 0 <= r <= G.n:
        raise ValidationError(f"need 0 <= r <= n, got r={r}")
    if math.comb(G.n, r) > work_cap:
        raise CapacityError(
            f"C({G.n},{r}) exceeds work cap {work_cap}", reason="capacity:work"
        )
    n = G.n
    full = (1 << n) - 1
    closed = _closed_rows(G)
    # suffix[i]: union of closed neighbourhoods of vertices i..n-1
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] | closed[i]

    def count(start: int, left: int, cover: int) -> int:
        if cover == full:
            return math.comb(n - start, left)
        if left == 0 or cover | suffix[start] != full:
            return 0
        total = 0
        # keep enough tail vertices to fill the subset
        for v in range(start, n - left + 1):
            total += count(v + 1, left - 1, cover | closed[v])
        return total

    return count(0, r, 0)
