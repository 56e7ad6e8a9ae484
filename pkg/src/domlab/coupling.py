"""Constructive couplings of G(n,p) and G(n,q), the KL/Pinsker distance
chain behind them, and the anti-concentration probability grid.

The graph coupling is maximal at the edge-count level: (m1, m2) is drawn
from the maximal coupling of Bin(M,p) and Bin(M,q) over the M = C(n,2)
pairs, and both graphs are prefixes of one shared uniform pair permutation.
Conditioned on its edge count a binomial random graph is uniform, so the
marginals are exact, and Pr(g1 = g2) equals one minus the total variation
distance of the two edge-count laws.  A per-edge shared-uniform coupling
would only give an n^2-scale disagreement bound; the edge-count route gives
the n-scale bound that the distance chain below certifies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .errors import ValidationError
from .graphs import DEFAULT_N_CAP, Graph, RngStream, pair_from_index

DEFAULT_EPSILON = 0.25


def kl_bernoulli(p: float, q: float) -> float:
    """KL divergence (nats) between Bernoulli(p) and Bernoulli(q).

    Exact limits at p in {0,1}; a point mass of p outside q's support is
    reported as +inf rather than raised."""
    for name, value in (("p", p), ("q", q)):
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            raise ValidationError(f"{name}={value!r} outside [0,1]")
    if p == q:
        return 0.0
    if q in (0.0, 1.0):
        return math.inf
    if p == 0.0:
        return -math.log1p(-q)
    if p == 1.0:
        return -math.log(q)
    return p * math.log(p / q) + (1.0 - p) * math.log((1.0 - p) / (1.0 - q))


class TvChainBound(NamedTuple):
    kl_term: float
    pinsker_term: float
    final: float
    final_clamped: float


def tv_chain_bound(n: int, p: float, q: float) -> TvChainBound:
    """Distance chain for the edge-count coupling:

        d_TV(Bin(M,p), Bin(M,q)) <= sqrt(C(n,2)/2 * KL(p||q))
                                 <= n|p-q| / sqrt(4q(1-q)) =: final

    pinsker_term <= final always; final is clamped to [0,1] for reporting
    with the raw value kept alongside."""
    if n < 0:
        raise ValidationError("need n >= 0")
    if not 0.0 < q < 1.0:
        raise ValidationError("need 0 < q < 1")
    kl = kl_bernoulli(p, q)
    pinsker = math.sqrt(0.5 * math.comb(n, 2) * kl)
    final = n * abs(p - q) / math.sqrt(4.0 * q * (1.0 - q))
    return TvChainBound(kl, pinsker, final, min(1.0, final))


class _CouplingTable:
    """Precomputed pmf overlap tables for the maximal coupling of Bin(M,p)
    and Bin(M,q).  The residual parts have disjoint supports, so the two
    values differ whenever the residual branch is taken: Pr(x = y) equals
    the pmf overlap exactly."""

    def __init__(self, M: int, p: float, q: float):
        if M < 0:
            raise ValidationError("need M >= 0")
        self.M = M
        self.p = p
        self.q = q
        self.degenerate = p == q or M == 0
        fp = self._pmf(M, p)
        if not self.degenerate:
            fq = self._pmf(M, q)
            both = np.minimum(fp, fq)
            res_p = np.cumsum(fp - both)
            res_q = np.cumsum(fq - both)
            if res_p[-1] <= 0.0 or res_q[-1] <= 0.0:
                self.degenerate = True  # residual mass lost to rounding
            else:
                self.overlap = min(1.0, math.fsum(both.tolist()))  # compensated
                self.cum_min = np.cumsum(both)
                self.cum_res_p = res_p
                self.cum_res_q = res_q
        if self.degenerate:
            self.overlap = 1.0
            self.cum_p = np.cumsum(fp)

    @staticmethod
    def _pmf(M: int, p: float) -> np.ndarray:
        if math.isnan(p) or not 0.0 <= p <= 1.0:
            raise ValidationError(f"probability {p!r} outside [0,1]")
        out = np.zeros(M + 1)
        if p == 0.0:
            out[0] = 1.0
        elif p == 1.0:
            out[M] = 1.0
        else:
            k = np.arange(M + 1)
            log_pmf = (
                gammaln(M + 1)
                - gammaln(k + 1)
                - gammaln(M - k + 1)
                + k * math.log(p)
                + (M - k) * math.log1p(-p)
            )
            out = np.exp(log_pmf)
        return out

    def draw(self, rng) -> tuple[int, int, bool]:
        if self.degenerate:
            x = int(np.searchsorted(self.cum_p, rng.random() * self.cum_p[-1], "right"))
            return x, x, True
        u = rng.random()
        if u < self.cum_min[-1]:
            k = int(np.searchsorted(self.cum_min, u, "right"))
            return k, k, True
        x = int(np.searchsorted(self.cum_res_p, rng.random() * self.cum_res_p[-1], "right"))
        y = int(np.searchsorted(self.cum_res_q, rng.random() * self.cum_res_q[-1], "right"))
        return x, y, False


def binomial_maximal_coupling(
    M: int, p: float, q: float, stream: RngStream
) -> tuple[int, int, bool]:
    """Draw (x, y, x == y) with x ~ Bin(M,p), y ~ Bin(M,q) marginally and
    Pr(x = y) = sum_k min(pmf_p(k), pmf_q(k))."""
    return _CouplingTable(M, p, q).draw(stream.generator())


@dataclass(frozen=True, slots=True)
class CoupledPair:
    g1: Graph
    g2: Graph
    equal: bool
    edge_counts: tuple[int, int]


def coupled_gnp_pair(
    n: int,
    p: float,
    q: float,
    stream: RngStream,
    *,
    n_cap: int = DEFAULT_N_CAP,
    _table: _CouplingTable | None = None,
) -> CoupledPair:
    """Sample (G(n,p), G(n,q)) from the edge-count maximal coupling."""
    if not 0.0 < p < 1.0 or not 0.0 < q < 1.0:
        raise ValidationError("need 0 < p, q < 1")
    if n < 0 or n > n_cap:
        raise ValidationError(f"need 0 <= n <= {n_cap}")
    M = n * (n - 1) // 2
    table = _table if _table is not None else _CouplingTable(M, p, q)
    rng = stream.generator()
    m1, m2, equal = table.draw(rng)
    order = rng.permutation(M)[: max(m1, m2)]
    rows1 = [0] * n
    rows2 = [0] * n
    for i, t in enumerate(order.tolist()):
        u, v = pair_from_index(n, t)
        if i < m1:
            rows1[u] |= 1 << v
            rows1[v] |= 1 << u
        if i < m2:
            rows2[u] |= 1 << v
            rows2[v] |= 1 << u
    g1 = Graph(n, tuple(rows1))
    g2 = g1 if m1 == m2 else Graph(n, tuple(rows2))
    return CoupledPair(g1, g2, equal, (m1, m2))


@dataclass(frozen=True, slots=True)
class AntiConcConfig:
    """Probability grid of the anti-concentration argument: I points
    p_i = p + (i-1)*step covering [p, 2p], with the target interval length
    ell = epsilon*log(np)/(n*p^(3/2))."""

    n: int
    p: float
    epsilon: float
    step: float = field(init=False)
    grid_size: int = field(init=False)
    interval_length: float = field(init=False)

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 0.25:
            raise ValidationError("need 0 < epsilon <= 1/4")
        if not 0.0 < self.p <= 0.25:
            raise ValidationError("need 0 < p <= 1/4")
        if self.n * self.p <= 1.0:
            raise ValidationError("need np > 1", reason="domain:np")
        step = 2.2 * self.epsilon * math.sqrt(self.p) / self.n
        object.__setattr__(self, "step", step)
        object.__setattr__(self, "grid_size", int(math.floor(self.p / step)))
        object.__setattr__(
            self,
            "interval_length",
            self.epsilon * math.log(self.n * self.p) / (self.n * self.p**1.5),
        )

    def p_i(self, i: int) -> float:
        """Grid probability, 1-based; p_1 = p and p_I <= 2p."""
        if not 1 <= i <= self.grid_size:
            raise ValidationError(f"grid index {i} outside 1..{self.grid_size}")
        return self.p + (i - 1) * self.step

    def subsample_indices(self, count: int = 9) -> list[int]:
        """`count` roughly evenly spaced grid indices, always containing
        1 and I (the full grid is far too large to sweep)."""
        if count < 1:
            raise ValidationError("need count >= 1")
        if self.grid_size <= count:
            return list(range(1, self.grid_size + 1))
        picks = np.linspace(1, self.grid_size, count)
        return sorted({int(round(x)) for x in picks})


def anti_conc_config(n: int, p: float, epsilon: float = DEFAULT_EPSILON) -> AntiConcConfig:
    return AntiConcConfig(n, p, epsilon)
