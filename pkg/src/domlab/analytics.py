"""Closed-form quantities and non-asymptotic bounds for dominating-set counts
in G(n,p), plus high-precision inclusion-exclusion oracles.

Two numeric regimes coexist here.  Float-valued formulas run in natural-log
space (lgamma / log1p / expm1), so ratios of huge binomials and tiny
probabilities never overflow; (1-p)^k is always evaluated as exp(k*log1p(-p)).
The oracles (alternating inclusion-exclusion sums, exact variance) run in
software floating point (default 256 bits) because the alternating sums
cancel catastrophically; every oracle value is recomputed at twice the
precision and must agree to 1e-15 relative, otherwise a PrecisionError is
raised.

Bound conventions worth knowing:

* The exponential lower bound on Pr(no isolated vertex) is implemented as
  exp(-mu - mu^2/(2N)).  The minus sign on the quadratic term is the one the
  product-form derivation actually yields (via 1-x >= exp(-x-x^2) on
  [0,1/2]); the plus-sign variant is refuted numerically already at N=1,
  p=0.5 (it gives 0.6065 > 0.5 = exact).
* Both lower bounds are only reported while pi_v = Pi_w*(1-p) <= 1/2; above
  that they are flagged absent (None).
* The "composite" upper bound on the joint domination probability is the
  exact outside-vertex factor times the isolated-vertex upper bound with
  overlap parameters; unlike the asymptotic "improved" form it holds with
  no hidden (1+o(1)) factor, so it can be asserted, not just reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, NamedTuple

import mpmath

from .errors import PrecisionError, ValidationError

DEFAULT_PRECISION_BITS = 256
_VERIFY_REL_TOL = 1e-15
# Absolute slack on the threshold test of the r-hat search, so that inputs
# where E X_r * n * p equals 1 exactly (definitional ties, resolved as >=)
# are not lost to last-ulp noise.  Off-tie gaps are orders of magnitude larger.
_RHAT_TIE_GUARD = 1e-9

NEG_INF = float("-inf")


def _ctx(bits: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.mp.clone()
    ctx.prec = bits
    return ctx


@dataclass(frozen=True, slots=True)
class ModelParams:
    """Random-graph model parameters for the threshold-based analyses."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 2:
            raise ValidationError("need n >= 2")
        if not 0.0 < self.p < 1.0:
            raise ValidationError("need 0 < p < 1")

    @property
    def np_product(self) -> float:
        return self.n * self.p


@dataclass(frozen=True, slots=True)
class HighPrecProb:
    """Probability computed at `precision_bits`; `verified` records that the
    2x-precision recomputation agreed to 1e-15 relative."""

    value: float
    precision_bits: int
    verified: bool


@dataclass(frozen=True, slots=True)
class PoissonParams:
    """Parameters of the isolated-vertex count bounds.

    mode "bipartite": two sides of size N_eff, mu = 2*N_eff*(1-p)^N_eff.
    mode "overlap": symmetric difference of two r-sets sharing s vertices,
    N_eff = r - s, mu = 2*(r-s)*(1-p)^r.
    """

    mode: Literal["bipartite", "overlap"]
    N_eff: int
    p: float
    mu: float
    delta: float
    pi_w: float
    delta_v: float
    sigma: float

    @property
    def pi_v(self) -> float:
        """Per-vertex isolation probability Pi_w*(1-p)."""
        return self.pi_w * (1.0 - self.p)


class PoissonBounds(NamedTuple):
    upper: float
    lower_exp: float | None
    lower_fkg: float | None
    janson_exponent: float


class RhoBounds(NamedTuple):
    simple: float
    composite: float
    improved_base: float
    mutual_lemma_base: float


class ExpectationThreshold(NamedTuple):
    value: int
    predictor: float


class TailBounds(NamedTuple):
    r_hat: int
    markov_lower_tail: float
    chebyshev_upper_tail: float
    chebyshev_raw: float


@dataclass(frozen=True, slots=True)
class OverlapProfile:
    """Per-overlap-size record of the variance decomposition."""

    s: int
    log_pair_count: float
    rho: float
    simple_bound: float
    composite_bound: float
    improved_base: float
    mutual_lemma_base: float
    u_s: float


@dataclass(frozen=True, slots=True)
class VarianceResult:
    """Exact variance of the size-r dominating-set count.

    var/v1/v2 are mpmath reals: their magnitude can exceed the float64
    range for large n (use float() when the scale is known to be safe).
    v1 sums pair_count*(rho - tau^2) over overlaps s <= cutoff; v2 sums
    pair_count*rho over s > cutoff, so var <= v1 + v2.
    """

    var: mpmath.mpf
    v1: mpmath.mpf
    v2: mpmath.mpf
    cutoff: int
    per_s: list[OverlapProfile]


@dataclass(frozen=True, slots=True)
class SandwichResult:
    """All members of the isolated-vertex probability sandwich, evaluated at
    a shared (adaptively raised) precision so the ordering is meaningful even
    where every member is 1 - o(float64 resolution)."""

    N: int
    p: float
    pi_v: float
    precision_bits: int
    lower_exp: mpmath.mpf
    lower_fkg: mpmath.mpf
    exact: mpmath.mpf
    upper: mpmath.mpf

    def chain_holds(self) -> bool:
        if self.pi_v <= 0.5 and not self.lower_exp <= self.lower_fkg <= self.exact:
            return False
        return self.exact <= self.upper


def _validate_p(p: float, lo: float = 0.0, hi: float = 1.0) -> float:
    if math.isnan(p) or not lo <= p <= hi:
        raise ValidationError(f"probability {p!r} outside [{lo},{hi}]")
    return float(p)


def _qpow(p: float, k: int) -> float:
    """(1-p)^k for integer k >= 0, evaluated as exp(k*log1p(-p))."""
    if k == 0:
        return 1.0
    if p == 0.0:
        return 1.0
    if p == 1.0:
        return 0.0
    return math.exp(k * math.log1p(-p))


def log_binom(n: int, r: int) -> float:
    """log C(n, r) via log-gamma; -inf outside the valid range."""
    if r < 0 or r > n:
        return NEG_INF
    return math.lgamma(n + 1) - math.lgamma(r + 1) - math.lgamma(n - r + 1)


def log_domination_prob(n: int, p: float, r: int) -> float:
    """log of the probability that a fixed r-set dominates G(n,p):
    (n-r) * log(1-(1-p)^r).  Returns -inf exactly when the probability is 0."""
    if not 0 <= r <= n:
        raise ValidationError(f"need 0 <= r <= n, got r={r}, n={n}")
    _validate_p(p)
    if r == n:
        return 0.0
    if r == 0 or p == 0.0:
        return NEG_INF
    if p == 1.0:
        return 0.0
    lqr = r * math.log1p(-p)  # log (1-p)^r
    if lqr > -math.log(2):
        log_base = math.log(-math.expm1(lqr))
    else:
        log_base = math.log1p(-math.exp(lqr))
    return (n - r) * log_base


def domination_prob(n: int, p: float, r: int) -> float:
    """Probability tau that a fixed r-set dominates G(n,p)."""
    return math.exp(log_domination_prob(n, p, r))


def log_expected_dom_sets(n: int, p: float, r: int) -> float:
    """log E[number of dominating r-sets] = log C(n,r) + log tau."""
    lt = log_domination_prob(n, p, r)
    if lt == NEG_INF:
        return NEG_INF
    return log_binom(n, r) + lt


def expectation_threshold(n: int, p: float) -> ExpectationThreshold:
    """Smallest r with E[dominating r-sets] >= 1/(np), plus the asymptotic
    predictor (log(np) - 2*log log(np))/p.

    The threshold predicate is searched by exponential doubling plus binary
    refinement; the result is re-checked against both neighbours, so the
    bracketing E X_{r-1} < 1/(np) <= E X_r always holds for the returned r.
    """
    _validate_p(p)
    if n < 1 or n * p <= 1.0:
        raise ValidationError(f"need np > 1, got n={n}, p={p}", reason="domain:np")
    log_np = math.log(n * p)
    threshold = -log_np

    def reaches(r: int) -> bool:
        return log_expected_dom_sets(n, p, r) >= threshold - _RHAT_TIE_GUARD

    hi = 1
    while hi < n and not reaches(hi):
        hi = min(2 * hi, n)
    if not reaches(hi):
        raise ValidationError("no r <= n reaches the expectation threshold")
    lo = hi // 2 if hi > 1 else 0  # reaches(lo) is False (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if reaches(mid):
            hi = mid
        else:
            lo = mid
    if hi > 1 and reaches(hi - 1):
        raise ValidationError("expectation threshold predicate not monotone")
    predictor = (log_np - 2.0 * math.log(log_np)) / p
    return ExpectationThreshold(hi, predictor)


def overlap_cutoff(n: int, p: float, r: int) -> int:
    """Cutoff overlap size floor(r^2 * log(np) / n) splitting the variance."""
    _validate_p(p)
    if n < 1 or n * p <= 1.0:
        raise ValidationError(f"need np > 1, got n={n}, p={p}", reason="domain:np")
    if r < 0:
        raise ValidationError("need r >= 0")
    return int(math.floor(r * r * math.log(n * p) / n))


def bipartite_poisson_params(N: int, p: float) -> PoissonParams:
    """Isolated-vertex parameters of the bipartite model G(N,N,p)."""
    if N < 1:
        raise ValidationError("need N >= 1")
    _validate_p(p)
    return PoissonParams(
        mode="bipartite",
        N_eff=N,
        p=p,
        mu=2.0 * N * _qpow(p, N),
        delta=2.0 * N * N * _qpow(p, 2 * N - 1),
        pi_w=_qpow(p, N - 1),
        delta_v=N * _qpow(p, N - 1),
        sigma=_sigma(2.0 * N * _qpow(p, N), 2.0 * N * N * _qpow(p, 2 * N - 1), p),
    )


def overlap_poisson_params(r: int, s: int, p: float) -> PoissonParams:
    """Isolated-vertex parameters for two r-sets sharing s vertices; the
    relevant bipartite graph lives on the symmetric difference (N_eff = r-s)
    but isolation also involves the s shared vertices, hence the r exponents."""
    if not 0 <= s <= r:
        raise ValidationError(f"need 0 <= s <= r, got s={s}, r={r}")
    _validate_p(p)
    if r == 0:
        return PoissonParams("overlap", 0, p, 0.0, 0.0, 0.0, 0.0, 0.0)
    m = r - s
    mu = 2.0 * m * _qpow(p, r)
    delta = 2.0 * m * m * _qpow(p, 2 * r - 1)
    return PoissonParams(
        mode="overlap",
        N_eff=m,
        p=p,
        mu=mu,
        delta=delta,
        pi_w=_qpow(p, r - 1),
        delta_v=m * _qpow(p, r - 1),
        sigma=_sigma(mu, delta, p),
    )


def _sigma(mu: float, delta: float, p: float) -> float:
    return delta * p / mu if mu > 0.0 else 0.0


def poisson_bounds(params: PoissonParams) -> PoissonBounds:
    """Upper and lower bounds on Pr(no isolated vertex).

    upper  = exp(-mu + delta*p*log(1 + mu/(delta*p)))  (exp(-mu) if delta*p=0)
    lower_exp = exp(-mu - mu^2/(2*N_eff))   [needs pi_v <= 1/2]
    lower_fkg = (1 - pi_v)^(2*N_eff)        [reported under the same gate]
    janson_exponent = -mu + delta/2, for comparison only.
    """
    mu, delta, p = params.mu, params.delta, params.p
    janson = -mu + delta / 2.0
    if mu == 0.0:
        return PoissonBounds(1.0, 1.0, 1.0, janson)
    dp = delta * p
    if dp == 0.0:
        upper = math.exp(-mu)
    else:
        upper = math.exp(-mu + dp * math.log1p(mu / dp))
    if params.pi_v > 0.5:
        return PoissonBounds(upper, None, None, janson)
    lower_exp = math.exp(-mu - mu * mu / (2.0 * params.N_eff))
    lower_fkg = math.exp(2.0 * params.N_eff * math.log1p(-params.pi_v))
    return PoissonBounds(upper, lower_exp, lower_fkg, janson)


# ---------------------------------------------------------------------------
# High-precision oracles


def _verified_prob(
    compute: Callable[[mpmath.ctx_mp.MPContext], mpmath.mpf],
    precision_bits: int,
) -> tuple[mpmath.mpf, HighPrecProb]:
    """Run `compute` at the requested precision and at twice that precision;
    package the first result once the two agree to 1e-15 relative."""
    if precision_bits < 53:
        raise ValidationError("precision_bits must be at least 53")
    v1 = compute(_ctx(precision_bits))
    v2 = compute(_ctx(2 * precision_bits))
    if v1 != v2:
        scale = max(abs(v1), abs(v2))
        if abs(v1 - v2) > scale * _VERIFY_REL_TOL:
            raise PrecisionError(
                f"recomputation at {2 * precision_bits} bits moved the value "
                f"by more than 1e-15 relative ({v1} vs {v2})",
                reason="precision:oracle",
            )
    value = min(1.0, max(0.0, float(v1)))
    return v1, HighPrecProb(value, precision_bits, True)


def _no_isolated_mpf(ctx, N: int, p: float) -> mpmath.mpf:
    # Inclusion-exclusion over sets of isolated vertices (i on the left, j on
    # the right), with the inner j-sum collapsed by the binomial theorem:
    #   sum_i (-1)^i C(N,i) q^(iN) (1 - q^(N-i))^N
    q = 1 - ctx.mpf(p)
    total = ctx.mpf(0)
    sign = 1
    q_down = q**N  # q^(N-i)
    q_run = ctx.mpf(1)  # q^(iN)
    q_N = q_down
    for i in range(N + 1):
        total += sign * ctx.mpf(math.comb(N, i)) * q_run * (1 - q_down) ** N
        sign = -sign
        q_run *= q_N
        if q != 0:
            q_down /= q
    return total


def _mutual_dom_mpf(ctx, r: int, s: int, p: float) -> mpmath.mpf:
    # Same collapse with m = r-s bad candidates per side and r potential
    # partners per bad vertex: sum_i (-1)^i C(m,i) q^(ir) (1 - q^(r-i))^m
    m = r - s
    if m == 0:
        return ctx.mpf(1)
    q = 1 - ctx.mpf(p)
    total = ctx.mpf(0)
    sign = 1
    q_down = q**r  # q^(r-i)
    q_run = ctx.mpf(1)  # q^(ir)
    q_r = q_down
    for i in range(m + 1):
        total += sign * ctx.mpf(math.comb(m, i)) * q_run * (1 - q_down) ** m
        sign = -sign
        q_run *= q_r
        if q != 0:
            q_down /= q
    return total


def exact_no_isolated_prob(
    N: int, p: float, precision_bits: int = DEFAULT_PRECISION_BITS
) -> HighPrecProb:
    """Exact Pr(G(N,N,p) has no isolated vertex), by inclusion-exclusion."""
    if N < 0:
        raise ValidationError("need N >= 0")
    _validate_p(p)
    _, out = _verified_prob(lambda ctx: _no_isolated_mpf(ctx, N, p), precision_bits)
    return out


def exact_mutual_dom_prob(
    r: int, s: int, p: float, precision_bits: int = DEFAULT_PRECISION_BITS
) -> HighPrecProb:
    """Exact probability that two r-sets with overlap s dominate each other
    in G(n,p); independent of n since only edges inside the union matter."""
    if not 0 <= s <= r:
        raise ValidationError(f"need 0 <= s <= r, got s={s}, r={r}")
    _validate_p(p)
    _, out = _verified_prob(lambda ctx: _mutual_dom_mpf(ctx, r, s, p), precision_bits)
    return out


def _outside_base_mpf(ctx, p: float, r: int, s: int) -> mpmath.mpf:
    """Per-outside-vertex probability of having a neighbour in both r-sets:
    1 - 2q^r + q^(2r-s)."""
    q = 1 - ctx.mpf(p)
    return 1 - 2 * q**r + q ** (2 * r - s)


def _rho_mpf(ctx, n: int, p: float, r: int, s: int) -> mpmath.mpf:
    outside = _outside_base_mpf(ctx, p, r, s) ** (n - 2 * r + s)
    return outside * _mutual_dom_mpf(ctx, r, s, p)


def _check_rho_args(n: int, p: float, r: int, s: int):
    if not 0 <= s <= r:
        raise ValidationError(f"need 0 <= s <= r, got s={s}, r={r}")
    if 2 * r - s > n:
        raise ValidationError(f"need 2r - s <= n, got r={r}, s={s}, n={n}")
    _validate_p(p)


def joint_domination_prob(
    n: int, p: float, r: int, s: int, precision_bits: int = DEFAULT_PRECISION_BITS
) -> HighPrecProb:
    """Exact probability rho that two fixed r-sets with overlap s are both
    dominating: the outside-vertex factor and the mutual-domination factor
    involve disjoint edge sets, so their product is exact."""
    _check_rho_args(n, p, r, s)
    _, out = _verified_prob(lambda ctx: _rho_mpf(ctx, n, p, r, s), precision_bits)
    return out


def joint_domination_bounds(
    n: int, p: float, r: int, s: int, precision_bits: int = DEFAULT_PRECISION_BITS
) -> RhoBounds:
    """Bounds on the joint domination probability rho.

    simple and composite are hard upper bounds; improved_base (exponent n-r)
    and mutual_lemma_base ((1-2q^r)^(r-s)) carry an unstated asymptotic
    factor and are diagnostic only.  Evaluated through the same context as
    the exact rho, so rho <= simple/composite survives float rounding even
    at the s = r equality point.
    """
    _check_rho_args(n, p, r, s)
    ctx = _ctx(precision_bits)
    base = _outside_base_mpf(ctx, p, r, s)
    simple = base ** (n - 2 * r + s)
    composite = simple * _poisson_upper_mpf(ctx, r, s, p)
    improved = base ** (n - r)
    q = 1 - ctx.mpf(p)
    mutual_lemma = (1 - 2 * q**r) ** (r - s)
    return RhoBounds(
        simple=float(simple),
        composite=float(composite),
        improved_base=float(improved),
        mutual_lemma_base=float(mutual_lemma),
    )


def _poisson_upper_mpf(ctx, r: int, s: int, p: float) -> mpmath.mpf:
    """Upper bound exp(-mu + dp*log(1+mu/dp)) with overlap parameters, in ctx."""
    if r == s:
        return ctx.mpf(1)
    q = 1 - ctx.mpf(p)
    m = r - s
    mu = 2 * m * q**r
    if mu == 0:
        return ctx.mpf(1)
    dp = 2 * m * m * q ** (2 * r - 1) * ctx.mpf(p)
    if dp == 0:
        return ctx.exp(-mu)
    return ctx.exp(-mu + dp * ctx.log(1 + mu / dp))


def overlap_variance_term(
    n: int,
    p: float,
    r: int,
    s: int,
    rho_mode: Literal["exact", "simple", "composite"] = "exact",
    precision_bits: int = DEFAULT_PRECISION_BITS,
) -> float:
    """Normalized variance contribution of overlap size s:

        u_s = [C(r,s) C(n-r,r-s) / C(n,r)] * rho(s) / tau^2

    computed in log space with rho taken exact or replaced by one of its
    upper bounds."""
    _check_rho_args(n, p, r, s)
    log_tau = log_domination_prob(n, p, r)
    if log_tau == NEG_INF:
        raise ValidationError("u_s needs E X_r > 0")
    log_counts = log_binom(r, s) + log_binom(n - r, r - s) - log_binom(n, r)
    if rho_mode == "exact":
        ctx = _ctx(precision_bits)
        rho = _rho_mpf(ctx, n, p, r, s)
        if rho <= 0:
            return 0.0
        log_rho = float(ctx.log(rho))
    elif rho_mode == "simple":
        ctx = _ctx(precision_bits)
        base = _outside_base_mpf(ctx, p, r, s)
        if base <= 0:
            return 0.0
        log_rho = float((n - 2 * r + s) * ctx.log(base))
    elif rho_mode == "composite":
        ctx = _ctx(precision_bits)
        base = _outside_base_mpf(ctx, p, r, s)
        if base <= 0:
            return 0.0
        log_rho = float(
            (n - 2 * r + s) * ctx.log(base) + ctx.log(_poisson_upper_mpf(ctx, r, s, p))
        )
    else:
        raise ValidationError(f"unknown rho_mode {rho_mode!r}")
    log_u = log_counts + log_rho - 2.0 * log_tau
    try:
        return math.exp(log_u)
    except OverflowError:
        return math.inf


def variance_exact(
    n: int, p: float, r: int, precision_bits: int = DEFAULT_PRECISION_BITS
) -> VarianceResult:
    """Exact Var of the size-r dominating-set count, decomposed by overlap:

        Var = sum_s pair_count(s) * (rho(s) - tau^2),
        pair_count(s) = C(n,r) C(r,s) C(n-r,r-s)   (ordered pairs),

    split at the cutoff into v1 (small overlaps, signed) and v2 (large
    overlaps, rho only).  The s = r term is the diagonal C(n,r)(tau - tau^2).
    Verified by recomputation at twice the precision."""
    if not 0 <= r <= n:
        raise ValidationError(f"need 0 <= r <= n, got r={r}")
    _validate_p(p)
    if n * p > 1.0:
        cutoff = overlap_cutoff(n, p, r)
    else:
        cutoff = 0

    def whole(ctx) -> tuple[mpmath.mpf, mpmath.mpf, mpmath.mpf]:
        q = 1 - ctx.mpf(p)
        tau = (1 - q**r) ** (n - r)
        tau_sq = tau * tau
        var = ctx.mpf(0)
        v1 = ctx.mpf(0)
        v2 = ctx.mpf(0)
        c_n_r = ctx.binomial(n, r)
        for s in range(max(0, 2 * r - n), r + 1):
            pair_count = c_n_r * ctx.binomial(r, s) * ctx.binomial(n - r, r - s)
            rho = _rho_mpf(ctx, n, p, r, s)
            var += pair_count * (rho - tau_sq)
            if s <= cutoff:
                v1 += pair_count * (rho - tau_sq)
            else:
                v2 += pair_count * rho
        return var, v1, v2

    var1, v1_1, v2_1 = whole(_ctx(precision_bits))
    var2, _, _ = whole(_ctx(2 * precision_bits))
    scale = max(abs(var1), abs(var2))
    if var1 != var2 and abs(var1 - var2) > scale * _VERIFY_REL_TOL:
        raise PrecisionError(
            f"variance recomputation moved by more than 1e-15 relative "
            f"({var1} vs {var2})",
            reason="precision:variance",
        )

    profiles = []
    ctx = _ctx(precision_bits)
    log_tau = log_domination_prob(n, p, r)
    for s in range(max(0, 2 * r - n), r + 1):
        bounds = joint_domination_bounds(n, p, r, s, precision_bits)
        rho = _rho_mpf(ctx, n, p, r, s)
        if log_tau == NEG_INF:
            u_s = math.nan
        elif rho <= 0:
            u_s = 0.0
        else:
            log_u = (
                log_binom(r, s)
                + log_binom(n - r, r - s)
                - log_binom(n, r)
                + float(ctx.log(rho))
                - 2.0 * log_tau
            )
            u_s = math.exp(log_u) if log_u < 700 else math.inf
        profiles.append(
            OverlapProfile(
                s=s,
                log_pair_count=log_binom(n, r)
                + log_binom(r, s)
                + log_binom(n - r, r - s),
                rho=float(rho),
                simple_bound=bounds.simple,
                composite_bound=bounds.composite,
                improved_base=bounds.improved_base,
                mutual_lemma_base=bounds.mutual_lemma_base,
                u_s=u_s,
            )
        )
    return VarianceResult(var=var1, v1=v1_1, v2=v2_1, cutoff=cutoff, per_s=profiles)


def tail_bounds(
    n: int, p: float, precision_bits: int = DEFAULT_PRECISION_BITS
) -> TailBounds:
    """First/second-moment tail bounds at the expectation threshold.

    markov_lower_tail bounds Pr(domination number <= r_hat - 1) by
    E X_{r_hat-1}; chebyshev_upper_tail bounds Pr(domination number >=
    r_hat + 2) by Var X_r / (E X_r)^2 at r = r_hat + 1 (clamped to [0,1]
    for reporting, raw value kept alongside)."""
    rh = expectation_threshold(n, p)
    log_markov = log_expected_dom_sets(n, p, rh.value - 1)
    markov = 0.0 if log_markov == NEG_INF else math.exp(log_markov)
    r = rh.value + 1
    if r > n:
        # X_n is identically 1, the upper tail event is empty
        return TailBounds(rh.value, markov, 0.0, 0.0)
    vr = variance_exact(n, p, r, precision_bits)
    ctx = _ctx(precision_bits)
    q = 1 - ctx.mpf(p)
    ex = ctx.binomial(n, r) * (1 - q**r) ** (n - r)
    raw_mpf = vr.var / (ex * ex)
    raw = float(raw_mpf)
    return TailBounds(rh.value, markov, min(1.0, max(0.0, raw)), raw)


def poisson_sandwich(
    N: int, p: float, precision_bits: int = DEFAULT_PRECISION_BITS
) -> SandwichResult:
    """Evaluate all four members of the isolated-vertex sandwich at one
    shared precision, raised adaptively: near p = 1 every member is
    1 - O(mu) with gaps of order mu^2/N, so resolving the ordering needs
    roughly 2*log2(1/mu) bits."""
    if N < 1:
        raise ValidationError("need N >= 1")
    _validate_p(p)
    bits = precision_bits
    if 0.0 < p < 1.0:
        log2_mu = math.log2(2 * N) + N * math.log2(1.0 - p)
        if log2_mu < 0:
            bits = max(bits, int(-2 * log2_mu) + 96)
    exact_mpf, _ = _verified_prob(lambda ctx: _no_isolated_mpf(ctx, N, p), bits)
    ctx = _ctx(bits)
    q = 1 - ctx.mpf(p)
    pi_v = q**N
    mu = 2 * N * pi_v
    delta = 2 * N * N * q ** (2 * N - 1)
    dp = delta * ctx.mpf(p)
    if mu == 0:
        upper = ctx.mpf(1)
    elif dp == 0:
        upper = ctx.exp(-mu)
    else:
        upper = ctx.exp(-mu + dp * ctx.log(1 + mu / dp))
    lower_exp = ctx.exp(-mu - mu * mu / (2 * N))
    lower_fkg = (1 - pi_v) ** (2 * N)
    return SandwichResult(
        N=N,
        p=p,
        pi_v=float(pi_v),
        precision_bits=bits,
        lower_exp=lower_exp,
        lower_fkg=lower_fkg,
        exact=exact_mpf,
        upper=upper,
    )
