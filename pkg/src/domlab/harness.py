"""Seeded Monte Carlo experiments tying the samplers, the exact solver, the
closed-form analytics and the couplings together, with statistically sound
reporting.

Reproducibility contract: a Report is a pure function of its
ExperimentConfig (seed included) and never of the worker count.  Each trial
draws from its own stream keyed by (master_seed, experiment_id, trial_index);
per-trial results are collected in trial order and reduced in that fixed
order, so scheduling cannot leak into the output.  CSV bytes are identical
for any thread_count.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from statistics import NormalDist
from typing import Callable

from . import analytics, coupling
from .errors import ValidationError
from .graphs import RngStream, gen_bipartite, gen_gnp, count_isolated
from .solver import (
    DEFAULT_SOLVER_CAP,
    DEFAULT_WORK_CAP,
    count_dominating_sets,
    domination_number,
    mutually_dominate,
)

ARTIFACT_VERSION = "0.1.0"

EXPERIMENT_IDS = {
    "xzero": 1,
    "mutual_dom": 2,
    "concentration": 3,
    "variance": 4,
    "coupling": 5,
    "anti_conc": 6,
}

# z for the 99.99% band used by per-edge marginal checks
_BAND_CONFIDENCE = 0.9999


def wilson_interval(successes: int, trials: int, confidence: float) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if not 0 <= successes <= trials or trials < 1:
        raise ValidationError("need 0 <= successes <= trials, trials >= 1")
    if not 0.0 < confidence < 1.0:
        raise ValidationError("need confidence in (0,1)")
    z = NormalDist().inv_cdf(0.5 + confidence / 2.0)
    n = trials
    p_hat = successes / n
    denom = 1.0 + z * z / n
    centre = (p_hat + z * z / (2 * n)) / denom
    spread = z * math.sqrt((p_hat * (1 - p_hat) + z * z / (4 * n)) / n) / denom
    return max(0.0, centre - spread), min(1.0, centre + spread)


@dataclass(frozen=True, slots=True)
class ExperimentConfig:
    """Description of one seeded experiment.

    thread_count is an execution hint only: it is excluded from the config
    echo and can never change a report.
    """

    kind: str
    trials: int
    master_seed: int = 0
    thread_count: int = 1
    precision_bits: int = 256
    confidence: float = 0.99
    n: int | None = None
    p: float | None = None
    q: float | None = None
    N: int | None = None
    r: int | None = None
    s: int | None = None
    epsilon: float | None = None
    grid_points: int = 9
    work_cap: int = DEFAULT_WORK_CAP
    solver_cap: int = DEFAULT_SOLVER_CAP

    def __post_init__(self):
        if self.kind not in EXPERIMENT_IDS:
            raise ValidationError(f"unknown experiment kind {self.kind!r}")
        if self.trials < 1:
            raise ValidationError("need trials >= 1")
        if self.thread_count < 1:
            raise ValidationError("need thread_count >= 1")
        if not 0.0 < self.confidence < 1.0:
            raise ValidationError("need confidence in (0,1)")
        if self.precision_bits < 53:
            raise ValidationError("need precision_bits >= 53")
        need = {
            "xzero": ("N", "p"),
            "mutual_dom": ("r", "s", "p"),
            "concentration": ("n", "p"),
            "variance": ("n", "r", "p"),
            "coupling": ("n", "p", "q"),
            "anti_conc": ("n", "p"),
        }[self.kind]
        for name in need:
            if getattr(self, name) is None:
                raise ValidationError(f"{self.kind} needs --{name}")
        for name in ("p", "q"):
            value = getattr(self, name)
            if value is not None and (math.isnan(value) or not 0.0 <= value <= 1.0):
                raise ValidationError(f"{name}={value!r} outside [0,1]")
        if self.kind == "mutual_dom" and not 0 <= self.s <= self.r:
            raise ValidationError("need 0 <= s <= r")
        if self.kind == "variance" and not 0 <= self.r <= self.n:
            raise ValidationError("need 0 <= r <= n")
        if self.kind == "coupling" and not (0.0 < self.p < 1.0 and 0.0 < self.q < 1.0):
            raise ValidationError("coupling needs 0 < p, q < 1")

    @property
    def experiment_id(self) -> int:
        return EXPERIMENT_IDS[self.kind]

    def stream(self, trial_index: int) -> RngStream:
        return RngStream(self.master_seed, self.experiment_id, trial_index)

    def semantic_json(self) -> str:
        """Config echo (sorted keys, version included, thread hint excluded)."""
        payload = {}
        for f in fields(self):
            if f.name == "thread_count":
                continue
            value = getattr(self, f.name)
            if value is not None:
                payload[f.name] = value
        payload["version"] = ARTIFACT_VERSION
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        payload = json.loads(text)
        payload.pop("version", None)
        return cls(**payload)


@dataclass(slots=True)
class Report:
    config: ExperimentConfig
    columns: list[str]
    row: list
    blocks: list[tuple[list[str], list[list]]] = field(default_factory=list)
    wall_time_s: float = 0.0
    version: str = ARTIFACT_VERSION

    def value(self, column: str):
        return self.row[self.columns.index(column)]

    def to_csv(self) -> str:
        # wall_time_s deliberately stays out: CSV bytes must not vary run to run
        out = [f"#config={self.config.semantic_json()}"]
        out.append(",".join(self.columns))
        out.append(",".join(_fmt(v) for v in self.row))
        for cols, rows in self.blocks:
            out.append("")
            out.append(",".join(cols))
            out.extend(",".join(_fmt(v) for v in row) for row in rows)
        return "\n".join(out) + "\n"


def _fmt(value) -> str:
    if value is None:
        return "nan"
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _map_trials(
    cfg: ExperimentConfig, worker: Callable[[int], object], count: int | None = None
) -> list:
    """Run worker(0..count-1); results come back in trial order whatever the
    scheduling, so downstream reductions are worker-count independent."""
    total = cfg.trials if count is None else count
    if cfg.thread_count == 1:
        return [worker(t) for t in range(total)]
    chunk = max(1, total // (cfg.thread_count * 8))
    with ThreadPoolExecutor(max_workers=cfg.thread_count) as pool:
        return list(pool.map(worker, range(total), chunksize=chunk))


def run_xzero(cfg: ExperimentConfig) -> Report:
    """Estimate Pr(no isolated vertex) in G(N,N,p) against the exact
    inclusion-exclusion value and the closed-form bounds."""
    _expect_kind(cfg, "xzero")
    t0 = time.perf_counter()

    def worker(t: int) -> int:
        graph = gen_bipartite(cfg.N, cfg.p, cfg.stream(t))
        return 1 if count_isolated(graph) == 0 else 0

    successes = sum(_map_trials(cfg, worker))
    est = successes / cfg.trials
    lo, hi = wilson_interval(successes, cfg.trials, cfg.confidence)
    exact = analytics.exact_no_isolated_prob(cfg.N, cfg.p, cfg.precision_bits)
    bounds = analytics.poisson_bounds(analytics.bipartite_poisson_params(cfg.N, cfg.p))
    return Report(
        config=cfg,
        columns=["N", "p", "trials", "seed", "est", "lo", "hi",
                 "exact", "upper", "lower_exp", "lower_fkg"],
        row=[cfg.N, cfg.p, cfg.trials, cfg.master_seed, est, lo, hi,
             exact.value, bounds.upper, bounds.lower_exp, bounds.lower_fkg],
        wall_time_s=time.perf_counter() - t0,
    )


def run_mutual_dom(cfg: ExperimentConfig) -> Report:
    """Estimate the probability that two fixed r-sets with overlap s dominate
    each other, sampling only the edges inside their union."""
    _expect_kind(cfg, "mutual_dom")
    t0 = time.perf_counter()
    r, s = cfg.r, cfg.s
    span = 2 * r - s
    set_a = (1 << r) - 1
    set_b = ((1 << span) - 1) ^ ((1 << (r - s)) - 1)

    def worker(t: int) -> int:
        graph = gen_gnp(span, cfg.p, cfg.stream(t))
        return 1 if mutually_dominate(graph, set_a, set_b) else 0

    successes = sum(_map_trials(cfg, worker))
    est = successes / cfg.trials
    lo, hi = wilson_interval(successes, cfg.trials, cfg.confidence)
    exact = analytics.exact_mutual_dom_prob(r, s, cfg.p, cfg.precision_bits)
    poisson_upper = analytics.poisson_bounds(
        analytics.overlap_poisson_params(r, s, cfg.p)
    ).upper
    lemma_base = analytics.joint_domination_bounds(span, cfg.p, r, s).mutual_lemma_base
    return Report(
        config=cfg,
        columns=["r", "s", "p", "trials", "seed", "est", "lo", "hi",
                 "exact", "poisson_upper", "mutual_lemma_base"],
        row=[r, s, cfg.p, cfg.trials, cfg.master_seed, est, lo, hi,
             exact.value, poisson_upper, lemma_base],
        wall_time_s=time.perf_counter() - t0,
    )


def run_concentration(cfg: ExperimentConfig) -> Report:
    """Sample the domination number exactly per trial; report its empirical
    distribution against the expectation threshold and both tail bounds."""
    _expect_kind(cfg, "concentration")
    t0 = time.perf_counter()

    def worker(t: int) -> int:
        graph = gen_gnp(cfg.n, cfg.p, cfg.stream(t))
        return domination_number(graph, solver_cap=cfg.solver_cap)

    gammas = _map_trials(cfg, worker)
    tails = analytics.tail_bounds(cfg.n, cfg.p, cfg.precision_bits)
    rh = analytics.expectation_threshold(cfg.n, cfg.p)
    counts: dict[int, int] = {}
    for g in gammas:
        counts[g] = counts.get(g, 0) + 1
    trials = cfg.trials
    mass_two = (counts.get(rh.value, 0) + counts.get(rh.value + 1, 0)) / trials
    emp_low = sum(c for g, c in counts.items() if g <= rh.value - 1) / trials
    emp_high = sum(c for g, c in counts.items() if g >= rh.value + 2) / trials
    mean_gamma = sum(gammas) / trials
    typical = math.log(cfg.n * cfg.p) / cfg.p
    dist_rows = [[g, counts[g], counts[g] / trials] for g in sorted(counts)]
    return Report(
        config=cfg,
        columns=["n", "p", "trials", "seed", "r_hat", "predictor",
                 "mass_rhat_rhat1", "emp_le_rhat_minus1", "markov_bound",
                 "emp_ge_rhat_plus2", "chebyshev_bound", "mean_gamma",
                 "typical_value"],
        row=[cfg.n, cfg.p, cfg.trials, cfg.master_seed, rh.value, rh.predictor,
             mass_two, emp_low, tails.markov_lower_tail,
             emp_high, tails.chebyshev_upper_tail, mean_gamma, typical],
        blocks=[(["gamma", "count", "freq"], dist_rows)],
        wall_time_s=time.perf_counter() - t0,
    )


def run_variance(cfg: ExperimentConfig) -> Report:
    """Count dominating r-sets exhaustively per sampled graph; compare the
    empirical mean/variance with the exact closed forms, with the per-overlap
    profile table attached."""
    _expect_kind(cfg, "variance")
    t0 = time.perf_counter()

    def worker(t: int) -> int:
        graph = gen_gnp(cfg.n, cfg.p, cfg.stream(t))
        return count_dominating_sets(graph, cfg.r, cfg.work_cap)

    xs = _map_trials(cfg, worker)
    trials = cfg.trials
    total = sum(xs)
    total_sq = sum(x * x for x in xs)
    emp_mean = total / trials
    emp_var = (
        (total_sq - total * total / trials) / (trials - 1) if trials > 1 else 0.0
    )
    vr = analytics.variance_exact(cfg.n, cfg.p, cfg.r, cfg.precision_bits)
    log_ex = analytics.log_expected_dom_sets(cfg.n, cfg.p, cfg.r)
    exact_mean = math.exp(log_ex) if log_ex > analytics.NEG_INF else 0.0
    log_tau = analytics.log_domination_prob(cfg.n, cfg.p, cfg.r)
    profile_rows = []
    sum_u_above = 0.0
    for prof in vr.per_s:
        rho_over_tau_sq = (
            math.exp(math.log(prof.rho) - 2 * log_tau)
            if prof.rho > 0 and log_tau > analytics.NEG_INF
            else math.nan
        )
        mutual = analytics.exact_mutual_dom_prob(cfg.r, prof.s, cfg.p,
                                                 cfg.precision_bits).value
        lemma_ratio = (
            mutual / prof.mutual_lemma_base if prof.mutual_lemma_base > 0 else math.nan
        )
        if prof.s > vr.cutoff and math.isfinite(prof.u_s):
            sum_u_above += prof.u_s
        profile_rows.append([
            prof.s, prof.log_pair_count, prof.rho, prof.simple_bound,
            prof.composite_bound, prof.improved_base, prof.mutual_lemma_base,
            prof.u_s, rho_over_tau_sq, lemma_ratio,
        ])
    return Report(
        config=cfg,
        columns=["n", "r", "p", "trials", "seed", "emp_mean", "emp_var",
                 "exact_mean", "exact_var", "v1", "v2", "cutoff",
                 "sum_u_above_cutoff"],
        row=[cfg.n, cfg.r, cfg.p, cfg.trials, cfg.master_seed, emp_mean, emp_var,
             exact_mean, float(vr.var), float(vr.v1), float(vr.v2), vr.cutoff,
             sum_u_above],
        blocks=[(
            ["s", "log_pair_count", "rho", "simple", "composite",
             "improved_base", "mutual_lemma_base", "u_s", "rho_over_tau_sq",
             "mutual_over_lemma_base"],
            profile_rows,
        )],
        wall_time_s=time.perf_counter() - t0,
    )


def _graph_edge_indices(graph) -> list[int]:
    out = []
    n = graph.n
    for u in range(n):
        row = graph.rows[u] >> (u + 1)
        base = u * (2 * n - u - 1) // 2 - u - 1
        while row:
            low = row & -row
            v = low.bit_length() - 1 + u + 1
            out.append(base + v)
            row ^= low
    return out


def run_coupling(cfg: ExperimentConfig) -> Report:
    """Estimate Pr(G(n,p) = G(n,q)) under the maximal edge-count coupling and
    check it against the distance-chain bound; also audit both per-edge
    marginal frequencies against their 99.99% binomial bands."""
    _expect_kind(cfg, "coupling")
    t0 = time.perf_counter()
    n = cfg.n
    pairs_total = n * (n - 1) // 2
    table = coupling._CouplingTable(pairs_total, cfg.p, cfg.q)

    def worker(t: int):
        pair = coupling.coupled_gnp_pair(n, cfg.p, cfg.q, cfg.stream(t), _table=table)
        return (
            1 if pair.equal else 0,
            _graph_edge_indices(pair.g1),
            _graph_edge_indices(pair.g2),
        )

    results = _map_trials(cfg, worker)
    equal_count = 0
    counts1 = [0] * pairs_total
    counts2 = [0] * pairs_total
    for eq, edges1, edges2 in results:
        equal_count += eq
        for t in edges1:
            counts1[t] += 1
        for t in edges2:
            counts2[t] += 1
    est = equal_count / cfg.trials
    lo, hi = wilson_interval(equal_count, cfg.trials, cfg.confidence)
    chain = coupling.tv_chain_bound(n, cfg.p, cfg.q)
    z_band = NormalDist().inv_cdf(0.5 + _BAND_CONFIDENCE / 2.0)
    out_1 = _outside_band(counts1, cfg.trials, cfg.p, z_band)
    out_2 = _outside_band(counts2, cfg.trials, cfg.q, z_band)
    return Report(
        config=cfg,
        columns=["n", "p", "q", "trials", "seed", "pr_equal", "lo", "hi",
                 "kl_term", "pinsker_term", "tv_final", "tv_final_clamped",
                 "pairs_outside_band_g1", "pairs_outside_band_g2"],
        row=[n, cfg.p, cfg.q, cfg.trials, cfg.master_seed, est, lo, hi,
             chain.kl_term, chain.pinsker_term, chain.final, chain.final_clamped,
             out_1, out_2],
        wall_time_s=time.perf_counter() - t0,
    )


def _outside_band(counts: list[int], trials: int, p: float, z: float) -> int:
    half = z * math.sqrt(p * (1.0 - p) / trials)
    return sum(1 for c in counts if abs(c / trials - p) > half)


def run_anti_conc(cfg: ExperimentConfig) -> Report:
    """Sweep a subsample of the anti-concentration probability grid; at each
    grid probability report the empirical domination-number distribution, its
    shortest >= 1-epsilon interval, and that interval's length against the
    target length ell(n, p_i)."""
    _expect_kind(cfg, "anti_conc")
    t0 = time.perf_counter()
    eps = cfg.epsilon if cfg.epsilon is not None else coupling.DEFAULT_EPSILON
    grid = coupling.anti_conc_config(cfg.n, cfg.p, eps)
    indices = grid.subsample_indices(cfg.grid_points)

    def worker(flat: int):
        slot, t = divmod(flat, cfg.trials)
        p_i = grid.p_i(indices[slot])
        graph = gen_gnp(cfg.n, p_i, cfg.stream(flat))
        return domination_number(graph, solver_cap=cfg.solver_cap)

    gammas = _map_trials(cfg, worker, count=cfg.trials * len(indices))
    rows = []
    for slot, i in enumerate(indices):
        p_i = grid.p_i(i)
        sample = gammas[slot * cfg.trials : (slot + 1) * cfg.trials]
        lo_g, hi_g, mass = _shortest_mass_interval(sample, 1.0 - eps)
        ell = eps * math.log(cfg.n * p_i) / (cfg.n * p_i**1.5)
        rows.append([
            i, p_i, sum(sample) / cfg.trials, min(sample), max(sample),
            lo_g, hi_g, hi_g - lo_g, mass, ell,
        ])
    return Report(
        config=cfg,
        columns=["n", "p", "epsilon", "trials_per_point", "seed", "step",
                 "grid_size", "ell_at_p"],
        row=[cfg.n, cfg.p, eps, cfg.trials, cfg.master_seed, grid.step,
             grid.grid_size, grid.interval_length],
        blocks=[(
            ["i", "p_i", "mean_gamma", "gamma_min", "gamma_max",
             "interval_lo", "interval_hi", "interval_len", "interval_mass",
             "ell_n_pi"],
            rows,
        )],
        wall_time_s=time.perf_counter() - t0,
    )


def _shortest_mass_interval(sample: list[int], target: float) -> tuple[int, int, float]:
    """Shortest integer interval [lo, hi] holding at least `target` of the
    empirical mass (leftmost on ties)."""
    total = len(sample)
    support = sorted(set(sample))
    counts = {g: 0 for g in support}
    for g in sample:
        counts[g] += 1
    best = (support[0], support[-1], 1.0)
    best_len = support[-1] - support[0]
    for a_idx, a in enumerate(support):
        acc = 0
        for b in support[a_idx:]:
            acc += counts[b]
            if acc / total >= target:
                if b - a < best_len:
                    best, best_len = (a, b, acc / total), b - a
                break
    return best


def _expect_kind(cfg: ExperimentConfig, kind: str):
    if cfg.kind != kind:
        raise ValidationError(f"config kind {cfg.kind!r} does not match {kind!r}")


RUNNERS = {
    "xzero": run_xzero,
    "mutual_dom": run_mutual_dom,
    "concentration": run_concentration,
    "variance": run_variance,
    "coupling": run_coupling,
    "anti_conc": run_anti_conc,
}


def run_experiment(cfg: ExperimentConfig) -> Report:
    return RUNNERS[cfg.kind](cfg)
