"""Command-line front end.

Subcommands either query the closed-form analytics directly (formulas,
bounds) or run a seeded experiment (xzero, mutual-dom, concentration,
variance, coupling, anti-conc).  All output is CSV with a leading
``#config=`` JSON echo line; identical invocations produce byte-identical
files.  Exit codes: 0 success, 1 runtime error (capacity, precision),
2 usage error; every failure prints one machine-parsable
``error:<reason>: <detail>`` line on stderr.

``--threads`` defaults to the DOMLAB_THREADS environment variable when set
(else the CPU count); an explicit flag always wins over the environment.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import analytics
from .errors import CapacityError, DomlabError, PrecisionError, ValidationError
from .graphs import dump_graph, gen_gnp
from .harness import ARTIFACT_VERSION, ExperimentConfig, run_experiment
from . import coupling as coupling_mod

EXPERIMENT_SUBCOMMANDS = {
    "xzero": "xzero",
    "mutual-dom": "mutual_dom",
    "concentration": "concentration",
    "variance": "variance",
    "coupling": "coupling",
    "anti-conc": "anti_conc",
}

@dataclass(slots=True)
class Invocation:
    subcommand: str
    args: dict = field(default_factory=dict)
    out: str | None = None
    dump_graph: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 2 with a machine-parsable reason
        print(f"error:usage: {message}", file=sys.stderr)
        raise SystemExit(2)


def _default_threads() -> int:
    env = os.environ.get("DOMLAB_THREADS")
    if env is not None:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValidationError(f"DOMLAB_THREADS={env!r} is not an integer") from exc
        if value >= 1:
            return value
        raise ValidationError("DOMLAB_THREADS must be >= 1")
    return os.cpu_count() or 1


def _probability(text: str) -> float:
    value = float(text)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} outside [0,1]")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not >= 1")
    return value


def build_parser() -> _Parser:
    parser = _Parser(prog="domlab", allow_abbrev=False,
                     description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=ARTIFACT_VERSION)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(sp, *, trials: bool):
        sp.add_argument("--out", metavar="PATH", help="write CSV here (default stdout)")
        if trials:
            sp.add_argument("--trials", type=_positive_int, default=1000)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--threads", type=_positive_int, default=None)
            sp.add_argument("--confidence", type=float, default=0.99)
        sp.add_argument("--precision-bits", type=_positive_int, default=256)

    sp = sub.add_parser("formulas", help="threshold, domination probability and tail bounds")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--p", type=_probability, required=True)
    common(sp, trials=False)

    sp = sub.add_parser("bounds", help="isolated-vertex probability bounds "
                        "(bipartite: --N; overlap: --r --s, optional --n for rho)")
    sp.add_argument("--N", type=_positive_int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--s", type=int)
    sp.add_argument("--n", type=_positive_int)
    sp.add_argument("--p", type=_probability, required=True)
    common(sp, trials=False)

    sp = sub.add_parser("xzero", help="Monte Carlo Pr(no isolated vertex) in G(N,N,p)")
    sp.add_argument("--N", type=_positive_int, required=True)
    sp.add_argument("--p", type=_probability, required=True)
    common(sp, trials=True)

    sp = sub.add_parser("mutual-dom", help="Monte Carlo mutual domination probability")
    sp.add_argument("--r", type=_positive_int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--p", type=_probability, required=True)
    sp.add_argument("--dump-graph", metavar="PATH")
    common(sp, trials=True)

    sp = sub.add_parser("concentration", help="exact domination number distribution")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--p", type=_probability, required=True)
    sp.add_argument("--dump-graph", metavar="PATH")
    common(sp, trials=True)

    sp = sub.add_parser("variance", help="dominating-set count mean/variance vs exact")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--p", type=_probability, required=True)
    sp.add_argument("--dump-graph", metavar="PATH")
    common(sp, trials=True)

    sp = sub.add_parser("coupling", help="maximal coupling of G(n,p) and G(n,q)")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--p", type=_probability, required=True)
    sp.add_argument("--q", type=_probability, required=True)
    sp.add_argument("--dump-graph", metavar="PATH")
    common(sp, trials=True)

    sp = sub.add_parser("anti-conc", help="domination number spread over the probability grid")
    sp.add_argument("--n", type=_positive_int, required=True)
    sp.add_argument("--p", type=_probability, required=True)
    sp.add_argument("--epsilon", type=float, default=coupling_mod.DEFAULT_EPSILON)
    sp.add_argument("--dump-graph", metavar="PATH")
    common(sp, trials=True)

    return parser


def parse(argv: list[str]) -> Invocation:
    """Parse argv into a validated Invocation (usage problems exit 2)."""
    namespace = build_parser().parse_args(argv)
    args = vars(namespace)
    subcommand = args.pop("subcommand")
    out = args.pop("out", None)
    dump = args.pop("dump_graph", None)
    if args.get("threads") is None and subcommand in EXPERIMENT_SUBCOMMANDS:
        args["threads"] = _default_threads()
    return Invocation(subcommand, args, out, dump)


def invocation_to_config(inv: Invocation) -> ExperimentConfig:
    kind = EXPERIMENT_SUBCOMMANDS[inv.subcommand]
    a = inv.args
    return ExperimentConfig(
        kind=kind,
        trials=a["trials"],
        master_seed=a["seed"],
        thread_count=a["threads"],
        precision_bits=a["precision_bits"],
        confidence=a["confidence"],
        n=a.get("n"),
        p=a.get("p"),
        q=a.get("q"),
        N=a.get("N"),
        r=a.get("r"),
        s=a.get("s"),
        epsilon=a.get("epsilon"),
    )


def invocation_from_config_json(line: str) -> Invocation:
    """Rebuild an Invocation from an emitted ``#config=`` line (the thread
    hint is not part of the echo and comes back as the default)."""
    if line.startswith("#config="):
        line = line[len("#config="):]
    cfg = ExperimentConfig.from_json(line)
    sub = {v: k for k, v in EXPERIMENT_SUBCOMMANDS.items()}[cfg.kind]
    args = {
        "trials": cfg.trials,
        "seed": cfg.master_seed,
        "threads": cfg.thread_count,
        "precision_bits": cfg.precision_bits,
        "confidence": cfg.confidence,
    }
    for name in ("n", "p", "q", "N", "r", "s", "epsilon"):
        value = getattr(cfg, name)
        if value is not None:
            args[name] = value
    return Invocation(sub, args)


def _analytics_csv(columns: list[str], row: list, payload: dict) -> str:
    payload = dict(payload)
    payload["version"] = ARTIFACT_VERSION
    header = "#config=" + json.dumps(payload, sort_keys=True, separators=(",", ":"))
    from .harness import _fmt

    return header + "\n" + ",".join(columns) + "\n" + ",".join(_fmt(v) for v in row) + "\n"


def _run_formulas(inv: Invocation) -> str:
    n, p, bits = inv.args["n"], inv.args["p"], inv.args["precision_bits"]
    rh = analytics.expectation_threshold(n, p)
    tails = analytics.tail_bounds(n, p, bits)
    r_next = rh.value + 1
    return _analytics_csv(
        ["n", "p", "r_hat", "predictor", "tau_r_hat", "log_tau_r_hat",
         "log_ex_r_hat", "r0_at_r_hat_plus1", "markov_lower_tail",
         "chebyshev_upper_tail", "chebyshev_raw"],
        [n, p, rh.value, rh.predictor,
         analytics.domination_prob(n, p, rh.value),
         analytics.log_domination_prob(n, p, rh.value),
         analytics.log_expected_dom_sets(n, p, rh.value),
         analytics.overlap_cutoff(n, p, r_next),
         tails.markov_lower_tail, tails.chebyshev_upper_tail, tails.chebyshev_raw],
        {"subcommand": "formulas", "n": n, "p": p, "precision_bits": bits},
    )


def _run_bounds(inv: Invocation) -> str:
    a = inv.args
    p, bits = a["p"], a["precision_bits"]
    bipartite = a.get("N") is not None
    overlap = a.get("r") is not None or a.get("s") is not None
    if bipartite == overlap:
        raise ValidationError("bounds needs either --N (bipartite) or --r/--s (overlap)")
    if bipartite:
        N = a["N"]
        params = analytics.bipartite_poisson_params(N, p)
        pb = analytics.poisson_bounds(params)
        exact = analytics.exact_no_isolated_prob(N, p, bits)
        return _analytics_csv(
            ["mode", "N", "p", "mu", "delta", "pi_w", "delta_v", "sigma",
             "upper", "lower_exp", "lower_fkg", "janson_exponent", "exact"],
            ["bipartite", N, p, params.mu, params.delta, params.pi_w,
             params.delta_v, params.sigma, pb.upper, pb.lower_exp,
             pb.lower_fkg, pb.janson_exponent, exact.value],
            {"subcommand": "bounds", "N": N, "p": p, "precision_bits": bits},
        )
    r, s = a.get("r"), a.get("s")
    if r is None or s is None:
        raise ValidationError("overlap bounds need both --r and --s")
    params = analytics.overlap_poisson_params(r, s, p)
    pb = analytics.poisson_bounds(params)
    exact = analytics.exact_mutual_dom_prob(r, s, p, bits)
    columns = ["mode", "r", "s", "p", "mu", "delta", "pi_w", "delta_v", "sigma",
               "upper", "lower_exp", "lower_fkg", "janson_exponent", "exact_mutual"]
    row = ["overlap", r, s, p, params.mu, params.delta, params.pi_w,
           params.delta_v, params.sigma, pb.upper, pb.lower_exp, pb.lower_fkg,
           pb.janson_exponent, exact.value]
    payload = {"subcommand": "bounds", "r": r, "s": s, "p": p, "precision_bits": bits}
    if a.get("n") is not None:
        n = a["n"]
        rho = analytics.joint_domination_prob(n, p, r, s, bits)
        rb = analytics.joint_domination_bounds(n, p, r, s, bits)
        columns += ["n", "rho_exact", "rho_simple", "rho_composite",
                    "rho_improved_base", "rho_mutual_lemma_base"]
        row += [n, rho.value, rb.simple, rb.composite, rb.improved_base,
                rb.mutual_lemma_base]
        payload["n"] = n
    return _analytics_csv(columns, row, payload)


def _write_dump(inv: Invocation, cfg: ExperimentConfig):
    """Dump the deterministic trial-0 graph of the experiment."""
    if inv.subcommand == "coupling":
        pair = coupling_mod.coupled_gnp_pair(cfg.n, cfg.p, cfg.q, cfg.stream(0))
        graph = pair.g1
    elif inv.subcommand == "mutual-dom":
        graph = gen_gnp(2 * cfg.r - cfg.s, cfg.p, cfg.stream(0))
    elif inv.subcommand == "anti-conc":
        eps = cfg.epsilon if cfg.epsilon is not None else coupling_mod.DEFAULT_EPSILON
        grid = coupling_mod.anti_conc_config(cfg.n, cfg.p, eps)
        graph = gen_gnp(cfg.n, grid.p_i(grid.subsample_indices(cfg.grid_points)[0]),
                        cfg.stream(0))
    else:  # concentration, variance
        graph = gen_gnp(cfg.n, cfg.p, cfg.stream(0))
    with open(inv.dump_graph, "w", encoding="ascii") as handle:
        handle.write(dump_graph(graph))


def execute(inv: Invocation) -> int:
    """Run the invocation; returns the process exit code."""
    if inv.subcommand == "formulas":
        text = _run_formulas(inv)
    elif inv.subcommand == "bounds":
        text = _run_bounds(inv)
    else:
        cfg = invocation_to_config(inv)
        report = run_experiment(cfg)
        if inv.dump_graph:
            _write_dump(inv, cfg)
        text = report.to_csv()
    if inv.out:
        with open(inv.out, "w", encoding="ascii") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        inv = parse(argv)
        return execute(inv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"error:{exc.reason}: {exc}", file=sys.stderr)
        return 2
    except (CapacityError, PrecisionError) as exc:
        print(f"error:{exc.reason}: {exc}", file=sys.stderr)
        return 1
    except DomlabError as exc:
        print(f"error:{exc.reason}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error:io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
