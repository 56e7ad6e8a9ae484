"""domlab: a desk-scale laboratory for the domination number of random graphs.

Exact bit-packed graph samplers, an exact branch-and-bound domination
solver, closed-form expectations and non-asymptotic probability bounds,
high-precision inclusion-exclusion oracles, maximal couplings, and a
reproducible Monte Carlo harness surfaced through the ``domlab`` CLI.
"""

__version__ = "0.1.0"

from .analytics import (
    DEFAULT_PRECISION_BITS,
    ExpectationThreshold,
    HighPrecProb,
    ModelParams,
    OverlapProfile,
    PoissonBounds,
    PoissonParams,
    RhoBounds,
    SandwichResult,
    TailBounds,
    VarianceResult,
    bipartite_poisson_params,
    domination_prob,
    exact_mutual_dom_prob,
    exact_no_isolated_prob,
    expectation_threshold,
    joint_domination_bounds,
    joint_domination_prob,
    log_expected_dom_sets,
    overlap_cutoff,
    overlap_poisson_params,
    overlap_variance_term,
    poisson_bounds,
    poisson_sandwich,
    tail_bounds,
    variance_exact,
)
from .coupling import (
    AntiConcConfig,
    CoupledPair,
    TvChainBound,
    anti_conc_config,
    binomial_maximal_coupling,
    coupled_gnp_pair,
    kl_bernoulli,
    tv_chain_bound,
)
from .errors import CapacityError, DomlabError, PrecisionError, ValidationError
from .graphs import (
    BipartiteGraph,
    Graph,
    RngStream,
    count_isolated,
    dump_graph,
    gen_bipartite,
    gen_gnp,
    load_graph,
)
from .harness import ExperimentConfig, Report, run_experiment, wilson_interval
from .solver import (
    count_dominating_sets,
    domination_number,
    greedy_dominating_set,
    is_dominating,
    mutually_dominate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
