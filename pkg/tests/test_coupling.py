import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from domlab import (
    RngStream,
    ValidationError,
    anti_conc_config,
    binomial_maximal_coupling,
    coupled_gnp_pair,
    kl_bernoulli,
    tv_chain_bound,
    wilson_interval,
)
from domlab.coupling import _CouplingTable


# --- KL divergence -----------------------------------------------------------

def test_kl_zero_at_equal():
    for p in (0.0, 0.2, 0.5, 1.0):
        assert kl_bernoulli(p, p) == 0.0


def test_kl_known_value():
    assert kl_bernoulli(0.5, 0.25) == pytest.approx(0.5 * math.log(4 / 3), rel=1e-12)
    assert kl_bernoulli(0.5, 0.25) == pytest.approx(0.1438, abs=5e-5)


def test_kl_boundary_limits():
    assert kl_bernoulli(0.0, 0.3) == pytest.approx(-math.log(0.7), rel=1e-12)
    assert kl_bernoulli(1.0, 0.3) == pytest.approx(-math.log(0.3), rel=1e-12)
    assert kl_bernoulli(0.5, 0.0) == math.inf
    assert kl_bernoulli(0.5, 1.0) == math.inf
    assert kl_bernoulli(0.0, 0.0) == 0.0
    assert kl_bernoulli(1.0, 1.0) == 0.0


@given(
    p=st.floats(0.0, 1.0, allow_nan=False),
    q=st.floats(0.001, 0.999, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_kl_gibbs_and_quadratic_bound(p, q):
    kl = kl_bernoulli(p, q)
    assert kl >= 0.0
    if abs(p - q) > 1e-12:
        assert kl > 0.0
    assert kl <= (p - q) ** 2 / (q * (1 - q)) + 1e-12


# --- distance chain ----------------------------------------------------------

def test_tv_chain_zero_at_equal():
    chain = tv_chain_bound(50, 0.2, 0.2)
    assert chain == (0.0, 0.0, 0.0, 0.0)


def test_tv_chain_known_value():
    chain = tv_chain_bound(100, 0.1, 0.105)
    assert chain.final == pytest.approx(0.8156, abs=5e-4)
    assert chain.final == pytest.approx(0.5 / math.sqrt(4 * 0.105 * 0.895), rel=1e-12)
    assert chain.pinsker_term <= chain.final
    assert chain.final_clamped == chain.final


def test_tv_chain_clamping():
    chain = tv_chain_bound(1000, 0.1, 0.2)
    assert chain.final > 1.0
    assert chain.final_clamped == 1.0


@given(
    n=st.integers(2, 500),
    p=st.floats(0.0, 1.0, allow_nan=False),
    q=st.floats(0.01, 0.99, allow_nan=False),
)
@settings(max_examples=200, deadline=None)
def test_tv_chain_pinsker_below_final(n, p, q):
    chain = tv_chain_bound(n, p, q)
    assert chain.pinsker_term <= chain.final * (1 + 1e-12) + 1e-15


# --- binomial maximal coupling --------------------------------------------------

def test_coupling_equal_p_q():
    for t in range(50):
        x, y, equal = binomial_maximal_coupling(40, 0.3, 0.3, RngStream(1, 9, t))
        assert equal and x == y
        assert 0 <= x <= 40


def test_coupling_m1_overlap():
    table = _CouplingTable(1, 0.3, 0.8)
    assert table.overlap == pytest.approx(1 - abs(0.3 - 0.8), rel=1e-12)


def test_coupling_m2_overlap_pmf_table():
    # pmfs at p=0.5: (1/4,1/2,1/4); at q=0.6: (0.16,0.48,0.36) -> overlap 0.89
    table = _CouplingTable(2, 0.5, 0.6)
    assert table.overlap == pytest.approx(0.89, rel=1e-12)


def test_coupling_marginals_and_overlap_rate():
    M, p, q = 30, 0.4, 0.47
    table = _CouplingTable(M, p, q)
    trials = 4000
    eq_count = 0
    sum_x = 0
    sum_y = 0
    for t in range(trials):
        x, y, equal = table.draw(RngStream(7, 8, t).generator())
        eq_count += equal
        sum_x += x
        sum_y += y
        assert equal == (x == y)
    lo, hi = wilson_interval(eq_count, trials, 0.999)
    assert lo <= table.overlap <= hi
    # means inside 5 sigma bands
    for total, prob in ((sum_x, p), (sum_y, q)):
        sigma = math.sqrt(M * prob * (1 - prob) * trials)
        assert abs(total - M * prob * trials) <= 5 * sigma


def test_coupled_pair_identical_at_p_q():
    pair = coupled_gnp_pair(30, 0.15, 0.15, RngStream(3, 5, 0))
    assert pair.equal and pair.g1 is pair.g2
    assert pair.edge_counts[0] == pair.edge_counts[1]


def test_coupled_pair_marginal_edge_counts():
    pair = coupled_gnp_pair(25, 0.1, 0.3, RngStream(3, 5, 1))
    assert pair.g1.edge_count == pair.edge_counts[0]
    assert pair.g2.edge_count == pair.edge_counts[1]
    assert pair.equal == (pair.edge_counts[0] == pair.edge_counts[1])


def test_coupled_pair_deterministic():
    a = coupled_gnp_pair(20, 0.1, 0.12, RngStream(11, 5, 4))
    b = coupled_gnp_pair(20, 0.1, 0.12, RngStream(11, 5, 4))
    assert a.g1.rows == b.g1.rows and a.g2.rows == b.g2.rows


def test_coupled_pair_prefix_nesting():
    # g1 and g2 are prefixes of one shared pair order: the smaller-count graph
    # is a subgraph of the larger one
    for t in range(20):
        pair = coupled_gnp_pair(18, 0.2, 0.3, RngStream(5, 5, t))
        m1, m2 = pair.edge_counts
        small, big = (pair.g1, pair.g2) if m1 <= m2 else (pair.g2, pair.g1)
        for u in range(18):
            assert small.rows[u] & ~big.rows[u] == 0


def test_coupled_pair_validation():
    with pytest.raises(ValidationError):
        coupled_gnp_pair(10, 0.0, 0.5, RngStream(0))
    with pytest.raises(ValidationError):
        coupled_gnp_pair(10, 0.5, 1.0, RngStream(0))


# --- anti-concentration grid -----------------------------------------------------

def test_anti_conc_example_values():
    cfg = anti_conc_config(10**6, 0.01, 0.25)
    assert cfg.interval_length == pytest.approx(0.0023026, abs=5e-7)
    assert cfg.step == pytest.approx(5.5e-8, rel=1e-12)
    assert cfg.grid_size == 181818
    assert cfg.p_i(1) == 0.01
    assert cfg.p_i(cfg.grid_size) <= 0.02


def test_anti_conc_validation():
    with pytest.raises(ValidationError):
        anti_conc_config(100, 0.1, 0.3)  # epsilon > 1/4
    with pytest.raises(ValidationError):
        anti_conc_config(100, 0.3, 0.25)  # p > 1/4
    with pytest.raises(ValidationError):
        anti_conc_config(5, 0.1, 0.25)  # np <= 1


def test_anti_conc_grid_invariants():
    cfg = anti_conc_config(500, 0.2, 0.25)
    assert cfg.grid_size >= 1
    for i in range(1, cfg.grid_size + 1, max(1, cfg.grid_size // 11)):
        assert cfg.p <= cfg.p_i(i) <= 2 * cfg.p
    gaps = [cfg.p_i(i + 1) - cfg.p_i(i) for i in range(1, min(cfg.grid_size, 40))]
    assert all(g == pytest.approx(cfg.step, rel=1e-9) for g in gaps)


def test_anti_conc_subsample():
    cfg = anti_conc_config(500, 0.2, 0.25)
    picks = cfg.subsample_indices(9)
    assert picks[0] == 1 and picks[-1] == cfg.grid_size
    assert picks == sorted(set(picks))
    assert len(picks) <= 9
