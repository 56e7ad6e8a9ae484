import math
from concurrent.futures import ThreadPoolExecutor

import pytest

from domlab import (
    BipartiteGraph,
    CapacityError,
    Graph,
    RngStream,
    ValidationError,
    count_isolated,
    dump_graph,
    gen_bipartite,
    gen_gnp,
    load_graph,
)
from domlab.graphs import pair_from_index, pair_index, sample_pair_indices


def test_p1_complete():
    g = gen_gnp(5, 1.0, RngStream(3))
    assert g.edge_count == 10
    assert all(g.rows[u] == ((1 << 5) - 1) ^ (1 << u) for u in range(5))


def test_p0_edgeless():
    g = gen_gnp(7, 0.0, RngStream(3))
    assert g.edge_count == 0


def test_gen_gnp_deterministic():
    a = gen_gnp(40, 0.3, RngStream(11, 2, 5))
    b = gen_gnp(40, 0.3, RngStream(11, 2, 5))
    assert a.rows == b.rows


def test_gen_gnp_thread_invariant():
    expected = gen_gnp(30, 0.25, RngStream(9, 1, 0)).rows
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(
            lambda _: gen_gnp(30, 0.25, RngStream(9, 1, 0)).rows, range(16)
        ))
    assert all(r == expected for r in results)


def test_distinct_streams_differ():
    base = gen_gnp(50, 0.4, RngStream(1, 0, 0))
    assert gen_gnp(50, 0.4, RngStream(1, 0, 1)).rows != base.rows
    assert gen_gnp(50, 0.4, RngStream(1, 1, 0)).rows != base.rows
    assert gen_gnp(50, 0.4, RngStream(2, 0, 0)).rows != base.rows


def test_p_out_of_range():
    with pytest.raises(ValidationError):
        gen_gnp(5, 1.5, RngStream(0))
    with pytest.raises(ValidationError):
        gen_gnp(5, -0.1, RngStream(0))


def test_n_cap():
    with pytest.raises(CapacityError):
        gen_gnp(5000, 0.1, RngStream(0))
    g = gen_gnp(5000, 1e-6, RngStream(0), n_cap=5000)
    assert g.n == 5000


def test_graph_invariants_enforced():
    with pytest.raises(ValidationError):
        Graph(2, (0b10, 0b00))  # asymmetric
    with pytest.raises(ValidationError):
        Graph(2, (0b01, 0b10))  # self-loop
    with pytest.raises(ValidationError):
        Graph(1, (0b10,))  # bit beyond n


def test_bipartite_trivial():
    assert gen_bipartite(3, 1.0, RngStream(0)).edge_count == 9
    assert gen_bipartite(3, 0.0, RngStream(0)).edge_count == 0
    a = gen_bipartite(6, 0.4, RngStream(5, 1, 2))
    b = gen_bipartite(6, 0.4, RngStream(5, 1, 2))
    assert a.rows == b.rows


def test_count_isolated_examples():
    assert count_isolated(BipartiteGraph(3, (0, 0, 0))) == 6
    assert count_isolated(gen_bipartite(3, 1.0, RngStream(0))) == 0
    # single edge a1-b1 leaves a2 and b2 isolated
    assert count_isolated(BipartiteGraph(2, (0b01, 0b00))) == 2


def test_isolated_plus_nonisolated_totals():
    for t in range(20):
        b = gen_bipartite(9, 0.15, RngStream(7, 0, t))
        iso = count_isolated(b)
        non = sum(1 for r in b.rows if r) + _right_touched(b)
        assert iso + non == 2 * b.N


def _right_touched(b: BipartiteGraph) -> int:
    hit = 0
    for r in b.rows:
        hit |= r
    return hit.bit_count()


def test_edge_frequency_band():
    # one fixed-seed graph; total edge count inside the 99.99% binomial band
    n, p = 1000, 0.01
    g = gen_gnp(n, p, RngStream(1234, 0, 0))
    pairs = n * (n - 1) // 2
    freq = g.edge_count / pairs
    half = 3.890591886 * math.sqrt(p * (1 - p) / pairs)
    assert abs(freq - p) <= half


def test_pair_index_roundtrip():
    for n in (2, 3, 10, 57):
        t = 0
        for u in range(n):
            for v in range(u + 1, n):
                assert pair_index(n, u, v) == t
                assert pair_from_index(n, t) == (u, v)
                t += 1


def test_sample_pair_indices_sorted_unique():
    idx = sample_pair_indices(10_000, 0.2, RngStream(5).generator())
    assert idx == sorted(set(idx))
    assert all(0 <= t < 10_000 for t in idx)


def test_dump_roundtrip():
    g = gen_gnp(21, 0.3, RngStream(8))
    text = dump_graph(g)
    lines = text.splitlines()
    assert lines[0] == "n=21"
    assert len(lines) == 22
    assert all(len(ln) == 6 for ln in lines[1:])  # ceil(21/4) hex digits
    assert all(ln == ln.lower() for ln in lines[1:])
    assert load_graph(text) == g


def test_dump_rejects_garbage():
    with pytest.raises(ValidationError):
        load_graph("m=3\n0\n0\n0\n")
