"""Graph representations and deterministic seeded samplers.

Graphs are stored as bit-packed adjacency rows (one Python int per vertex,
bit v of row u set iff uv is an edge).  Sampling of G(n,p) and of the
bipartite model G(N,N,p) uses geometric skipping over the lexicographic
pair order, so the output is a pure function of (size, p, stream): the
same inputs always reproduce the same graph, bit for bit, for every p.

Randomness comes from a counter-based keyed generator (Philox) keyed by
the triple (master_seed, experiment_id, trial_index); distinct triples
give independent streams, which makes parallel trials order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .errors import CapacityError, ValidationError

# Default cap on vertex count, for memory predictability.  Raise explicitly
# when a larger run is intended.
DEFAULT_N_CAP = 4096


@dataclass(frozen=True, slots=True)
class RngStream:
    """Key of one reproducible random stream.

    The generated bit stream is a pure function of the three fields.
    """

    master_seed: int
    experiment_id: int = 0
    trial_index: int = 0

    def generator(self) -> Generator:
        seq = SeedSequence(
            entropy=self.master_seed,
            spawn_key=(self.experiment_id, self.trial_index),
        )
        return Generator(Philox(seq))


@dataclass(frozen=True, slots=True)
class Graph:
    """Simple undirected graph on n labelled vertices, bit-packed rows."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError("vertex count must be >= 0")
        if len(self.rows) != self.n:
            raise ValidationError("adjacency must have one row per vertex")
        mask = (1 << self.n) - 1
        for u, row in enumerate(self.rows):
            if row & ~mask:
                raise ValidationError(f"row {u} sets bits beyond n")
            if row >> u & 1:
                raise ValidationError(f"self-loop at vertex {u}")
            m = row
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                if not self.rows[v] >> u & 1:
                    raise ValidationError(f"asymmetric adjacency at {u},{v}")

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def degree(self, u: int) -> int:
        return self.rows[u].bit_count()


@dataclass(frozen=True, slots=True)
class BipartiteGraph:
    """Bipartite graph between two sides of size N; rows[a] holds left vertex
    a's neighbours on the right side (bit b set iff edge a-b present)."""

    N: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if self.N < 0:
            raise ValidationError("side size must be >= 0")
        if len(self.rows) != self.N:
            raise ValidationError("biadjacency must have one row per left vertex")
        mask = (1 << self.N) - 1
        for a, row in enumerate(self.rows):
            if row & ~mask:
                raise ValidationError(f"row {a} sets bits beyond N")

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows)


def pair_index(n: int, u: int, v: int) -> int:
    """Lexicographic index of the unordered pair (u,v), u < v, among C(n,2)."""
    if not 0 <= u < v < n:
        raise ValidationError("need 0 <= u < v < n")
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


def pair_from_index(n: int, t: int) -> tuple[int, int]:
    """Inverse of pair_index; exact for all t in [0, C(n,2))."""
    u = (2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * t)) // 2
    # isqrt truncation can land one row off; fix against exact offsets
    while u * (2 * n - u - 1) // 2 > t:
        u -= 1
    while (u + 1) * (2 * n - u - 2) // 2 <= t:
        u += 1
    v = t - u * (2 * n - u - 1) // 2 + u + 1
    return u, v


def _check_p(p: float) -> float:
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise ValidationError(f"edge probability {p!r} outside [0,1]")
    return float(p)


def sample_pair_indices(total: int, p: float, rng: Generator) -> list[int]:
    """Indices (ascending) of the selected pairs among `total`, each kept
    independently with probability p, via geometric skipping.

    Skip lengths are floor(log(1-U)/log(1-p)); p=0 and p=1 are the exact
    limits of that rule (infinite skip / zero skip) and consume no randomness.
    """
    _check_p(p)
    if total == 0 or p == 0.0:
        return []
    if p == 1.0:
        return list(range(total))
    log_q = math.log1p(-p)
    out: list[int] = []
    pos = -1
    batch = max(32, int(total * p * 1.2) + 8)
    while True:
        us = rng.random(batch)
        steps = np.floor(np.log1p(-us) / log_q).astype(np.int64) + 1
        positions = pos + np.cumsum(steps)
        selected = positions[positions < total]
        out.extend(selected.tolist())
        if len(selected) < len(positions):
            return out
        pos = int(positions[-1])


def gen_gnp(n: int, p: float, stream: RngStream, *, n_cap: int = DEFAULT_N_CAP) -> Graph:
    """Sample G(n,p): every one of the C(n,2) vertex pairs is an edge
    independently with probability p.  Deterministic given (n, p, stream)."""
    if n < 0:
        raise ValidationError("n must be >= 0")
    if n > n_cap:
        raise CapacityError(f"n={n} exceeds cap {n_cap}", reason="capacity:graph")
    _check_p(p)
    rows = [0] * n
    for t in sample_pair_indices(n * (n - 1) // 2, p, stream.generator()):
        u, v = pair_from_index(n, t)
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return Graph(n, tuple(rows))


def gen_bipartite(N: int, p: float, stream: RngStream, *, n_cap: int = DEFAULT_N_CAP) -> BipartiteGraph:
    """Sample G(N,N,p) over the N*N cross pairs; same contract as gen_gnp."""
    if N < 0:
        raise ValidationError("N must be >= 0")
    if N > n_cap:
        raise CapacityError(f"N={N} exceeds cap {n_cap}", reason="capacity:graph")
    _check_p(p)
    rows = [0] * N
    for t in sample_pair_indices(N * N, p, stream.generator()):
        rows[t // N] |= 1 << (t % N)
    return BipartiteGraph(N, tuple(rows))


def count_isolated(B: BipartiteGraph) -> int:
    """Number of vertices with no incident edge, both sides combined (of 2N)."""
    left = sum(1 for r in B.rows if r == 0)
    right_hit = 0
    for r in B.rows:
        right_hit |= r
    return left + B.N - right_hit.bit_count()


def dump_graph(G: Graph) -> str:
    """Serialize: header line ``n=<n>``, then one lowercase hex row per vertex."""
    width = max(1, (G.n + 3) // 4)
    lines = [f"n={G.n}"]
    lines.extend(format(row, f"0{width}x") for row in G.rows)
    return "\n".join(lines) + "\n"


def load_graph(text: str) -> Graph:
    """Parse the dump_graph format back into a Graph."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ValidationError("graph dump must start with 'n=<n>'")
    n = int(lines[0][2:])
    rows = [int(ln, 16) for ln in lines[1 : n + 1]]
    if len(rows) != n:
        raise ValidationError("graph dump row count does not match header")
    return Graph(n, tuple(rows))
