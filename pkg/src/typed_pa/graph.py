"""Growing multigraph with degree-proportional (or affine) neighbor sampling.

The graph is stored as a flat edge-end array: entry j is the vertex owning
edge-end j, so a uniform index into the array realizes degree-proportional
vertex sampling in O(1). Each growth step samples m existing vertices
independently with replacement, assigns the new vertex a type from the
rule applied to the sampled type counts, and appends m edges.

Affine sampling weights a vertex by degree + alpha (alpha > -2): alpha > 0
uses a degree/uniform mixture, alpha < 0 rejection sampling.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .rules import TypeRule

# Floats are taken from the run's generator in blocks of this size; blocks
# are transparent prefetching, so consumption order equals stream order.
_BUF_SIZE = 1 << 14


@dataclass
class StartGraph:
    """Fixed initial graph: vertex types plus an edge list.

    Vertices are 0..len(types)-1. Every type in 0..N-1 must appear and no
    vertex may be isolated (an isolated vertex could never be sampled).
    """

    edges: List[Tuple[int, int]]
    types: List[int]

    @property
    def num_vertices(self) -> int:
        return len(self.types)

    @property
    def num_types(self) -> int:
        return max(self.types) + 1 if self.types else 0

    def degrees(self) -> List[int]:
        deg = [0] * self.num_vertices
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    def validate(self) -> None:
        n = self.num_vertices
        if n == 0:
            raise ValueError("start graph has no vertices")
        for a, b in self.edges:
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) references a missing vertex")
        if any(t < 0 for t in self.types):
            raise ValueError("negative type index")
        present = set(self.types)
        missing = set(range(self.num_types)) - present
        if missing:
            raise ValueError(f"types {sorted(missing)} not represented in start graph")
        for v, d in enumerate(self.degrees()):
            if d == 0:
                raise ValueError(f"vertex {v} is isolated")


def complete_graph_start(types: Sequence[int]) -> StartGraph:
    n = len(types)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
    return StartGraph(edges=edges, types=list(types))


def named_start(name: str) -> StartGraph:
    """Built-in starts: "k3" (one vertex per type) and "k6" (two per type)."""
    if name == "k3":
        return complete_graph_start([0, 1, 2])
    if name == "k6":
        return complete_graph_start([0, 0, 1, 1, 2, 2])
    raise ValueError(f"unknown start graph {name!r} (expected 'k3' or 'k6')")


def load_start_graph(path) -> StartGraph:
    """Parse an edge-list file: "v e N", then v lines "vertex type", then e
    lines "endpoint endpoint"."""
    with open(path) as fh:
        tokens = [ln.split() for ln in fh
                  if ln.strip() and not ln.lstrip().startswith("#")]
    if not tokens or len(tokens[0]) != 3:
        raise ValueError(f"{path}: first line must be 'v e N'")
    v, e, n_types = (int(x) for x in tokens[0])
    if len(tokens) != 1 + v + e:
        raise ValueError(f"{path}: expected {1 + v + e} lines, found {len(tokens)}")
    types = [0] * v
    for row in tokens[1:1 + v]:
        idx, t = int(row[0]), int(row[1])
        if not 0 <= idx < v:
            raise ValueError(f"{path}: vertex index {idx} out of range")
        types[idx] = t
    edges = [(int(row[0]), int(row[1])) for row in tokens[1 + v:]]
    start = StartGraph(edges=edges, types=types)
    if start.num_types != n_types:
        raise ValueError(f"{path}: header says {n_types} types, "
                         f"found {start.num_types}")
    return start


def resolve_start(spec: str) -> StartGraph:
    """Accept a built-in name or a path to an edge-list file."""
    try:
        return named_start(spec)
    except ValueError:
        return load_start_graph(spec)


class StepRecord(NamedTuple):
    """Observable outcome of one growth step."""
    u: Tuple[int, ...]
    new_type: int


class GraphState:
    """Mutable state of the growing multigraph.

    Tallies are exact integers; `gamma` (the total attachment weight
    sum_v degree(v) + alpha) is derived, never accumulated, so it cannot
    drift. All arrays grow amortized O(1) per edge.
    """

    def __init__(self, start: StartGraph, alpha: float = 0.0, num_types: int = 0):
        start.validate()
        if alpha <= -2:
            raise ValueError(f"alpha must exceed -2, got {alpha}")
        n_types = max(num_types, start.num_types)
        degrees = start.degrees()
        if alpha < 0:
            for v, d in enumerate(degrees):
                if d + alpha <= 0:
                    raise ValueError(
                        f"start vertex {v} has degree {d}; degree + alpha must be "
                        f"positive for alpha={alpha}")
        self.alpha = float(alpha)
        self.num_types = n_types
        self.e0 = len(start.edges)
        self.v0 = start.num_vertices
        self.vertex_types = array("i", start.types)
        self.degree = array("i", degrees)
        owners = array("i")
        for a, b in start.edges:
            owners.append(a)
            owners.append(b)
        self.edge_end_owners = owners
        self.total_degree = len(owners)
        self.type_edge_ends = [0] * n_types
        self.type_vertex_counts = [0] * n_types
        for v, t in enumerate(start.types):
            self.type_edge_ends[t] += degrees[v]
            self.type_vertex_counts[t] += 1

    @property
    def num_vertices(self) -> int:
        return len(self.vertex_types)

    @property
    def added_vertices(self) -> int:
        return self.num_vertices - self.v0

    @property
    def gamma(self) -> float:
        if self.alpha == 0.0:
            return float(self.total_degree)
        return self.total_degree + self.alpha * self.num_vertices

    def shares(self) -> np.ndarray:
        """Normalized per-type attachment weights (sum to 1).

        For alpha = 0 this is the edge-end share; in general it is the
        probability of each type under a single preferential choice.
        """
        if self.alpha == 0.0:
            return np.array(self.type_edge_ends, dtype=float) / self.total_degree
        w = (np.array(self.type_edge_ends, dtype=float)
             + self.alpha * np.array(self.type_vertex_counts, dtype=float))
        return w / self.gamma

    def validate(self) -> None:
        """Check every bookkeeping invariant; raises AssertionError on drift."""
        assert self.total_degree == len(self.edge_end_owners)
        assert sum(self.degree) == self.total_degree
        assert sum(self.type_edge_ends) == self.total_degree
        assert sum(self.type_vertex_counts) == self.num_vertices
        deg = [0] * self.num_vertices
        for v in self.edge_end_owners:
            deg[v] += 1
        assert list(self.degree) == deg
        tte = [0] * self.num_types
        tvc = [0] * self.num_types
        for v, t in enumerate(self.vertex_types):
            tte[t] += deg[v]
            tvc[t] += 1
        assert tte == self.type_edge_ends
        assert tvc == self.type_vertex_counts


def init(start: StartGraph, alpha: float = 0.0) -> GraphState:
    """Validate the start graph and build the initial state."""
    return GraphState(start, alpha)


def sample_neighbor(state: GraphState, rng) -> int:
    """Draw one existing vertex v with probability (degree(v) + alpha) / gamma.

    alpha = 0: one uniform edge end. alpha > 0: mixture of a uniform edge
    end and a uniform vertex. alpha in (-2, 0): propose a uniform edge end,
    accept with probability (degree+alpha)/degree, retry on reject.
    """
    owners = state.edge_end_owners
    n_ends = state.total_degree
    alpha = state.alpha
    if alpha == 0.0:
        j = int(rng.random() * n_ends)
        if j == n_ends:
            j -= 1
        return owners[j]
    if alpha > 0.0:
        gamma = n_ends + alpha * state.num_vertices
        if rng.random() * gamma < n_ends:
            j = int(rng.random() * n_ends)
            return owners[min(j, n_ends - 1)]
        v = int(rng.random() * state.num_vertices)
        return min(v, state.num_vertices - 1)
    degree = state.degree
    while True:
        j = int(rng.random() * n_ends)
        v = owners[min(j, n_ends - 1)]
        d = degree[v]
        if rng.random() * d < d + alpha:
            return v


def add_vertex(state: GraphState, rule: TypeRule, m: int, rng) -> StepRecord:
    """Grow by one vertex: sample m neighbors with replacement from the
    current graph, assign the new vertex's type via the rule, append m edges.

    The sampling pool excludes ends added during this step, so multi-edges
    can arise but self-loops cannot.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if rule.num_types != state.num_types or rule.m != m:
        raise ValueError("rule shape does not match state/m")
    if state.alpha < 0 and m + state.alpha <= 0:
        raise ValueError(f"m + alpha must be positive, got {m + state.alpha}")
    sampled = [sample_neighbor(state, rng) for _ in range(m)]
    u = [0] * state.num_types
    vertex_types = state.vertex_types
    for v in sampled:
        u[vertex_types[v]] += 1
    u = tuple(u)
    new_type = rule.sample_type(u, rng)
    _append_step(state, sampled, new_type, m)
    return StepRecord(u=u, new_type=new_type)


def _append_step(state: GraphState, sampled, new_type: int, m: int) -> None:
    owners = state.edge_end_owners
    new_vertex = state.num_vertices
    for v in sampled:
        owners.append(v)
        state.degree[v] += 1
        state.type_edge_ends[state.vertex_types[v]] += 1
    for _ in range(m):
        owners.append(new_vertex)
    state.vertex_types.append(new_type)
    state.degree.append(m)
    state.type_edge_ends[new_type] += m
    state.type_vertex_counts[new_type] += 1
    state.total_degree += 2 * m


class GrowthEngine:
    """Sequential growth driver with a buffered random stream.

    Consumes floats from the generator in the same per-step order as
    repeated :func:`add_vertex` calls, so a whole run driven by
    ``advance`` is bit-identical to one driven step by step. One engine
    owns one state and one generator; runs for distinct seeds are
    independent and may execute in parallel at the process level.
    """

    def __init__(self, state: GraphState, rule: TypeRule, m: int,
                 rng: np.random.Generator):
        if rule.num_types != state.num_types or rule.m != m:
            raise ValueError("rule shape does not match state/m")
        if state.alpha < 0 and m + state.alpha <= 0:
            raise ValueError(f"m + alpha must be positive, got {m + state.alpha}")
        self.state = state
        self.rule = rule
        self.m = m
        self.rng = rng
        self._buf: list = []
        self._pos = 0
        # Per ordered key (base-N encoding of the sampled type sequence):
        # (forced type, None) for point masses, (-1, cumulative dist) else.
        self._tab: dict = {}

    def _key_tables(self, key: int, types_in_order) -> Tuple[int, Optional[list]]:
        u = [0] * self.state.num_types
        for t in types_in_order:
            u[t] += 1
        forced = self.rule.deterministic_type(u)
        if forced is not None:
            self._tab[key] = (forced, None)
            return forced, None
        p = self.rule.assign_distribution(u)
        cum = list(np.cumsum(p))
        cum[-1] = 2.0  # sentinel: rounding in the prefix sum must not
        # push the scan past the last type
        self._tab[key] = (-1, cum)
        return -1, cum

    def _refill(self, needed: int) -> None:
        tail = self._buf[self._pos:]
        draw = max(_BUF_SIZE, needed)
        self._buf = tail + self.rng.random(draw).tolist()
        self._pos = 0

    def step(self) -> StepRecord:
        """One growth step through the buffered stream."""
        rec = self._advance(1, want_record=True)
        return rec

    def advance(self, steps: int, validate_every_step: bool = False) -> None:
        """Run `steps` growth steps as fast as the interpreter allows."""
        if validate_every_step:
            for _ in range(steps):
                self._advance(1, want_record=False)
                self.state.validate()
            return
        self._advance(steps, want_record=False)

    def _advance(self, steps: int, want_record: bool) -> Optional[StepRecord]:
        state = self.state
        m = self.m
        num_types = state.num_types
        alpha = state.alpha
        owners = state.edge_end_owners
        vtypes = state.vertex_types
        degree = state.degree
        tte = state.type_edge_ends
        tvc = state.type_vertex_counts
        tab = self._tab
        ow_append = owners.append
        vt_append = vtypes.append
        dg_append = degree.append
        key_tables = self._key_tables
        n_ends = state.total_degree
        new_vertex = state.num_vertices
        buf = self._buf
        pos = self._pos
        blen = len(buf)
        # Upper bound on floats per step for the non-rejection paths; the
        # rejection path (alpha < 0) refills inside its own loop.
        per_step = m * (2 if alpha > 0.0 else 1) + 1
        last: Optional[StepRecord] = None
        try:
            for _ in range(steps):
                if pos + per_step > blen:
                    self._pos = pos
                    self._refill(per_step)
                    buf = self._buf
                    pos = 0
                    blen = len(buf)
                key = 0
                t1 = t2 = -1  # type tallies for the sampled ends (m=2 fast path)
                if alpha == 0.0:
                    if m == 2:
                        j = int(buf[pos] * n_ends)
                        v1 = owners[j if j < n_ends else n_ends - 1]
                        j = int(buf[pos + 1] * n_ends)
                        v2 = owners[j if j < n_ends else n_ends - 1]
                        pos += 2
                        t1 = vtypes[v1]
                        t2 = vtypes[v2]
                        key = t1 * num_types + t2
                    else:
                        sampled = []
                        for i in range(m):
                            j = int(buf[pos + i] * n_ends)
                            sampled.append(owners[j if j < n_ends else n_ends - 1])
                        pos += m
                        for v in sampled:
                            key = key * num_types + vtypes[v]
                else:
                    sampled = []
                    n_verts = new_vertex
                    if alpha > 0.0:
                        gamma = n_ends + alpha * n_verts
                        for _i in range(m):
                            if buf[pos] * gamma < n_ends:
                                j = int(buf[pos + 1] * n_ends)
                                v = owners[j if j < n_ends else n_ends - 1]
                            else:
                                v = int(buf[pos + 1] * n_verts)
                                if v == n_verts:
                                    v -= 1
                            pos += 2
                            sampled.append(v)
                    else:
                        for _i in range(m):
                            while True:
                                if pos + 2 > blen:
                                    self._pos = pos
                                    self._refill(2)
                                    buf = self._buf
                                    pos = 0
                                    blen = len(buf)
                                j = int(buf[pos] * n_ends)
                                v = owners[j if j < n_ends else n_ends - 1]
                                d = degree[v]
                                accept = buf[pos + 1] * d < d + alpha
                                pos += 2
                                if accept:
                                    break
                            sampled.append(v)
                    for v in sampled:
                        key = key * num_types + vtypes[v]
                try:
                    forced, c = tab[key]
                except KeyError:
                    sampled_types = (t1, t2) if t2 >= 0 else \
                        tuple(vtypes[v] for v in sampled)
                    forced, c = key_tables(key, sampled_types)
                if forced >= 0:
                    new_type = forced
                else:
                    if pos >= blen:
                        self._pos = pos
                        self._refill(1)
                        buf = self._buf
                        pos = 0
                        blen = len(buf)
                    x = buf[pos]
                    pos += 1
                    new_type = 0
                    while c[new_type] <= x:
                        new_type += 1
                # append: sampled ends first (in sample order), then the new
                # vertex's m ends
                if t2 >= 0:
                    ow_append(v1)
                    ow_append(v2)
                    degree[v1] += 1
                    degree[v2] += 1
                    tte[t1] += 1
                    tte[t2] += 1
                else:
                    for v in sampled:
                        ow_append(v)
                        degree[v] += 1
                        tte[vtypes[v]] += 1
                for _ in range(m):
                    ow_append(new_vertex)
                vt_append(new_type)
                dg_append(m)
                tte[new_type] += m
                tvc[new_type] += 1
                n_ends += 2 * m
                new_vertex += 1
                if want_record:
                    u = [0] * num_types
                    if t2 >= 0:
                        u[t1] += 1
                        u[t2] += 1
                    else:
                        for v in sampled:
                            u[vtypes[v]] += 1
                    last = StepRecord(u=tuple(u), new_type=new_type)
        finally:
            state.total_degree = n_ends
            self._pos = pos
            self._buf = buf
        return last
