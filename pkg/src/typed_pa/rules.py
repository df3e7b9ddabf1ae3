"""Type-assignment rules: map neighbor-type count vectors to distributions over types.

A rule fixes the number of types N and the number of sampled neighbors m.
For every count vector u (nonnegative entries summing to m) it yields a
probability vector over the N types. Built-in rules: ``rps`` (cyclic
dominance on 3 types), ``linear`` (copy a uniformly random neighbor),
``uniform_visible`` (uniform over the types present among neighbors), and
``table`` (explicit user-supplied map).
"""

from __future__ import annotations

from typing import Dict, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

PROB_TOL = 1e-12

# Winner of a mixed pair: rock(0) beats scissors(2), paper(1) beats rock,
# scissors beats paper. Diagonal entries are ties (copy the type).
RPS_WINNER = (
    (0, 1, 0),
    (1, 1, 2),
    (0, 2, 2),
)


def all_count_vectors(num_types: int, m: int) -> Iterator[Tuple[int, ...]]:
    """Yield every length-N vector of nonnegative ints summing to m."""
    if num_types == 1:
        yield (m,)
        return
    for first in range(m + 1):
        for rest in all_count_vectors(num_types - 1, m - first):
            yield (first,) + rest


def _validate_distribution(u, p, num_types: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (num_types,):
        raise ValueError(f"p_u for u={u} has shape {p.shape}, expected ({num_types},)")
    if np.any(p < 0):
        raise ValueError(f"p_u for u={u} has negative entries: {p}")
    if abs(p.sum() - 1.0) > PROB_TOL:
        raise ValueError(f"p_u for u={u} sums to {p.sum()!r}, not 1")
    p.flags.writeable = False
    return p


class TypeRule:
    """Immutable map from count vectors u to assignment distributions p_u.

    The full table is built and validated at construction; lookups are
    plain dict reads so the growth loop stays cheap.
    """

    def __init__(self, kind: str, num_types: int, m: int,
                 table: Mapping[Tuple[int, ...], Sequence[float]]):
        if num_types < 1:
            raise ValueError("need at least one type")
        if m < 1:
            raise ValueError("need m >= 1 neighbors")
        self.kind = kind
        self.num_types = num_types
        self.m = m
        full: Dict[Tuple[int, ...], np.ndarray] = {}
        for u in all_count_vectors(num_types, m):
            if u not in table:
                raise ValueError(f"rule table missing count vector {u}")
            full[u] = _validate_distribution(u, table[u], num_types)
        self._table = full

    def __repr__(self):
        return f"TypeRule(kind={self.kind!r}, num_types={self.num_types}, m={self.m})"

    def assign_distribution(self, u: Sequence[int]) -> np.ndarray:
        """Probability vector for a new vertex whose neighbor counts are u."""
        key = tuple(int(c) for c in u)
        if len(key) != self.num_types or any(c < 0 for c in key) or sum(key) != self.m:
            raise ValueError(f"count vector {key} is not a composition of m={self.m} "
                             f"over {self.num_types} types")
        try:
            return self._table[key]
        except KeyError:
            raise ValueError(f"rule has no entry for count vector {key}") from None

    def deterministic_type(self, u: Sequence[int]) -> Optional[int]:
        """The forced type if p_u is a point mass, else None."""
        p = self.assign_distribution(u)
        hits = np.nonzero(p == 1.0)[0]
        return int(hits[0]) if hits.size else None

    def sample_type(self, u: Sequence[int], rng: np.random.Generator) -> int:
        """Draw the new vertex's type from p_u.

        Point masses consume no randomness; otherwise exactly one float is
        drawn (inverse-CDF by linear scan, N is small).
        """
        forced = self.deterministic_type(u)
        if forced is not None:
            return forced
        p = self.assign_distribution(u)
        x = rng.random()
        acc = 0.0
        for i in range(self.num_types - 1):
            acc += p[i]
            if x < acc:
                return i
        return self.num_types - 1

    def items(self):
        return self._table.items()


def rps_rule() -> TypeRule:
    """Cyclic-dominance rule: 3 types, 2 neighbors; ties copy, mixed pairs
    adopt the winner."""
    table = {}
    for a in range(3):
        for b in range(3):
            u = [0, 0, 0]
            u[a] += 1
            u[b] += 1
            p = [0.0, 0.0, 0.0]
            p[RPS_WINNER[a][b]] = 1.0
            table[tuple(u)] = p
    return TypeRule("rps", 3, 2, table)


def linear_rule(num_types: int, m: int) -> TypeRule:
    """Copy the type of a uniformly chosen neighbor: p_u = u / m."""
    table = {u: [c / m for c in u] for u in all_count_vectors(num_types, m)}
    return TypeRule("linear", num_types, m, table)


def uniform_visible_rule(num_types: int, m: int) -> TypeRule:
    """Choose uniformly among the types present in the neighborhood."""
    table = {}
    for u in all_count_vectors(num_types, m):
        visible = [i for i, c in enumerate(u) if c > 0]
        p = [0.0] * num_types
        for i in visible:
            p[i] = 1.0 / len(visible)
        table[u] = p
    return TypeRule("uniform_visible", num_types, m, table)


def table_rule(num_types: int, m: int,
               table: Mapping[Tuple[int, ...], Sequence[float]]) -> TypeRule:
    """Explicit user-supplied table; every count vector must be present."""
    return TypeRule("table", num_types, m, table)


def load_table_rule(path) -> TypeRule:
    """Read a table rule from a text file of lines ``u_1 .. u_N : p_1 .. p_N``.

    Blank lines and lines starting with ``#`` are skipped. N and m are
    inferred from the first entry.
    """
    table: Dict[Tuple[int, ...], Tuple[float, ...]] = {}
    num_types = None
    m = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'u_1 .. u_N : p_1 .. p_N'")
            left, right = line.split(":", 1)
            u = tuple(int(tok) for tok in left.split())
            p = tuple(float(tok) for tok in right.split())
            if num_types is None:
                num_types = len(u)
                m = sum(u)
            if len(u) != num_types or len(p) != num_types:
                raise ValueError(f"{path}:{lineno}: inconsistent vector lengths")
            if sum(u) != m:
                raise ValueError(f"{path}:{lineno}: count vector sums to {sum(u)}, "
                                 f"expected m={m}")
            table[u] = p
    if not table:
        raise ValueError(f"{path}: no rule entries found")
    return TypeRule("table", num_types, m, table)


_BUILTIN_FACTORIES = {
    "rps": lambda num_types, m: rps_rule(),
    "linear": linear_rule,
    "uniform_visible": uniform_visible_rule,
}


def make_rule(model: str, num_types: int = 3, m: int = 2) -> TypeRule:
    """Build a rule from a model name or a table-file path."""
    if model == "rps":
        if (num_types, m) != (3, 2):
            raise ValueError("rps rule requires 3 types and m=2")
        return rps_rule()
    if model in _BUILTIN_FACTORIES:
        return _BUILTIN_FACTORIES[model](num_types, m)
    return load_table_rule(model)
