"""Exact oracles for the one-step dynamics and the combinatorial laws
behind them.

Everything here is enumeration or closed-form integer combinatorics:
no sampling, no simulation. These functions are the reference the
simulator and the closed-form update factors are checked against.
Enumeration sums use compensated summation (math.fsum) so identities
hold to 1e-12 and better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np

from .rules import TypeRule, all_count_vectors


@dataclass(frozen=True)
class StepOutcome:
    """One (sampled type counts, assigned type) outcome of a growth step.

    delta_type_edge_ends counts edge ends added per type: one per sampled
    vertex plus m on the new vertex. It sums to 2m and does not depend on
    the attachment offset alpha; alpha only reweights totals downstream.
    """
    probability: float
    sampled_counts: Tuple[int, ...]
    new_vertex_type: int
    delta_type_edge_ends: Tuple[int, ...]


def _multinomial(u: Sequence[int]) -> int:
    m = sum(u)
    out = 1
    for c in u:
        out *= math.comb(m, c)
        m -= c
    return out


def enumerate_step(shares, rule: TypeRule, m: int = 2) -> List[StepOutcome]:
    """All positive-probability outcomes of one step at the given type
    shares (each neighbor draw lands on type i with probability shares[i]).

    Zero-probability outcomes are dropped, so unanimous shares yield a
    single outcome.
    """
    shares = np.asarray(shares, dtype=float)
    n = rule.num_types
    if shares.shape != (n,):
        raise ValueError(f"expected {n} shares, got shape {shares.shape}")
    if np.any(shares < 0) or abs(shares.sum() - 1.0) > 1e-9:
        raise ValueError("shares must be a probability vector")
    if m != rule.m:
        raise ValueError(f"rule is for m={rule.m}, got m={m}")
    outcomes: List[StepOutcome] = []
    for u in all_count_vectors(n, m):
        pu = float(_multinomial(u))
        for i, c in enumerate(u):
            if c:
                pu *= shares[i] ** c
        if pu == 0.0:
            continue
        dist = rule.assign_distribution(u)
        for t in range(n):
            pt = pu * dist[t]
            if pt == 0.0:
                continue
            delta = list(u)
            delta[t] += m
            outcomes.append(StepOutcome(
                probability=pt, sampled_counts=u, new_vertex_type=t,
                delta_type_edge_ends=tuple(delta)))
    return outcomes


def expected_M_next_enumerated(shares, gamma: float, rule: TypeRule,
                               m: int = 2, alpha: float = 0.0) -> float:
    """E[x'y'z'] after one step, summed over the full outcome enumeration.

    `gamma` is the current total attachment weight and `shares` the
    normalized per-type weights, so type i carries weight shares[i]*gamma.
    A step adds delta_type_edge_ends to the weights plus alpha on the new
    vertex's type, and gamma grows by 2m + alpha.
    """
    if rule.num_types != 3:
        raise ValueError("the product observable is defined for 3 types")
    w = np.asarray(shares, dtype=float) * gamma
    gamma_next = gamma + 2 * m + alpha
    terms = []
    for o in enumerate_step(shares, rule, m):
        prod = o.probability
        for i in range(3):
            extra = alpha if i == o.new_vertex_type else 0.0
            prod *= (w[i] + o.delta_type_edge_ends[i] + extra) / gamma_next
        terms.append(prod)
    return math.fsum(terms)


def expected_M_next(M: float, gamma: float) -> float:
    """Closed-form one-step conditional expectation of the product xyz for
    the three-type winner rule with m = 2: M*(1 - 30/g^2 + 56/g^3) with
    g = gamma + 4. Strictly below M for gamma >= 2, hence a supermartingale.
    """
    g = gamma + 4.0
    return M * (1.0 - 30.0 / g**2 + 56.0 / g**3)


def expected_M_next_affine(M: float, gamma: float, alpha: float) -> float:
    """Same expectation under affine attachment weight degree + alpha:
    M*(1 - (30 + 18a + 3a^2)*gamma/g^3 - (4+a)^3/g^3) with g = gamma+4+alpha.

    At alpha = 0 this delegates to :func:`expected_M_next`, to which it is
    algebraically identical.
    """
    if alpha == 0.0:
        return expected_M_next(M, gamma)
    g = gamma + 4.0 + alpha
    num = (30.0 + 18.0 * alpha + 3.0 * alpha**2) * gamma + (4.0 + alpha)**3
    return M * (1.0 - num / g**3)


def _stirling2_row(k: int) -> List[int]:
    """S(k, j) for j = 0..k (number of partitions of k items into j blocks)."""
    row = [1] + [0] * k
    for n in range(1, k + 1):
        new = [0] * (k + 1)
        for j in range(1, n + 1):
            new[j] = j * row[j] + row[j - 1]
        row = new
    return row


@dataclass(frozen=True)
class OccupancyLaw:
    """Distribution of the number of distinct values among k iid uniform
    draws from t symbols. counts[j] tallies the k-tuples with exactly j
    distinct values (exact integers summing to t^k); pmf = counts / t^k.
    """
    k: int
    t: int
    counts: Tuple[int, ...]

    @property
    def pmf(self) -> np.ndarray:
        total = self.t ** self.k
        return np.array([c / total for c in self.counts])

    @property
    def support(self) -> range:
        return range(len(self.counts))

    def mean_inv_zplus1(self) -> float:
        """E[1/(Z+1)], the factor the visible-type drift is built from."""
        total = self.t ** self.k
        num = 0
        den = 1
        for j, c in enumerate(self.counts):
            # accumulate sum c_j/(j+1) as an exact rational
            num = num * (j + 1) + c * den
            den *= (j + 1)
        return num / (den * total)


def occupancy(k: int, t: int) -> OccupancyLaw:
    """Exact occupancy law: P(Z = j) = S(k,j) * t!/(t-j)! / t^k.

    Z(0) = 0 with probability 1.
    """
    if k < 0 or t < 1:
        raise ValueError("need k >= 0 and t >= 1")
    if k == 0:
        return OccupancyLaw(k=0, t=t, counts=(1,))
    s_row = _stirling2_row(k)
    counts = [0] * (min(k, t) + 1)
    ff = 1  # falling factorial t!/(t-j)!
    for j in range(1, min(k, t) + 1):
        ff *= t - j + 1
        counts[j] = s_row[j] * ff
    law = OccupancyLaw(k=k, t=t, counts=tuple(counts))
    assert sum(law.counts) == t ** k
    return law


def drift_f(y: float, num_types: int, m: int) -> float:
    """One-step drift of a single type's vertex share under the visible-type
    rule: sum over how many of the m draws miss the type, each weighted by
    the chance 1/(Z+1) that the type wins among the distinct types seen.

    Zero at y = 0, y = 1, and the symmetric point y = 1/num_types.
    """
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    if num_types < 2 or m < 2:
        raise ValueError("need num_types >= 2 and m >= 2")
    t = num_types - 1
    terms = []
    for k in range(m):
        e_k = 1.0 if k == 0 else occupancy(k, t).mean_inv_zplus1()
        terms.append(math.comb(m, k) * (1.0 - y) ** k * y ** (m - k) * e_k)
    return math.fsum(terms) - y


_MAX_SUBSET_BASE = 25


def p_nmk(n: int, m: int, k: int, p) -> float:
    """Probability that at least k distinct elements appear among m iid
    draws from the distribution p on n elements.

    Degenerate cases are exact: 0 when min(n, m) < k, 1 when k <= 1 (any
    draw shows one element). Otherwise inclusion-exclusion over the sets
    of seen elements, grouped by subset sums, so cost is 2^n not n^m.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ValueError(f"p must have length {n}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("p must be a probability vector")
    if m < 1:
        raise ValueError("m must be >= 1")
    if min(n, m) < k:
        return 0.0
    if k <= 1:
        return 1.0
    if n > _MAX_SUBSET_BASE:
        raise ValueError(f"n = {n} too large for subset enumeration")
    j = k - 1  # P(at least k) = 1 - P(Z <= j), and j <= n-1 here
    terms = []
    for size in range(1, j + 1):
        coeff = (-1.0) ** (j - size) * math.comb(n - size - 1, j - size)
        if coeff == 0.0:
            continue
        subset_sum = math.fsum(
            math.fsum(p[list(T)]) ** m for T in combinations(range(n), size))
        terms.append(coeff * subset_sum)
    return 1.0 - math.fsum(terms)


@dataclass(frozen=True)
class UniformMaxReport:
    """Outcome of a grid search for the maximizer of p_nmk over the simplex."""
    n: int
    m: int
    k: int
    grid_step: float
    uniform_value: float
    max_other: float
    margin: float
    points_checked: int

    @property
    def uniform_strictly_max(self) -> bool:
        return self.margin > 0.0

    @property
    def identically_zero(self) -> bool:
        return self.uniform_value == 0.0 and self.max_other == 0.0


def verify_uniform_max(n: int, m: int, k: int,
                       grid_step: float = 0.02) -> UniformMaxReport:
    """Compare p_nmk at the uniform distribution against every other point
    of a simplex grid with the given step (grid_step must divide 1).
    """
    g = round(1.0 / grid_step)
    if abs(g * grid_step - 1.0) > 1e-9 or g < 1:
        raise ValueError("grid_step must divide 1")
    uniform = np.full(n, 1.0 / n)
    u_val = p_nmk(n, m, k, uniform)
    uniform_comp = (g // n,) * n if g % n == 0 else None
    max_other = -math.inf
    checked = 0
    for comp in all_count_vectors(n, g):
        if comp == uniform_comp:
            continue
        val = p_nmk(n, m, k, np.array(comp, dtype=float) / g)
        checked += 1
        if val > max_other:
            max_other = val
    return UniformMaxReport(
        n=n, m=m, k=k, grid_step=grid_step, uniform_value=u_val,
        max_other=max_other, margin=u_val - max_other, points_checked=checked)
