"""Observables of a growing three-type run: normalized degree shares, the
product M = xyz, the unwrapped winding angle about the simplex center, the
realized stochastic-approximation noise, and per-run convergence summaries.

Winding is measured in the fixed 2D chart of :mod:`typed_pa.field` about
the exact center (1/3, 1/3, 1/3), not about the run's own limit, so circuit
counts are comparable across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .field import field_eval, to_chart
from .graph import GraphState

TWO_PI = 2.0 * math.pi
# a wrapped checkpoint-to-checkpoint angle step this close to pi means the
# checkpoint schedule is too sparse to trust the unwrapping
THETA_ALIAS_MARGIN = 1e-3

TRAJECTORY_COLUMNS = ("n", "gamma", "x", "y", "z", "M", "theta")
SUMMARY_COLUMNS = ("seed", "M_final", "M_range", "dtheta", "circuits",
                   "M27_final")


@dataclass(frozen=True)
class TrajectoryRecord:
    """State snapshot after n added vertices.

    theta is the winding angle unwrapped against the previous record, so a
    sequence of records built in order carries a continuous angle.
    """
    n: int
    gamma: float
    shares: Tuple[float, float, float]
    M: float
    theta: float
    vertex_counts: Tuple[int, ...]

    def csv_row(self) -> tuple:
        x, y, z = self.shares
        return (self.n, self.gamma, x, y, z, self.M, self.theta)


def _wrap(angle: float) -> float:
    """Reduce to [-pi, pi)."""
    return (angle + math.pi) % TWO_PI - math.pi


def record(state: GraphState,
           prev: Optional[TrajectoryRecord] = None) -> TrajectoryRecord:
    """Snapshot the state's observables, unwrapping theta against prev."""
    if state.num_types != 3:
        raise ValueError("share observables are defined for 3 types")
    # every type keeps its start-graph degrees, so no share can hit zero
    assert min(state.type_edge_ends) > 0, "a type lost all edge ends"
    shares = state.shares()
    a, b = to_chart(shares)
    raw = math.atan2(b, a)
    if prev is None:
        theta = raw
    else:
        theta = prev.theta + _wrap(raw - prev.theta)
    return TrajectoryRecord(
        n=state.added_vertices,
        gamma=state.gamma,
        shares=(float(shares[0]), float(shares[1]), float(shares[2])),
        M=float(shares.prod()),
        theta=theta,
        vertex_counts=tuple(state.type_vertex_counts))


def realized_noise(prev: TrajectoryRecord,
                   nxt: TrajectoryRecord) -> np.ndarray:
    """Realized noise of one growth step: n*(shares' - shares) - P(shares).

    For consecutive records this is the xi + R term of the step recursion;
    its running mean should hover near 0 and its magnitude stays bounded.
    """
    if nxt.n != prev.n + 1:
        raise ValueError("realized noise needs consecutive records")
    dshares = np.array(nxt.shares) - np.array(prev.shares)
    return prev.n * dshares - field_eval(prev.shares)


def circuits(records: Sequence[TrajectoryRecord]) -> List[int]:
    """n at which the unwrapped angle first reaches each full turn 2*pi*i."""
    out: List[int] = []
    k = 1
    for rec in records:
        while rec.theta >= TWO_PI * k:
            out.append(rec.n)
            k += 1
    return out


def max_wrapped_step(records: Sequence[TrajectoryRecord]) -> float:
    """Largest single wrapped angle increment between consecutive records."""
    worst = 0.0
    for prev, nxt in zip(records, records[1:]):
        worst = max(worst, abs(_wrap(nxt.theta - prev.theta)))
    return worst


@dataclass(frozen=True)
class RunSummary:
    """Convergence diagnostics of one run.

    M_range and share_ranges are taken over the last decade of n,
    [n_max/10, n_max]: M stabilizes there while the shares keep moving.
    theta_aliased warns that some angle step came within
    THETA_ALIAS_MARGIN of pi and the checkpoint schedule needs densifying.
    """
    seed: Optional[int]
    n_max: int
    M_final: float
    M_range: float
    dtheta: float
    share_ranges: Tuple[float, float, float]
    circuits: List[int]
    theta_aliased: bool

    def csv_row(self) -> tuple:
        return (self.seed if self.seed is not None else -1,
                self.M_final, self.M_range, self.dtheta,
                len(self.circuits), 27.0 * self.M_final)


def convergence_report(records: Sequence[TrajectoryRecord],
                       seed: Optional[int] = None) -> RunSummary:
    if not records:
        raise ValueError("no records")
    n_max = records[-1].n
    window = [r for r in records if 10 * r.n >= n_max]
    ms = [r.M for r in window]
    xs = np.array([r.shares for r in window])
    ranges = tuple(float(xs[:, i].max() - xs[:, i].min()) for i in range(3))
    return RunSummary(
        seed=seed,
        n_max=n_max,
        M_final=records[-1].M,
        M_range=max(ms) - min(ms),
        dtheta=records[-1].theta - records[0].theta,
        share_ranges=ranges,
        circuits=circuits(records),
        theta_aliased=max_wrapped_step(records) >= math.pi - THETA_ALIAS_MARGIN)
