import math

import numpy as np
import pytest

from typed_pa.field import field_eval, from_chart, level_curve
from typed_pa.graph import StartGraph, add_vertex, init, named_start
from typed_pa.observables import (SUMMARY_COLUMNS, TRAJECTORY_COLUMNS,
                                  TrajectoryRecord, circuits,
                                  convergence_report, max_wrapped_step,
                                  realized_noise, record)
from typed_pa.oracles import expected_M_next
from typed_pa.rules import rps_rule


def share_state(degrees):
    """One vertex per type with the given (even-sum) degree tallies."""
    d0, d1, d2 = degrees
    a = (d0 + d1 - d2) // 2
    b = (d0 + d2 - d1) // 2
    c = (d1 + d2 - d0) // 2
    edges = [(0, 1)] * a + [(0, 2)] * b + [(1, 2)] * c
    return init(StartGraph(edges=edges, types=[0, 1, 2]))


def synthetic(n, theta, shares=(1 / 3, 1 / 3, 1 / 3), M=1 / 27):
    return TrajectoryRecord(n=n, gamma=0.0, shares=shares, M=M, theta=theta,
                            vertex_counts=(0, 0, 0))


def chart_angle(shares):
    # independent rendering of the chart geometry
    x, y, z = shares
    return math.atan2((x + y - 2 * z) / math.sqrt(6), (x - y) / math.sqrt(2))


# -------------------------------------------------------------------- records

def test_record_at_symmetric_start():
    rec = record(init(named_start("k3")))
    assert rec.n == 0 and rec.gamma == 6.0
    assert rec.shares == pytest.approx((1 / 3, 1 / 3, 1 / 3), rel=1e-15)
    assert rec.M == pytest.approx(1 / 27, rel=1e-15)
    assert rec.theta == 0.0
    assert rec.vertex_counts == (1, 1, 1)
    assert rec.csv_row() == (0, 6.0) + rec.shares + (rec.M, 0.0)
    assert len(TRAJECTORY_COLUMNS) == len(rec.csv_row())


def test_record_pinned_product():
    rec = record(share_state((10, 6, 4)))
    assert rec.shares == (0.5, 0.3, 0.2)
    assert rec.M == pytest.approx(0.03, rel=1e-15)
    assert 27 * rec.M == pytest.approx(0.81, rel=1e-15)


def test_record_product_is_recomputable():
    state = init(named_start("k6"))
    rng = np.random.default_rng(14)
    rule = rps_rule()
    rec = record(state)
    for _ in range(500):
        add_vertex(state, rule, 2, rng)
        rec = record(state, prev=rec)
        x, y, z = rec.shares
        assert abs(rec.M - x * y * z) <= 1e-15
        assert 0.0 <= rec.M <= 1 / 27 + 1e-15


def test_record_requires_three_types():
    two = init(StartGraph(edges=[(0, 1)], types=[0, 1]))
    with pytest.raises(ValueError):
        record(two)


def test_theta_increment_matches_chart_geometry():
    r1 = record(share_state((10, 6, 4)))
    r2 = record(share_state((9, 7, 4)), prev=r1)
    expected = chart_angle((0.45, 0.35, 0.2)) - chart_angle((0.5, 0.3, 0.2))
    assert r2.theta - r1.theta == pytest.approx(expected, abs=1e-15)
    assert r1.theta == pytest.approx(chart_angle((0.5, 0.3, 0.2)), abs=1e-15)


def test_theta_unwraps_across_the_branch_cut():
    # two states on either side of the chart's -pi/+pi ray (z = 1/3 with
    # x < y): the unwrapped difference is small even though the raw atan2
    # values differ by nearly 2*pi
    lo = record(share_state((30, 36, 34)))
    hi = record(share_state((31, 36, 33)), prev=lo)
    assert abs(hi.theta - lo.theta) < 0.4
    raw_gap = chart_angle((0.31, 0.36, 0.33)) - chart_angle((0.30, 0.36, 0.34))
    assert abs(raw_gap) > 5.8


# ----------------------------------------------------------------- noise term

def test_noise_of_exact_field_step_is_tiny():
    shares = np.array([0.5, 0.25, 0.25])
    n = 100
    stepped = shares + field_eval(shares) / n
    prev = synthetic(n, 0.0, shares=tuple(shares), M=float(shares.prod()))
    nxt = synthetic(n + 1, 0.0, shares=tuple(stepped), M=float(stepped.prod()))
    assert np.abs(realized_noise(prev, nxt)).max() <= 1e-13


def test_noise_requires_consecutive_records():
    with pytest.raises(ValueError):
        realized_noise(synthetic(10, 0.0), synthetic(12, 0.0))


def test_noise_is_centered_and_bounded_along_a_run():
    state = init(named_start("k3"))
    rng = np.random.default_rng(17)
    rule = rps_rule()
    recs = [record(state)]
    for _ in range(10_000):
        add_vertex(state, rule, 2, rng)
        recs.append(record(state, prev=recs[-1]))
    noise = np.array([realized_noise(p, q) for p, q in zip(recs, recs[1:])])
    assert np.abs(noise).max() <= 3.0  # bounded uniformly in n
    mean = noise.mean(axis=0)
    se = noise.std(axis=0, ddof=1) / math.sqrt(len(noise))
    assert np.all(np.abs(mean) <= 5 * se)


def test_one_step_supermartingale_identity_across_seeds():
    # across-seed mean of M_{n+1} - E[M_{n+1} | state_n] vanishes
    rule = rps_rule()
    diffs = []
    for seed in range(200):
        state = init(named_start("k3"))
        rng = np.random.default_rng(seed)
        for _ in range(50):
            add_vertex(state, rule, 2, rng)
        m50, g50 = float(state.shares().prod()), state.gamma
        add_vertex(state, rule, 2, rng)
        m51 = float(state.shares().prod())
        diffs.append(m51 - expected_M_next(m50, g50))
    diffs = np.array(diffs)
    se = diffs.std(ddof=1) / math.sqrt(len(diffs))
    assert abs(diffs.mean()) <= 4 * se


# ------------------------------------------------------------------- circuits

def test_circuits_of_a_synthetic_spiral():
    # theta = log(n) / c with c = 0.2: circuit i completes at n = e^(2*pi*c*i)
    recs = [synthetic(n, math.log(n) / 0.2) for n in range(1, 601)]
    assert circuits(recs) == [4, 13, 44, 153, 536]


def test_circuits_counts_multiple_turns_in_one_gap():
    recs = [synthetic(10, 0.0), synthetic(20, 13.0)]  # 13 > 4*pi
    assert circuits(recs) == [20, 20]


def test_max_wrapped_step():
    recs = [synthetic(1, 0.0), synthetic(2, 0.4), synthetic(3, 0.1)]
    assert max_wrapped_step(recs) == pytest.approx(0.4, rel=1e-15)
    # a jump of 2*pi wraps to zero
    recs = [synthetic(1, 0.0), synthetic(2, 2 * math.pi)]
    assert max_wrapped_step(recs) == pytest.approx(0.0, abs=1e-15)


# ------------------------------------------------------------------ summaries

def test_convergence_report_on_a_constant_M_loop():
    curve = level_curve(0.03, resolution=64)
    pts = curve.points
    theta = [chart_angle(pts[0])]
    for p in pts[1:]:
        raw = chart_angle(p)
        theta.append(theta[-1] + (raw - theta[-1] + math.pi) % (2 * math.pi)
                     - math.pi)
    recs = [synthetic(100 * (i + 1), theta[i], shares=tuple(p),
                      M=float(np.prod(p))) for i, p in enumerate(pts)]
    rep = convergence_report(recs, seed=5)
    assert rep.seed == 5 and rep.n_max == 100 * len(pts)
    assert rep.M_range <= 1e-9              # M is conserved on the loop
    assert min(rep.share_ranges) > 0.05     # the shares keep moving
    assert rep.dtheta == pytest.approx(2 * math.pi, abs=1e-8)
    assert rep.circuits == [recs[-1].n]
    assert not rep.theta_aliased
    row = rep.csv_row()
    assert len(row) == len(SUMMARY_COLUMNS)
    assert row[0] == 5 and row[4] == 1
    assert row[5] == pytest.approx(27 * rep.M_final, rel=1e-15)


def test_report_flags_angle_aliasing():
    good = [synthetic(1, 0.0), synthetic(2, 1.0)]
    assert not convergence_report(good).theta_aliased
    bad = [synthetic(1, 0.0), synthetic(2, math.pi - 1e-4)]
    assert convergence_report(bad).theta_aliased
    with pytest.raises(ValueError):
        convergence_report([])


def test_report_without_seed_marks_csv_row():
    rep = convergence_report([synthetic(1, 0.0), synthetic(10, 0.5)])
    assert rep.csv_row()[0] == -1
