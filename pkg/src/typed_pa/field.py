"""Deterministic drift field of the three-type share dynamics.

The share vector (x, y, z) lives on the probability simplex and drifts
along P(x,y,z) = (x(z-y)/2, y(x-z)/2, z(y-x)/2). The product xyz is
conserved by the flow, the center is an elliptic fixed point, and each
level set {xyz = M} with 0 < M < 1/27 is a closed orbit. This module
evaluates the field, integrates it, extracts level curves, and computes
per-circuit quantities (arc length, period, index growth ratio).

All functions are pure and accept numpy broadcasting where noted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CENTER = np.full(3, 1.0 / 3.0)
# orthonormal basis of the plane x+y+z = 1, used as the 2D chart
B1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
B2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)

M_MAX = 1.0 / 27.0
# below this the orbit hugs the corners where the field vanishes and the
# period quadrature degenerates
M_MIN = 1e-6

STATIONARY_POINTS = np.array([
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
])


def field_eval(p) -> np.ndarray:
    """Drift vector at p; broadcasts over leading axes of shape (..., 3).

    Components sum to zero, so the field is tangent to the simplex.
    """
    p = np.asarray(p, dtype=float)
    x, y, z = p[..., 0], p[..., 1], p[..., 2]
    return np.stack([x * (z - y), y * (x - z), z * (y - x)], axis=-1) * 0.5


def field_norm(p) -> np.ndarray:
    """Euclidean norm of the drift, zero exactly at the four rest points."""
    return np.linalg.norm(field_eval(p), axis=-1)


def to_chart(p) -> np.ndarray:
    """Coordinates of p in the (B1, B2) chart centered at the barycenter."""
    d = np.asarray(p, dtype=float) - CENTER
    return np.stack([d @ B1, d @ B2], axis=-1)


def from_chart(ab) -> np.ndarray:
    ab = np.asarray(ab, dtype=float)
    return CENTER + ab[..., 0, None] * B1 + ab[..., 1, None] * B2


def jacobian_eigs_center(h: float = 1e-6) -> np.ndarray:
    """Eigenvalues of the flow's Jacobian at the center, restricted to the
    simplex plane (central differences in the chart). Elliptic: the pair is
    purely imaginary, +-i/sqrt(12).
    """
    def g(a: float, b: float) -> np.ndarray:
        v = field_eval(from_chart((a, b)))
        return np.array([v @ B1, v @ B2])

    j = np.empty((2, 2))
    j[:, 0] = (g(h, 0.0) - g(-h, 0.0)) / (2.0 * h)
    j[:, 1] = (g(0.0, h) - g(0.0, -h)) / (2.0 * h)
    return np.linalg.eigvals(j)


def linearized_period() -> float:
    """Rotation period of the linearized flow at the center, 2*pi*sqrt(12)."""
    eigs = jacobian_eigs_center()
    return 2.0 * math.pi / np.abs(eigs.imag).max()


def integrate(p0, duration: float, dt: float) -> tuple:
    """Fixed-step RK4 from p0, projecting back onto sum = 1 each step.

    Returns (times, points) with points[k] at times[k]; the final partial
    step is shortened so the path ends exactly at `duration`.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    p = np.asarray(p0, dtype=float).copy()
    n_full = int(duration / dt)
    rem = duration - n_full * dt
    steps = [dt] * n_full + ([rem] if rem > 1e-15 else [])
    times = np.empty(len(steps) + 1)
    path = np.empty((len(steps) + 1, 3))
    times[0] = 0.0
    path[0] = p
    t = 0.0
    for i, hstep in enumerate(steps, start=1):
        k1 = field_eval(p)
        k2 = field_eval(p + 0.5 * hstep * k1)
        k3 = field_eval(p + 0.5 * hstep * k2)
        k4 = field_eval(p + hstep * k3)
        p = p + (hstep / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p += (1.0 - p.sum()) / 3.0
        t += hstep
        times[i] = t
        path[i] = p
    return times, path


@dataclass
class LevelCurve:
    """Closed orbit {xyz = M}: polyline (first point repeated last), its
    arc length, and the time the flow needs for one traversal."""
    M: float
    points: np.ndarray
    arc_length: float
    period: float

    @property
    def resolution(self) -> int:
        return len(self.points) - 1


def level_curve(M: float, resolution: int = 512) -> LevelCurve:
    """Extract the orbit {xyz = M} by radial bisection from the center.

    xyz decreases from 1/27 at the center to 0 at the simplex boundary
    along every ray, so each of `resolution` rays crosses the level once.
    Arc length is the summed chord lengths; the period is the trapezoid
    rule for integral of ds / ||P|| along the polyline.
    """
    if not M_MIN <= M < M_MAX:
        raise ValueError(f"M must lie in [{M_MIN:g}, 1/27), got {M}")
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    phi = 2.0 * math.pi * np.arange(resolution) / resolution
    dirs = np.outer(np.cos(phi), B1) + np.outer(np.sin(phi), B2)
    # distance to the simplex edge: first coordinate to reach zero
    with np.errstate(divide="ignore"):
        r_edge = np.where(dirs < 0, CENTER[0] / -dirs, np.inf).min(axis=1)
    lo = np.zeros(resolution)
    hi = r_edge.copy()
    for _ in range(62):
        mid = 0.5 * (lo + hi)
        val = (CENTER + mid[:, None] * dirs).prod(axis=1)
        above = val > M
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    r = 0.5 * (lo + hi)
    pts = CENTER + r[:, None] * dirs
    err = np.abs(pts.prod(axis=1) - M)
    worst = int(err.argmax())
    if err[worst] > 1e-10:
        raise ArithmeticError(
            f"bisection failed on ray {worst}: |xyz - M| = {err[worst]:.3e}")
    closed = np.vstack([pts, pts[:1]])
    chords = np.linalg.norm(np.diff(closed, axis=0), axis=1)
    arc_length = float(chords.sum())
    inv_speed = 1.0 / field_norm(closed)
    period = float((chords * 0.5 * (inv_speed[:-1] + inv_speed[1:])).sum())
    return LevelCurve(M=M, points=closed, arc_length=arc_length, period=period)


def circuit_ratio(M: float, resolution: int = 512) -> float:
    """Predicted index growth over one circuit of {xyz = M}.

    The shares move by O(1/n) per added vertex, so ODE time equals log n
    and one traversal (period T) multiplies the vertex count by exp(T).
    """
    return math.exp(level_curve(M, resolution).period)


def circuit_ratio_arclength_form(M: float, resolution: int = 512) -> float:
    """Alternative estimator exp(2 * L_M * integral of 1/||P|| ds).

    Kept alongside :func:`circuit_ratio` because the two normalizations
    disagree; the simulation decides which one tracks reality.
    """
    c = level_curve(M, resolution)
    return math.exp(2.0 * c.arc_length * c.period)


def mean_angular_speed(curve: LevelCurve) -> float:
    """Time-averaged winding rate of the orbit about the center: 2*pi / T."""
    return 2.0 * math.pi / curve.period
