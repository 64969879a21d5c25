"""C1 blended smoothing splines on a manifold.

For every integer ``i`` in ``0..n`` an anchor ``d(i)`` is chosen among the
data (the datum whose time is closest to ``i``). All data are lifted to the
tangent space at each anchor with the logarithm, a Euclidean smoothing spline
is fitted there, and only its restriction to the anchor's neighbouring unit
windows is kept. On ``[i, i+1]`` the curve is the geodesic blend

    B(t) = mean(L(t), R(t); w(t - i)),    w(s) = 3 s^2 - 2 s^3,

of ``L = exp_{d(i)}(left spline)`` and ``R = exp_{d(i+1)}(right spline)``.
Since ``w`` and ``w'`` vanish at 0 and ``w(1) = 1, w'(1) = 0``, consecutive
pieces agree in position and velocity at every integer junction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidInputError, WellPosednessError
from .manifold import Manifold, Point, TangentVector, make_manifold
from .spline1d import (
    CubicSegment,
    KnotGrid,
    eval_spline,
    restrict_to_window,
    solve_smoothing_spline,
)


@dataclass(frozen=True)
class FitProblem:
    manifold: Manifold
    times: KnotGrid
    data: tuple
    intervals: int
    lam: float

    def __post_init__(self):
        times = self.times if isinstance(self.times, KnotGrid) else KnotGrid(self.times)
        object.__setattr__(self, "times", times)
        n = self.intervals
        if isinstance(n, bool) or int(n) != n or n < 1:
            raise InvalidInputError(f"number of intervals must be a positive integer, got {n!r}")
        object.__setattr__(self, "intervals", int(n))
        t = times.times
        if t[0] < 0.0 or t[-1] > n:
            raise InvalidInputError(f"data times must lie in [0, {n}], got [{t[0]}, {t[-1]}]")
        data = tuple(p if isinstance(p, Point) else self.manifold.point(p) for p in self.data)
        if len(data) != t.size:
            raise InvalidInputError(f"{t.size} times but {len(data)} data points")
        for k, p in enumerate(data):
            if p.coords.size != self.manifold.ambient_dim or not self.manifold.contains(p.coords):
                raise InvalidInputError(f"data point {k} is not on the manifold")
        object.__setattr__(self, "data", data)
        lam = float(self.lam)
        if not lam > 0.0:
            raise InvalidInputError(f"lambda must be positive, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)


@dataclass(frozen=True)
class AnchorSet:
    indices: tuple[int, ...]
    points: tuple[Point, ...]


@dataclass(frozen=True)
class IntervalPieces:
    """Tangent-space pieces used on ``[i, i+1]``.

    ``left`` lives in the tangent space at anchor ``i``, ``right`` at anchor
    ``i + 1``; both are lists of Bezier pieces covering the window.
    """

    i: int
    left: tuple[CubicSegment, ...]
    right: tuple[CubicSegment, ...]


@dataclass(frozen=True)
class BlendedSpline:
    manifold: Manifold
    n: int
    lam: float
    times: np.ndarray
    anchors: AnchorSet
    intervals: tuple[IntervalPieces, ...]

    def __call__(self, t: float) -> Point:
        return evaluate(self, t)

    def control_vector_count(self) -> int:
        return sum(4 * (len(iv.left) + len(iv.right)) for iv in self.intervals)


def weight(s: float) -> float:
    """Smoothstep blending weight ``3 s^2 - 2 s^3`` on ``[0, 1]``."""
    if not (0.0 <= s <= 1.0):
        raise DomainError(f"weight argument must lie in [0, 1], got {s!r}")
    return s * s * (3.0 - 2.0 * s)


def select_anchors(times, n: int) -> list[int]:
    """Index of the datum closest in time to each integer ``0..n`` (first on ties)."""
    t = times.times if isinstance(times, KnotGrid) else np.asarray(times, dtype=float)
    return [int(np.argmin(np.abs(t - i))) for i in range(int(n) + 1)]


def lift_data(manifold: Manifold, anchor: Point, data, anchor_index: int | None = None) -> np.ndarray:
    """Rows ``log(anchor, d_j)`` in ambient coordinates."""
    rows = np.empty((len(data), manifold.ambient_dim))
    for j, p in enumerate(data):
        if p is anchor:
            rows[j] = 0.0
            continue
        try:
            rows[j] = manifold.log(anchor, p).coords
        except WellPosednessError as exc:
            where = "" if anchor_index is None else f" from anchor {anchor_index}"
            raise WellPosednessError(
                f"data point {j} cannot be lifted{where}: {exc}", pair=(j, anchor_index)
            ) from exc
    return rows


def fit(problem: FitProblem) -> BlendedSpline:
    """Fit the blended spline; costs (n+1)(m+1) logarithms."""
    M = problem.manifold
    n = problem.intervals
    grid = problem.times
    idx = select_anchors(grid, n)
    anchors = tuple(problem.data[k] for k in idx)
    left: list = [None] * n
    right: list = [None] * n
    for i, k in enumerate(idx):
        lifted = lift_data(M, problem.data[k], problem.data, anchor_index=i)
        s = solve_smoothing_spline(grid, lifted, problem.lam, domain=(0.0, float(n)))
        if i > 0:
            right[i - 1] = tuple(restrict_to_window(s, i - 1))
        if i < n:
            left[i] = tuple(restrict_to_window(s, i))
    intervals = tuple(IntervalPieces(i, left[i], right[i]) for i in range(n))
    return BlendedSpline(
        manifold=M,
        n=n,
        lam=problem.lam,
        times=grid.times,
        anchors=AnchorSet(tuple(idx), anchors),
        intervals=intervals,
    )


def _piece_value(pieces, t: float) -> np.ndarray:
    if len(pieces) == 1:
        return pieces[0](t)
    for piece in pieces:
        if t <= piece.breakpoints[1]:
            return piece(t)
    return pieces[-1](t)


def _interval_index(spline: BlendedSpline, t: float) -> int:
    t = float(t)
    if not (0.0 <= t <= spline.n):
        raise DomainError(f"t={t!r} is outside [0, {spline.n}]")
    return min(int(math.floor(t)), spline.n - 1)


def tangent_curves(spline: BlendedSpline, i: int, t: float) -> tuple[TangentVector, TangentVector]:
    """Left and right tangent-space spline values on interval ``i`` at ``t``."""
    iv = spline.intervals[i]
    pts = spline.anchors.points
    return (
        TangentVector(pts[i], _piece_value(iv.left, t)),
        TangentVector(pts[i + 1], _piece_value(iv.right, t)),
    )


def evaluate_on_interval(spline: BlendedSpline, i: int, t: float) -> Point:
    """Blended function of interval ``i`` at ``t`` (``t`` in ``[i, i+1]``)."""
    if not (0 <= i < spline.n) or not (i <= t <= i + 1):
        raise DomainError(f"t={t!r} is not in interval {i}")
    M = spline.manifold
    vl, vr = tangent_curves(spline, i, t)
    L = M.exp(vl.base, vl)
    R = M.exp(vr.base, vr)
    return M.weighted_mean_two(L, R, weight(t - i))


def evaluate(spline: BlendedSpline, t: float) -> Point:
    """Curve point ``B(t)``; three exponentials and one logarithm per call."""
    i = _interval_index(spline, t)
    return evaluate_on_interval(spline, i, float(t))


def speed(spline: BlendedSpline, t: float, h: float = 1e-5) -> float:
    """Finite-difference estimate of ``||B'(t)||`` from geodesic distances."""
    if not h > 0.0:
        raise InvalidInputError(f"step h must be positive, got {h!r}")
    t = float(t)
    _interval_index(spline, t)
    M = spline.manifold
    lo, hi = t - h, t + h
    if lo < 0.0:
        return M.dist(evaluate(spline, t), evaluate(spline, min(hi, spline.n))) / (min(hi, spline.n) - t)
    if hi > spline.n:
        return M.dist(evaluate(spline, lo), evaluate(spline, t)) / (t - lo)
    return M.dist(evaluate(spline, lo), evaluate(spline, hi)) / (2.0 * h)


@dataclass(frozen=True)
class JunctionGap:
    i: int
    position_gap: float
    velocity_gap: float
    speed: float


def junction_report(spline: BlendedSpline, h: float = 1e-6) -> list[JunctionGap]:
    """Position and velocity mismatch at every interior integer junction.

    The position gap compares the two neighbouring blended functions at the
    junction itself. Velocities are one-sided second-order differences in the
    tangent space at ``B(i)``::

        v_R = (4 log(B(i), B(i+h)) - log(B(i), B(i+2h))) / 2h
        v_L = -(4 log(B(i), B(i-h)) - log(B(i), B(i-2h))) / 2h
    """
    if not h > 0.0:
        raise InvalidInputError(f"step h must be positive, got {h!r}")
    M = spline.manifold
    out = []
    for i in range(1, spline.n):
        from_left = evaluate_on_interval(spline, i - 1, float(i))
        from_right = evaluate_on_interval(spline, i, float(i))
        pos = M.dist(from_left, from_right)
        b = from_right
        fwd1 = M.log(b, evaluate(spline, i + h)).coords
        fwd2 = M.log(b, evaluate(spline, i + 2 * h)).coords
        bwd1 = M.log(b, evaluate(spline, i - h)).coords
        bwd2 = M.log(b, evaluate(spline, i - 2 * h)).coords
        v_r = TangentVector(b, (4.0 * fwd1 - fwd2) / (2.0 * h))
        v_l = TangentVector(b, -(4.0 * bwd1 - bwd2) / (2.0 * h))
        gap = M.norm(b, TangentVector(b, v_l.coords - v_r.coords))
        local = max(M.norm(b, v_l), M.norm(b, v_r))
        out.append(JunctionGap(i, pos, gap, local))
    return out


def misfit(spline: BlendedSpline, data) -> float:
    """Sum of squared distances ``dist(B(t_k), d_k)^2`` at the fitted times."""
    M = spline.manifold
    return float(sum(M.dist(evaluate(spline, t), p) ** 2 for t, p in zip(spline.times, data)))


def fit_arrays(kind, times, data, n: int, lam: float, dim: int | None = None) -> BlendedSpline:
    """Convenience wrapper: fit from plain arrays of coordinates."""
    data = np.asarray(data, dtype=float)
    if data.ndim == 1:
        data = data[:, None]
    M = make_manifold(kind, dim if dim is not None else data.shape[1])
    return fit(FitProblem(M, KnotGrid(times), tuple(data), n, lam))


def direct_spline_values(times, data, lam, n: int, ts) -> np.ndarray:
    """Euclidean reference: the smoothing spline of the raw data at ``ts``."""
    s = solve_smoothing_spline(times, data, lam, domain=(0.0, float(n)))
    return np.array([eval_spline(s, t) for t in ts])
