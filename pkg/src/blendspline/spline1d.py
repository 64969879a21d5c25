"""Natural cubic smoothing splines in R^r.

The spline minimises ``int ||s''||^2 dt + lam * sum_i ||s(t_i) - d_i||^2``.
With ``h_j = t_{j+1} - t_j``, ``Q`` the (m+1) x (m-1) second-difference
matrix and ``R`` the tridiagonal Gram matrix of the hat functions, the
interior knot second derivatives solve

    (R + Q^T Q / lam) sigma = Q^T d,     a = d - Q sigma / lam

(Reinsch's formulation with the weight on the misfit rather than on the
roughness). ``R + Q^T Q / lam`` is symmetric positive definite with
bandwidth 2 and is solved with a banded Cholesky factorisation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .errors import DomainError, InvalidInputError

MIN_SPACING = 1e-12


@dataclass(frozen=True)
class KnotGrid:
    """Strictly increasing knot times ``t_0 < ... < t_m`` with ``m >= 1``."""

    times: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float).reshape(-1)
        if t.size < 2:
            raise InvalidInputError("a knot grid needs at least two times")
        if not np.all(np.isfinite(t)):
            raise InvalidInputError("knot times must be finite")
        gaps = np.diff(t)
        if np.any(gaps <= MIN_SPACING):
            j = int(np.argmin(gaps))
            raise InvalidInputError(
                f"knot times must be strictly increasing (t[{j}]={t[j]!r}, t[{j + 1}]={t[j + 1]!r})"
            )
        t.flags.writeable = False
        object.__setattr__(self, "times", t)

    @property
    def m(self) -> int:
        return self.times.size - 1

    @property
    def spacings(self) -> np.ndarray:
        return np.diff(self.times)


@dataclass(frozen=True)
class SmoothingSpline:
    """Knot values and knot second derivatives of a natural cubic spline.

    ``values`` and ``second_derivs`` are (m+1, r) arrays. ``domain`` is the
    closed interval on which the spline may be evaluated; outside the knot
    range the spline continues linearly.
    """

    grid: KnotGrid
    values: np.ndarray
    second_derivs: np.ndarray
    lam: float
    domain: tuple[float, float]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CubicSegment:
    """Cubic Bezier piece on ``[breakpoints[0], breakpoints[1]]``; control is (4, r)."""

    breakpoints: tuple[float, float]
    control: np.ndarray

    def __call__(self, t: float) -> np.ndarray:
        a, b = self.breakpoints
        u = (t - a) / (b - a)
        return bezier_point(self.control, u)


def bezier_point(control: np.ndarray, u: float) -> np.ndarray:
    """De Casteljau evaluation; returns the end control points exactly at u=0, 1."""
    p = control
    for _ in range(3):
        p = (1.0 - u) * p[:-1] + u * p[1:]
    return p[0]


def _as_data(data, m: int) -> np.ndarray:
    d = np.asarray(data, dtype=float)
    if d.ndim == 1:
        d = d[:, None]
    if d.ndim != 2 or d.shape[0] != m + 1:
        raise InvalidInputError(f"data must have {m + 1} rows, got shape {np.shape(data)}")
    if not np.all(np.isfinite(d)):
        raise InvalidInputError("data must be finite")
    return d


def second_difference_matrix(h: np.ndarray) -> np.ndarray:
    """Dense Q, (m+1) x (m-1); column j-1 holds (1/h_{j-1}, -1/h_{j-1}-1/h_j, 1/h_j)."""
    m = h.size
    Q = np.zeros((m + 1, m - 1))
    for j in range(1, m):
        Q[j - 1, j - 1] = 1.0 / h[j - 1]
        Q[j, j - 1] = -1.0 / h[j - 1] - 1.0 / h[j]
        Q[j + 1, j - 1] = 1.0 / h[j]
    return Q


def gram_matrix(h: np.ndarray) -> np.ndarray:
    """Dense R, (m-1) x (m-1) tridiagonal with diagonal (h_{j-1}+h_j)/3, off-diagonal h_j/6."""
    m = h.size
    R = np.diag((h[:-1] + h[1:]) / 3.0)
    if m > 2:
        off = h[1:-1] / 6.0
        R += np.diag(off, 1) + np.diag(off, -1)
    return R


def _qt_apply(h: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Q^T d without forming Q."""
    inv = 1.0 / h
    return inv[:-1, None] * d[:-2] - (inv[:-1] + inv[1:])[:, None] * d[1:-1] + inv[1:, None] * d[2:]


def _q_apply(h: np.ndarray, sigma_int: np.ndarray) -> np.ndarray:
    """Q sigma for interior second derivatives, returns m+1 rows."""
    inv = 1.0 / h
    out = np.zeros((h.size + 1, sigma_int.shape[1]))
    out[:-2] += inv[:-1, None] * sigma_int
    out[1:-1] -= (inv[:-1] + inv[1:])[:, None] * sigma_int
    out[2:] += inv[1:, None] * sigma_int
    return out


def _banded_system(h: np.ndarray, lam: float) -> np.ndarray:
    """Upper banded storage (3, m-1) of R + Q^T Q / lam."""
    m = h.size
    n = m - 1
    ab = np.zeros((3, n))
    ab[2] = (h[:-1] + h[1:]) / 3.0
    if n > 1:
        ab[1, 1:] = h[1:-1] / 6.0
    if math.isinf(lam):
        return ab
    inv = 1.0 / h
    # column k of Q has entries on rows k, k+1, k+2
    c0 = inv[:-1]
    c1 = -(inv[:-1] + inv[1:])
    c2 = inv[1:]
    mu = 1.0 / lam
    ab[2] += mu * (c0 * c0 + c1 * c1 + c2 * c2)
    if n > 1:
        # (Q^T Q)_{k,k+1}: rows k+1, k+2 shared
        ab[1, 1:] += mu * (c1[:-1] * c0[1:] + c2[:-1] * c1[1:])
    if n > 2:
        # (Q^T Q)_{k,k+2}: row k+2 shared
        ab[0, 2:] += mu * (c2[:-2] * c0[2:])
    return ab


def solve_smoothing_spline(grid, data, lam, domain=None) -> SmoothingSpline:
    """Solve for the natural cubic smoothing spline of ``data`` at ``grid``.

    Parameters
    ----------
    grid : KnotGrid or array_like
        Knot times.
    data : array_like, shape (m+1,) or (m+1, r)
        Values to fit. One-dimensional input is treated as r = 1.
    lam : float
        Misfit weight, ``> 0``; ``math.inf`` gives the interpolating spline.
    domain : (float, float), optional
        Evaluation interval. Defaults to ``(t_0, t_m)``; it must contain the
        knot range.
    """
    if not isinstance(grid, KnotGrid):
        grid = KnotGrid(grid)
    t = grid.times
    m = grid.m
    d = _as_data(data, m)
    try:
        lam = float(lam)
    except (TypeError, ValueError):
        raise InvalidInputError(f"lambda must be a positive number, got {lam!r}") from None
    if not lam > 0.0:
        raise InvalidInputError(f"lambda must be positive, got {lam!r}")
    if domain is None:
        domain = (float(t[0]), float(t[-1]))
    lo, hi = float(domain[0]), float(domain[1])
    if lo > t[0] or hi < t[-1]:
        raise InvalidInputError(f"domain [{lo}, {hi}] does not contain the knots [{t[0]}, {t[-1]}]")

    sigma = np.zeros_like(d)
    if m == 1:
        values = d.copy()
    else:
        h = grid.spacings
        ab = _banded_system(h, lam)
        sigma_int = solveh_banded(ab, _qt_apply(h, d), check_finite=False)
        sigma[1:-1] = sigma_int
        if math.isinf(lam):
            values = d.copy()
        else:
            values = d - _q_apply(h, sigma_int) / lam
    values.flags.writeable = False
    sigma.flags.writeable = False
    return SmoothingSpline(grid, values, sigma, lam, (lo, hi))


def _check_domain(s: SmoothingSpline, t: float):
    lo, hi = s.domain
    if not (lo <= t <= hi):
        raise DomainError(f"t={t!r} is outside the spline domain [{lo}, {hi}]")


def _boundary_slope(s: SmoothingSpline, left: bool) -> np.ndarray:
    t, a, sig = s.grid.times, s.values, s.second_derivs
    if left:
        h = t[1] - t[0]
        return (a[1] - a[0]) / h - h * (2.0 * sig[0] + sig[1]) / 6.0
    h = t[-1] - t[-2]
    return (a[-1] - a[-2]) / h + h * (sig[-2] + 2.0 * sig[-1]) / 6.0


def _locate(s: SmoothingSpline, t: float) -> int:
    times = s.grid.times
    j = int(np.searchsorted(times, t, side="right")) - 1
    return min(max(j, 0), times.size - 2)


def eval_spline(s: SmoothingSpline, t: float) -> np.ndarray:
    """Value of the spline at ``t`` (an r-vector)."""
    t = float(t)
    _check_domain(s, t)
    times, a, sig = s.grid.times, s.values, s.second_derivs
    if t < times[0]:
        return a[0] + (t - times[0]) * _boundary_slope(s, left=True)
    if t > times[-1]:
        return a[-1] + (t - times[-1]) * _boundary_slope(s, left=False)
    j = _locate(s, t)
    h = times[j + 1] - times[j]
    tau = t - times[j]
    rest = h - tau
    return (
        a[j] * (rest / h)
        + a[j + 1] * (tau / h)
        - tau * rest / 6.0 * ((1.0 + rest / h) * sig[j] + (1.0 + tau / h) * sig[j + 1])
    )


def eval_spline_deriv(s: SmoothingSpline, t: float) -> np.ndarray:
    """First derivative of the spline at ``t``."""
    t = float(t)
    _check_domain(s, t)
    times, a, sig = s.grid.times, s.values, s.second_derivs
    if t < times[0]:
        return _boundary_slope(s, left=True)
    if t > times[-1]:
        return _boundary_slope(s, left=False)
    j = _locate(s, t)
    h = times[j + 1] - times[j]
    tau = t - times[j]
    # power form a + b tau + c tau^2 + e tau^3
    b = (a[j + 1] - a[j]) / h - h * (2.0 * sig[j] + sig[j + 1]) / 6.0
    c = 0.5 * sig[j]
    e = (sig[j + 1] - sig[j]) / (6.0 * h)
    return b + tau * (2.0 * c + 3.0 * e * tau)


def restrict_to_window(s: SmoothingSpline, u: int) -> list[CubicSegment]:
    """Bezier pieces reproducing ``s`` on ``[u, u+1]``, split at interior knots."""
    u = int(u)
    lo, hi = s.domain
    if u < lo or u + 1 > hi:
        raise DomainError(f"window [{u}, {u + 1}] is outside the spline domain [{lo}, {hi}]")
    times = s.grid.times
    inner = times[(times > u) & (times < u + 1)]
    cuts = [float(u), *map(float, inner), float(u + 1)]
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        pa, pb = eval_spline(s, a), eval_spline(s, b)
        third = (b - a) / 3.0
        va, vb = eval_spline_deriv(s, a), eval_spline_deriv(s, b)
        control = np.stack([pa, pa + third * va, pb - third * vb, pb])
        control.flags.writeable = False
        pieces.append(CubicSegment((a, b), control))
    return pieces


def bending_energy(s: SmoothingSpline) -> float:
    """Exact ``int ||s''||^2`` from the piecewise-linear second derivative."""
    h = s.grid.spacings
    sig = s.second_derivs
    lo, hi = sig[:-1], sig[1:]
    per = np.sum(lo * lo + lo * hi + hi * hi, axis=1)
    return float(np.sum(h * per) / 3.0)
