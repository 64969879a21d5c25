"""Brute-force Euclidean reference for the smoothing-spline energy.

The curve is sampled on a uniform grid of ``M`` nodes over ``[t_0, t_m]``,
the second derivative is replaced by central second differences on interior
nodes and every data time is snapped to its nearest node. The resulting
energy is a convex quadratic in the node values and is minimised exactly. Nothing here shares code with
:mod:`blendspline.spline1d`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import BlendSplineError, InvalidInputError
from .spline1d import SmoothingSpline, bending_energy, eval_spline

MIN_GRID = 50


class OracleError(BlendSplineError):
    """The discretised normal equations could not be solved."""


@dataclass(frozen=True)
class DiscretizedCurve:
    """Node times (M,), node values (M, r) and the snapped data node indices."""

    times: np.ndarray
    values: np.ndarray
    data_nodes: np.ndarray

    @property
    def grid_size(self) -> int:
        return self.times.size

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def at_data(self) -> np.ndarray:
        return self.values[self.data_nodes]


def snap_times(times, t0: float, t1: float, M: int) -> np.ndarray:
    step = (t1 - t0) / (M - 1)
    return np.clip(np.rint((np.asarray(times, dtype=float) - t0) / step), 0, M - 1).astype(int)


def discretized_energy_min(times, data, lam: float, M: int = 2001) -> DiscretizedCurve:
    """Exact minimiser of the discretised smoothing energy on ``M`` nodes.

    Node values are written as ``g_j = c0 + j c1 + sum_{k<j} (j - k) z_k`` with
    ``z_k`` the raw second differences, so the energy becomes
    ``||z||^2 / step^3 + lam ||G z + H c - d||^2``. The line ``c`` is not
    penalised; ``z`` is a ridge solution expressed through the small
    (m+1) x (m+1) matrix ``G G^T``. Minimising directly in node values
    instead leaves the linear null space of the second difference pinned
    only through ``lam`` and loses most digits for small ``lam``.
    """
    times = np.asarray(times, dtype=float).reshape(-1)
    d = np.asarray(data, dtype=float)
    if d.ndim == 1:
        d = d[:, None]
    if d.shape[0] != times.size or times.size < 2:
        raise InvalidInputError("times and data must have the same (>= 2) number of rows")
    if M < MIN_GRID:
        raise InvalidInputError(f"grid size must be at least {MIN_GRID}, got {M}")
    if not lam > 0.0 or math.isinf(lam):
        raise InvalidInputError(f"lambda must be positive and finite, got {lam!r}")
    t0, t1 = float(times[0]), float(times[-1])
    grid = np.linspace(t0, t1, M)
    step = grid[1] - grid[0]
    nodes = snap_times(times, t0, t1, M)
    if np.unique(nodes).size < 2:
        raise OracleError("fewer than two distinct snapped data nodes")

    k = np.arange(1, M - 1)
    G = np.maximum(nodes[:, None] - k[None, :], 0).astype(float)
    H = np.column_stack([np.ones(nodes.size), nodes.astype(float)])
    mu = 1.0 / (lam * step**3)
    try:
        W = cho_factor(G @ G.T + mu * np.eye(nodes.size))
        WH = cho_solve(W, H)
        c = np.linalg.solve(H.T @ WH, WH.T @ d)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise OracleError(f"normal equations are singular: {exc}") from exc
    z = G.T @ cho_solve(W, d - H @ c)

    slopes = np.vstack([c[1:2], c[1:2] + np.cumsum(z, axis=0)])
    values = np.vstack([c[0:1], c[0:1] + np.cumsum(slopes, axis=0)])
    if not np.all(np.isfinite(values)):
        raise OracleError("normal equations are singular")
    return DiscretizedCurve(grid, values, nodes)


def discrete_energy(curve: DiscretizedCurve, data, lam: float) -> float:
    d = np.asarray(data, dtype=float)
    if d.ndim == 1:
        d = d[:, None]
    step = curve.step
    sec = (curve.values[2:] - 2.0 * curve.values[1:-1] + curve.values[:-2]) / step**2
    bend = float(np.sum(sec * sec) * step)
    mis = float(np.sum((curve.at_data() - d) ** 2))
    return bend + lam * mis if mis else bend


def energy_of(obj, times, data, lam: float) -> float:
    """Smoothing energy of a spline (analytic) or of a sampled curve (discrete).

    With ``lam = inf`` the misfit term counts as 0 when the fit is exact.
    """
    if isinstance(obj, DiscretizedCurve):
        return discrete_energy(obj, data, lam)
    if isinstance(obj, SmoothingSpline):
        d = np.asarray(data, dtype=float)
        if d.ndim == 1:
            d = d[:, None]
        fitted = np.array([eval_spline(obj, t) for t in times])
        mis = float(np.sum((fitted - d) ** 2))
        bend = bending_energy(obj)
        return bend + lam * mis if mis else bend
    raise InvalidInputError(f"cannot compute the energy of {type(obj).__name__}")
