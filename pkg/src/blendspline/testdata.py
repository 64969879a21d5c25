"""Deterministic synthetic datasets: smooth manifold curves plus tangent noise."""

from __future__ import annotations

import math

import numpy as np

from .manifold import Point, Rotations, Sphere, TangentVector, hat

# total longitude swept by the sphere curve, kept well below pi so that no
# two samples are close to antipodal
SPHERE_SWEEP = 2.0


def sphere_curve(t, tmax: float) -> np.ndarray:
    """Wavy path on S^2 sweeping ``SPHERE_SWEEP`` radians of longitude over [0, tmax]."""
    t = np.asarray(t, dtype=float)
    lon = SPHERE_SWEEP * t / tmax - 0.5 * SPHERE_SWEEP
    lat = 0.35 * np.sin(2.0 * math.pi * t / tmax) + 0.3
    xyz = np.stack([np.cos(lat) * np.cos(lon), np.cos(lat) * np.sin(lon), np.sin(lat)], axis=-1)
    return xyz / np.linalg.norm(xyz, axis=-1, keepdims=True)


def rotation_curve(t, tmax: float) -> np.ndarray:
    """Rodrigues image of a bounded axis-angle path, as (N, 9) row-major matrices."""
    t = np.asarray(t, dtype=float).reshape(-1)
    s = t / tmax
    out = np.empty((t.size, 9))
    so3 = Rotations()
    ident = Point(np.eye(3).reshape(-1))
    for j, sj in enumerate(s):
        w = np.array([0.6 * math.sin(2.0 * sj), 0.4 * math.cos(3.0 * sj), 0.9 * sj - 0.45])
        out[j] = so3.exp(ident, TangentVector(ident, hat(w).reshape(-1))).coords
    return out


def noisy_samples(kind: str, num: int, tmax: float, noise: float, seed: int):
    """``num`` samples at uniform times on ``[0, tmax]`` with tangent Gaussian noise.

    Returns ``(times, coords)``.
    """
    rng = np.random.default_rng(seed)
    times = np.linspace(0.0, float(tmax), int(num))
    if kind == "sphere2":
        M, clean = Sphere(), sphere_curve(times, tmax)
    elif kind == "so3":
        M, clean = Rotations(), rotation_curve(times, tmax)
    else:
        raise ValueError(f"no synthetic curve for manifold {kind!r}")
    coords = np.empty_like(clean)
    for j, c in enumerate(clean):
        x = Point(c)
        v = M.project_tangent(x, noise * rng.standard_normal(c.size))
        coords[j] = M.exp(x, TangentVector(x, v)).coords
    return times, coords
