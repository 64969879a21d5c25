"""Riemannian manifolds described only by their exponential and logarithm maps.

Three geometries are shipped: flat ``R^r``, the unit sphere ``S^2`` embedded in
``R^3`` and the rotation group ``SO(3)`` embedded in ``R^{3x3}`` (stored as 9
row-major coordinates). Points and tangent vectors always carry ambient
coordinates, so a tangent vector of ``SO(3)`` at ``B`` is a 3x3 matrix ``V``
with ``B^T V`` skew-symmetric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InvalidInputError, WellPosednessError

SPHERE_TOL = 1e-12
ROTATION_TOL = 1e-10
TANGENT_TOL = 1e-10
TAYLOR_THRESHOLD = 1e-8
SPHERE_CUT_MARGIN = 1e-9
ROTATION_CUT_MARGIN = 1e-6


def _frozen(coords) -> np.ndarray:
    arr = np.array(coords, dtype=float).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Point:
    """A point given by its ambient coordinates (read-only)."""

    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords))

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return np.array_equal(self.coords, other.coords)

    __hash__ = None

    def __len__(self):
        return self.coords.size


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector in ambient coordinates, attached to ``base``."""

    base: Point
    coords: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coords", _frozen(self.coords))
        if self.coords.size != self.base.coords.size:
            raise InvalidInputError(
                f"tangent vector has {self.coords.size} coordinates, "
                f"base point has {self.base.coords.size}"
            )

    def __eq__(self, other):
        if not isinstance(other, TangentVector):
            return NotImplemented
        return self.base == other.base and np.array_equal(self.coords, other.coords)

    __hash__ = None

    def scaled(self, a: float) -> TangentVector:
        return TangentVector(self.base, a * self.coords)


class ManifoldKind(str, Enum):
    EUCLIDEAN = "euclidean"
    SPHERE2 = "sphere2"
    SO3 = "so3"


@dataclass(frozen=True)
class ManifoldDescriptor:
    kind: ManifoldKind
    ambient_dim: int

    def __post_init__(self):
        try:
            kind = ManifoldKind(self.kind)
        except ValueError:
            raise InvalidInputError(f"unknown manifold kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        dim = int(self.ambient_dim)
        if dim != self.ambient_dim or dim < 1:
            raise InvalidInputError(f"ambient_dim must be a positive integer, got {self.ambient_dim!r}")
        expected = {ManifoldKind.SPHERE2: 3, ManifoldKind.SO3: 9}.get(kind)
        if expected is not None and dim != expected:
            raise InvalidInputError(f"{kind.value} requires ambient_dim={expected}, got {dim}")
        object.__setattr__(self, "ambient_dim", dim)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "ambient_dim": self.ambient_dim}


class Manifold:
    """Common interface; subclasses supply the coordinate-level maps.

    Only ``exp`` and ``log`` are primitive. ``dist`` and
    ``weighted_mean_two`` are built on top of them, so wrapping those two
    methods (see :class:`CountingManifold`) observes every map evaluation.
    """

    kind: ManifoldKind
    ambient_dim: int

    @property
    def descriptor(self) -> ManifoldDescriptor:
        return ManifoldDescriptor(self.kind, self.ambient_dim)

    def __repr__(self):
        return f"{type(self).__name__}(ambient_dim={self.ambient_dim})"

    # -- coordinate level, overridden by subclasses -----------------------
    def _exp(self, x: np.ndarray, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _log(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inner(self, x: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.dot(u, v))

    def membership_error(self, coords) -> float:
        """Distance-like violation of the point constraints (0 on the manifold)."""
        raise NotImplementedError

    def tangency_error(self, base: Point, coords) -> float:
        raise NotImplementedError

    def random_point(self, rng: np.random.Generator) -> Point:
        raise NotImplementedError

    def project_tangent(self, base: Point, coords) -> np.ndarray:
        raise NotImplementedError

    # -- typed interface ----------------------------------------------------
    def _check_dim(self, coords: np.ndarray, what: str):
        if coords.size != self.ambient_dim:
            raise InvalidInputError(
                f"{what} has {coords.size} coordinates, {self.kind.value} expects {self.ambient_dim}"
            )

    def point(self, coords) -> Point:
        """Validate ``coords`` and wrap them as a :class:`Point`."""
        arr = np.asarray(coords, dtype=float).reshape(-1)
        self._check_dim(arr, "point")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("point coordinates must be finite")
        if not self.contains(arr):
            raise InvalidInputError(
                f"point is not on {self.kind.value} (violation {self.membership_error(arr):.3e})"
            )
        return Point(arr)

    def contains(self, coords) -> bool:
        raise NotImplementedError

    def tangent(self, base: Point, coords) -> TangentVector:
        """Validate tangency of ``coords`` at ``base``."""
        arr = np.asarray(coords, dtype=float).reshape(-1)
        self._check_dim(arr, "tangent vector")
        err = self.tangency_error(base, arr)
        if err > TANGENT_TOL:
            raise InvalidInputError(f"vector is not tangent at base (violation {err:.3e})")
        return TangentVector(base, arr)

    def zero_vector(self, x: Point) -> TangentVector:
        return TangentVector(x, np.zeros(self.ambient_dim))

    def exp(self, x: Point, v: TangentVector) -> Point:
        """Follow the geodesic from ``x`` with initial velocity ``v`` for unit time."""
        self._check_dim(x.coords, "point")
        self._check_dim(v.coords, "tangent vector")
        if v.base is not x and v.base != x:
            raise InvalidInputError("tangent vector is not attached to the given base point")
        return Point(self._exp(x.coords, v.coords))

    def log(self, x: Point, y: Point) -> TangentVector:
        """Inverse of :meth:`exp`; raises :class:`WellPosednessError` near the cut locus."""
        self._check_dim(x.coords, "point")
        self._check_dim(y.coords, "point")
        return TangentVector(x, self._log(x.coords, y.coords))

    def inner(self, x: Point, u: TangentVector, v: TangentVector) -> float:
        return self._inner(x.coords, u.coords, v.coords)

    def norm(self, x: Point, v: TangentVector) -> float:
        return math.sqrt(max(self.inner(x, v, v), 0.0))

    def dist(self, x: Point, y: Point) -> float:
        return self.norm(x, self.log(x, y))

    def weighted_mean_two(self, x: Point, y: Point, a: float) -> Point:
        """Point at fraction ``a`` along the geodesic from ``x`` to ``y``.

        Always costs one log and one exp; the endpoints ``a=0`` and ``a=1``
        are returned exactly.
        """
        v = self.log(x, y)
        out = self.exp(x, v.scaled(a))
        if a == 1:
            return y
        if a == 0:
            return x
        return out


class Euclidean(Manifold):
    kind = ManifoldKind.EUCLIDEAN

    def __init__(self, dim: int):
        dim = int(dim)
        if dim < 1:
            raise InvalidInputError(f"dimension must be positive, got {dim}")
        self.ambient_dim = dim

    def _exp(self, x, v):
        return x + v

    def _log(self, x, y):
        return y - x

    def contains(self, coords) -> bool:
        return bool(np.all(np.isfinite(coords)))

    def membership_error(self, coords) -> float:
        return 0.0

    def tangency_error(self, base, coords) -> float:
        return 0.0

    def project_tangent(self, base, coords):
        return np.asarray(coords, dtype=float).copy()

    def random_point(self, rng):
        return Point(rng.standard_normal(self.ambient_dim))


class Sphere(Manifold):
    """Unit sphere in R^3 with the induced metric."""

    kind = ManifoldKind.SPHERE2
    ambient_dim = 3

    def _exp(self, x, v):
        nv = math.sqrt(float(np.dot(v, v)))
        if nv == 0.0:
            return x.copy()
        if nv < TAYLOR_THRESHOLD:
            y = (1.0 - 0.5 * nv * nv) * x + (1.0 - nv * nv / 6.0) * v
        else:
            y = math.cos(nv) * x + (math.sin(nv) / nv) * v
        return y / np.linalg.norm(y)

    def _log(self, x, y):
        c = float(np.dot(x, y))
        if c <= -1.0 + SPHERE_CUT_MARGIN:
            raise WellPosednessError(
                f"points are (nearly) antipodal, <x,y> = {c:.17g}", pair=(x.copy(), y.copy())
            )
        u = y - c * x
        su = float(np.linalg.norm(u))
        if su == 0.0:
            return np.zeros(3)
        # atan2 keeps full relative accuracy for tiny angles, unlike arccos
        theta = math.atan2(su, c)
        return (theta / su) * u

    def contains(self, coords) -> bool:
        return self.membership_error(coords) <= SPHERE_TOL

    def membership_error(self, coords) -> float:
        return abs(float(np.linalg.norm(coords)) - 1.0)

    def tangency_error(self, base, coords) -> float:
        return abs(float(np.dot(base.coords, coords)))

    def project_tangent(self, base, coords):
        coords = np.asarray(coords, dtype=float)
        return coords - np.dot(base.coords, coords) * base.coords

    def random_point(self, rng):
        x = rng.standard_normal(3)
        return Point(x / np.linalg.norm(x))


def hat(w) -> np.ndarray:
    """Skew-symmetric matrix of the vector ``w`` (so that ``hat(w) @ u = w x u``)."""
    return np.array([[0.0, -w[2], w[1]], [w[2], 0.0, -w[0]], [-w[1], w[0], 0.0]])


def vee(S) -> np.ndarray:
    return np.array([S[2, 1], S[0, 2], S[1, 0]])


def rot_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


class Rotations(Manifold):
    """SO(3) with the bi-invariant metric <U, V> = tr(U^T V) / 2.

    The factor 1/2 makes the norm of a tangent vector equal to the rotation
    angle it generates, so ``dist(I, rot_z(theta)) == theta``.
    """

    kind = ManifoldKind.SO3
    ambient_dim = 9

    def _exp(self, x, v):
        B = x.reshape(3, 3)
        Om = B.T @ v.reshape(3, 3)
        Om = 0.5 * (Om - Om.T)
        theta = float(np.linalg.norm(vee(Om)))
        if theta == 0.0:
            return x.copy()
        if theta < TAYLOR_THRESHOLD:
            a = 1.0 - theta * theta / 6.0
            b = 0.5 - theta * theta / 24.0
        else:
            a = math.sin(theta) / theta
            b = (1.0 - math.cos(theta)) / (theta * theta)
        R = np.eye(3) + a * Om + b * (Om @ Om)
        return (B @ R).reshape(-1)

    def _log(self, x, y):
        B = x.reshape(3, 3)
        Rr = B.T @ y.reshape(3, 3)
        c = 0.5 * (np.trace(Rr) - 1.0)
        S = 0.5 * (Rr - Rr.T)
        s = float(np.linalg.norm(vee(S)))
        theta = math.atan2(s, c)
        if theta >= math.pi - ROTATION_CUT_MARGIN:
            raise WellPosednessError(
                f"relative rotation angle {theta:.17g} is too close to pi",
                pair=(x.copy(), y.copy()),
            )
        if theta < TAYLOR_THRESHOLD:
            factor = 1.0 + theta * theta / 6.0
        else:
            factor = theta / s
        return (B @ (factor * S)).reshape(-1)

    def _inner(self, x, u, v):
        return 0.5 * float(np.dot(u, v))

    def contains(self, coords) -> bool:
        M = np.asarray(coords, dtype=float).reshape(3, 3)
        return (
            float(np.linalg.norm(M.T @ M - np.eye(3))) <= ROTATION_TOL
            and float(np.linalg.det(M)) > 0.0
        )

    def membership_error(self, coords) -> float:
        M = np.asarray(coords, dtype=float).reshape(3, 3)
        if np.linalg.det(M) <= 0.0:
            return math.inf
        return float(np.linalg.norm(M.T @ M - np.eye(3)))

    def tangency_error(self, base, coords) -> float:
        A = base.coords.reshape(3, 3).T @ np.asarray(coords, dtype=float).reshape(3, 3)
        return float(np.max(np.abs(A + A.T)))

    def project_tangent(self, base, coords):
        B = base.coords.reshape(3, 3)
        A = B.T @ np.asarray(coords, dtype=float).reshape(3, 3)
        return (B @ (0.5 * (A - A.T))).reshape(-1)

    def random_point(self, rng):
        # uniform (Haar) rotation from a QR decomposition with sign fix
        q, r = np.linalg.qr(rng.standard_normal((3, 3)))
        q = q * np.sign(np.diag(r))
        if np.linalg.det(q) < 0:
            q[:, 0] = -q[:, 0]
        return Point(q.reshape(-1))


class CountingManifold(Manifold):
    """Wraps a manifold and counts calls to ``exp`` and ``log``."""

    def __init__(self, inner: Manifold):
        self.wrapped = inner
        self.kind = inner.kind
        self.ambient_dim = inner.ambient_dim
        self.exp_calls = 0
        self.log_calls = 0

    def reset(self):
        self.exp_calls = 0
        self.log_calls = 0

    def exp(self, x, v):
        self.exp_calls += 1
        return self.wrapped.exp(x, v)

    def log(self, x, y):
        self.log_calls += 1
        return self.wrapped.log(x, y)

    def _inner(self, x, u, v):
        return self.wrapped._inner(x, u, v)

    def contains(self, coords):
        return self.wrapped.contains(coords)

    def membership_error(self, coords):
        return self.wrapped.membership_error(coords)

    def tangency_error(self, base, coords):
        return self.wrapped.tangency_error(base, coords)

    def project_tangent(self, base, coords):
        return self.wrapped.project_tangent(base, coords)

    def random_point(self, rng):
        return self.wrapped.random_point(rng)


def make_manifold(kind, ambient_dim: int | None = None) -> Manifold:
    """Build a manifold from a kind name (or descriptor) and dimension."""
    if isinstance(kind, ManifoldDescriptor):
        kind, ambient_dim = kind.kind, kind.ambient_dim
    try:
        kind = ManifoldKind(kind)
    except ValueError:
        raise InvalidInputError(f"unknown manifold kind {kind!r}") from None
    if kind is ManifoldKind.EUCLIDEAN:
        if ambient_dim is None:
            raise InvalidInputError("euclidean manifold needs a dimension")
        return Euclidean(ambient_dim)
    desc = ManifoldDescriptor(kind, ambient_dim if ambient_dim is not None else
                              (3 if kind is ManifoldKind.SPHERE2 else 9))
    return Sphere() if desc.kind is ManifoldKind.SPHERE2 else Rotations()
