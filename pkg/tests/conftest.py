import numpy as np
import pytest

from blendspline.manifold import Rotations, Sphere

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def sphere_points_in_cap(rng, count, min_sep=0.3, min_dot=-0.5):
    """Random sphere points, pairwise separated and far from antipodal."""
    S = Sphere()
    pts = []
    while len(pts) < count:
        p = S.random_point(rng).coords
        if all(np.dot(p, q) < np.cos(min_sep) and np.dot(p, q) > min_dot for q in pts):
            pts.append(p)
    return np.array(pts)


def rotations_near(rng, count, spread=0.4):
    """Rotations within ``spread`` radians of a random base rotation."""
    from blendspline.manifold import Point, TangentVector

    R = Rotations()
    base = R.random_point(rng)
    out = []
    for _ in range(count):
        v = R.project_tangent(base, rng.standard_normal(9))
        v *= spread / max(R.norm(base, TangentVector(base, v)), 1e-12) * rng.uniform(0.2, 1.0)
        out.append(R.exp(base, TangentVector(base, v)).coords)
    return np.array(out)
