import numpy as np
import pytest

from blendspline.errors import InvalidInputError
from blendspline.oracle import DiscretizedCurve, discrete_energy, discretized_energy_min, energy_of
from blendspline.spline1d import solve_smoothing_spline


def test_converges_to_hand_value():
    curve = discretized_energy_min([0.0, 1.0, 2.0], [0.0, 1.0, 0.0], 1e6, 2001)
    assert np.interp(0.5, curve.times, curve.values[:, 0]) == pytest.approx(0.6875, abs=1e-3)


def test_constant_data():
    curve = discretized_energy_min([0.0, 0.7, 2.0, 3.0], [1.5, 1.5, 1.5, 1.5], 10.0, 201)
    np.testing.assert_allclose(curve.values, 1.5, atol=1e-10)


def test_small_lambda_is_least_squares_line():
    t, d = [0.0, 1.0, 2.0], [0.0, 1.0, 0.0]
    slope, intercept = np.polyfit(t, d, 1)
    curve = discretized_energy_min(t, d, 1e-9, 2001)
    np.testing.assert_allclose(curve.values[:, 0], intercept + slope * curve.times, atol=1e-2)


class TestEnergy:
    def test_line_through_data(self):
        t = [0.0, 1.0, 3.0]
        s = solve_smoothing_spline(t, [1.0, 3.0, 7.0], 5.0)
        assert energy_of(s, t, [1.0, 3.0, 7.0], 5.0) == pytest.approx(0.0, abs=1e-20)

    def test_constant_curve(self):
        grid = np.linspace(0.0, 1.0, 60)
        curve = DiscretizedCurve(grid, np.full((60, 1), 2.0), np.array([0, 30, 59]))
        assert energy_of(curve, [0.0, 0.5, 1.0], [2.0, 2.0, 2.0], 3.0) == 0.0

    def test_hand_example_bending(self):
        s = solve_smoothing_spline([0.0, 1.0, 2.0], [0.0, 1.0, 0.0], np.inf)
        assert energy_of(s, [0.0, 1.0, 2.0], [0.0, 1.0, 0.0], np.inf) == pytest.approx(6.0, abs=1e-12)

    def test_rejects_unknown(self):
        with pytest.raises(InvalidInputError):
            energy_of([1, 2, 3], [0.0], [0.0], 1.0)


def test_minimizer_is_optimal(rng):
    t = np.array([0.0, 0.8, 1.9, 3.1, 4.0])
    d = rng.standard_normal((5, 2))
    curve = discretized_energy_min(t, d, 10.0, 301)
    base = discrete_energy(curve, d, 10.0)
    for _ in range(50):
        bumped = DiscretizedCurve(
            curve.times, curve.values + 1e-3 * rng.standard_normal(curve.values.shape), curve.data_nodes
        )
        assert discrete_energy(bumped, d, 10.0) >= base


def test_convergence_in_grid_size():
    t = np.array([0.0, 0.37, 1.41, 2.0, 2.77])
    d = np.sin(t)
    s = solve_smoothing_spline(t, d, 10.0)
    errs = {}
    for M in (251, 501, 1001, 2001):
        c = discretized_energy_min(t, d, 10.0, M)
        errs[M] = np.max(np.abs(c.at_data()[:, 0] - s.values[:, 0]))
    rate = errs[251] / (2.77 / 250)
    for M, err in errs.items():
        assert err <= 2.0 * rate * (2.77 / (M - 1))
    assert errs[2001] < errs[251] / 4


def test_validation():
    with pytest.raises(InvalidInputError):
        discretized_energy_min([0.0, 1.0], [0.0, 1.0], 1.0, M=20)
    with pytest.raises(InvalidInputError):
        discretized_energy_min([0.0, 1.0], [0.0, 1.0], 0.0)
    with pytest.raises(InvalidInputError):
        discretized_energy_min([0.0, 1.0], [0.0, 1.0, 2.0], 1.0)
