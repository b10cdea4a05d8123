import numpy as np
import pytest

from mahcm import DataError, EvaluationCurve, fit_line, l_method

from .oracles import l_method_scan


def corner_curve(b, corner, slope_left=-2.0, slope_right=-0.01, y_at_corner=5.0):
    """Two exact line segments; the right one starts strictly below the corner
    point, so exactly one split explains the curve with zero residual."""
    x = np.arange(2, b + 1)
    y = np.where(
        x <= corner,
        y_at_corner + slope_left * (x - corner),
        0.5 * y_at_corner + slope_right * (x - corner),
    )
    return EvaluationCurve(x=x, y=y.astype(float))


class TestFitLine:
    def test_exact_line(self):
        x = np.arange(2, 12)
        fit = fit_line(x, 2.0 * x + 1.0)
        assert fit.slope == pytest.approx(2.0, abs=1e-12)
        assert fit.intercept == pytest.approx(1.0, abs=1e-12)
        assert fit.rmse == pytest.approx(0.0, abs=1e-12)

    def test_two_points_interpolate(self):
        fit = fit_line([1, 4], [3, 9])
        assert fit.rmse == pytest.approx(0.0, abs=1e-12)

    def test_against_normal_equations(self):
        x = np.array([2.0, 3.0, 4.0])
        y = np.array([4.0, 5.0, 7.0])
        fit = fit_line(x, y)
        # closed-form normal equations, solved independently
        n = len(x)
        sx, sy, sxx, sxy = x.sum(), y.sum(), (x * x).sum(), (x * y).sum()
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx)
        intercept = (sy - slope * sx) / n
        assert fit.slope == pytest.approx(slope, abs=1e-12)
        assert fit.intercept == pytest.approx(intercept, abs=1e-12)
        resid = y - (slope * x + intercept)
        assert fit.rmse == pytest.approx(np.sqrt(np.mean(resid**2)), abs=1e-12)

    def test_too_few_points(self):
        with pytest.raises(DataError):
            fit_line([1.0], [2.0])


class TestLMethod:
    def test_exact_corner_recovered(self):
        res = l_method(corner_curve(50, 10))
        assert res.k == 10
        assert not res.fallback

    def test_linear_curve_takes_tiebreak_minimum(self):
        x = np.arange(2, 30)
        curve = EvaluationCurve(x=x, y=(100.0 - 3.0 * x))
        res = l_method(curve)
        assert res.k == 3  # flat objective, smallest admissible split wins

    def test_short_curve_falls_back(self):
        curve = EvaluationCurve(x=np.arange(2, 5), y=np.array([3.0, 2.0, 1.0]))
        res = l_method(curve)
        assert res.k == 2
        assert res.fallback

    def test_matches_exhaustive_scan(self):
        rng = np.random.default_rng(41)
        for _ in range(60):
            b = int(rng.integers(5, 60))
            y = np.sort(rng.random(b - 1))[::-1] * rng.uniform(0.5, 20)
            curve = EvaluationCurve(x=np.arange(2, b + 1), y=y.copy())
            assert l_method(curve).k == l_method_scan(curve.x, curve.y)

    def test_scale_invariance(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            b = int(rng.integers(6, 40))
            y = np.sort(rng.random(b - 1))[::-1]
            k1 = l_method(EvaluationCurve(x=np.arange(2, b + 1), y=y.copy())).k
            k2 = l_method(EvaluationCurve(x=np.arange(2, b + 1), y=y * 137.0)).k
            assert k1 == k2

    def test_output_range(self):
        rng = np.random.default_rng(43)
        for _ in range(40):
            b = int(rng.integers(3, 50))
            y = rng.random(b - 1)
            res = l_method(EvaluationCurve(x=np.arange(2, b + 1), y=y))
            assert 2 <= res.k <= b - 1

    def test_refine_keeps_exact_corner(self):
        res = l_method(corner_curve(80, 7), refine=True)
        assert res.k == 7

    def test_curve_validation(self):
        with pytest.raises(DataError):
            EvaluationCurve(x=np.array([3, 4]), y=np.array([1.0, 0.5]))
        with pytest.raises(DataError):
            EvaluationCurve(x=np.array([2, 4]), y=np.array([1.0, 0.5]))
        with pytest.raises(DataError):
            EvaluationCurve(x=np.array([2, 3]), y=np.array([1.0, -0.5]))
