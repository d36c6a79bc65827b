import numpy as np
import pytest

from hyperpolate import (
    ConfigurationError,
    Dataset,
    SubspaceChart,
    UnsupportedGeometryError,
    fit_additive,
    fit_extrusion,
    fit_linear,
    fit_method,
    fit_nn_ambient,
    fit_nn_projected,
    fit_slice_interpolant,
    predict_additive,
    predict_extrusion,
)


def ripple_slice_dataset():
    x = np.arange(-40.0, 41.0)
    locs = np.column_stack([x, np.full_like(x, -20.0)])
    return Dataset(locs, np.cos(np.sqrt(x**2 + 400.0)))


class TestChart:
    def test_round_trip_identity(self):
        data = ripple_slice_dataset()
        chart = SubspaceChart.from_dataset(data)
        coords = chart.to_intrinsic(data.locations)
        back = chart.from_intrinsic(coords)
        assert np.allclose(back, data.locations, atol=1e-10)

    def test_axis_aligned_detection(self):
        chart = SubspaceChart.from_dataset(ripple_slice_dataset())
        para, trans, offset = chart.axis_aligned_line()
        assert (para, trans) == (0, 1)
        assert offset == pytest.approx(-20.0)

    def test_diagonal_not_axis_aligned(self):
        t = np.arange(-3.0, 4.0)
        data = Dataset(np.column_stack([t, t]), t**2)
        assert SubspaceChart.from_dataset(data).axis_aligned_line() is None


class TestNearestNeighbourAmbient:
    def test_nearer_sample_wins(self):
        data = Dataset([[0.0, 0.0], [2.0, 0.0]], [1.0, 5.0])
        model = fit_nn_ambient(data)
        assert model.predict([0.4, 3.0]) == 1.0

    def test_sample_location_returns_stored_value(self):
        data = Dataset([[0.0, 0.0], [2.0, 0.0]], [1.0, 5.0])
        model = fit_nn_ambient(data)
        for loc, val in zip(data.locations, data.values):
            assert model.predict(loc) == val

    def test_tie_breaks_to_lowest_index(self):
        data = Dataset([[0.0, 0.0], [2.0, 0.0]], [1.0, 5.0])
        model = fit_nn_ambient(data)
        assert model.predict([1.0, 0.0]) == 1.0


class TestNearestNeighbourProjected:
    def test_linear_inner_projection(self):
        x = np.arange(0.0, 5.0)
        data = Dataset(np.column_stack([x, np.zeros_like(x)]), 2.0 * x)
        inner = fit_linear(data)
        model = fit_nn_projected(data, inner=inner)
        assert model.predict([3.0, 7.0]) == pytest.approx(6.0)

    def test_on_line_matches_inner(self):
        x = np.arange(0.0, 5.0)
        data = Dataset(np.column_stack([x, np.zeros_like(x)]), x**2)
        model = fit_nn_projected(data)
        inner = fit_slice_interpolant(data)
        chart = model.chart
        for t in np.linspace(-1.0, 5.5, 23):
            p = chart.from_intrinsic([[t]])[0]
            assert model.predict(p) == pytest.approx(float(inner(t)), abs=1e-12)

    def test_ripple_query_at_origin(self):
        model = fit_nn_projected(ripple_slice_dataset())
        # projecting (0, 0) lands on the slice at x = 0
        assert model.predict([0.0, 0.0]) == pytest.approx(np.cos(20.0), abs=1e-12)
        assert model.predict([0.0, 0.0]) == pytest.approx(0.40808206, abs=1e-7)

    def test_mismatched_inner_rejected(self):
        x = np.arange(0.0, 5.0)
        data = Dataset(np.column_stack([x, np.zeros_like(x)]), 2.0 * x)
        other = Dataset(np.column_stack([np.zeros_like(x), x]), 2.0 * x)
        inner = fit_linear(other)
        with pytest.raises(ConfigurationError):
            fit_nn_projected(data, inner=inner)


class TestLinear:
    def test_two_point_line(self):
        data = Dataset([[0.0], [1.0]], [0.0, 2.0])
        model = fit_linear(data)
        assert model.predict([0.5]) == pytest.approx(1.0)
        assert model.predict([3.0]) == pytest.approx(6.0)

    def test_noisy_slope_within_tolerance(self):
        rng = np.random.default_rng(0)
        t = np.linspace(0.0, 10.0, 100)
        values = t + 0.01 * rng.standard_normal(100)
        data = Dataset(t[:, None], values, noise_sigma=0.01)
        model = fit_linear(data)
        slope = model.predict([1.0]) - model.predict([0.0])
        assert abs(slope - 1.0) < 0.05

    def test_single_point_constant_model(self):
        # dim-0 hull needs one sample: the affine fit degenerates to a constant
        model = fit_linear(Dataset([[1.0, 1.0]], [2.0]))
        assert model.predict([9.0, -4.0]) == pytest.approx(2.0)


class TestExtrusion:
    def test_constant_along_normal(self):
        model = fit_extrusion(ripple_slice_dataset())
        vals = [model.predict([5.0, y]) for y in (-35.0, -20.0, 0.0, 17.0)]
        assert np.allclose(vals, vals[0], atol=1e-12)

    def test_on_slice_equals_inner(self):
        data = ripple_slice_dataset()
        model = fit_extrusion(data)
        for loc, val in zip(data.locations, data.values):
            assert predict_extrusion(model, loc) == pytest.approx(val, abs=1e-12)

    def test_orthogonal_constancy_random(self):
        data = ripple_slice_dataset()
        model = fit_extrusion(data)
        rng = np.random.default_rng(2)
        for _ in range(100):
            p = rng.uniform(-40, 40, size=2)
            offset = rng.uniform(-30, 30)
            q = p + offset * np.array([0.0, 1.0])  # slice normal
            assert predict_extrusion(model, q) == pytest.approx(
                predict_extrusion(model, p), abs=1e-12
            )


class TestAdditive:
    def test_identity_slice(self):
        x = np.arange(-5.0, 6.0)
        data = Dataset(np.column_stack([x, np.zeros_like(x)]), x)
        model = fit_additive(data)
        assert model.predict([2.0, 3.0]) == pytest.approx(5.0)

    def test_restriction_reproduces_slice(self):
        x = np.arange(-5.0, 6.0)
        data = Dataset(np.column_stack([x, np.full_like(x, 1.0)]), x**2)
        model = fit_additive(data)
        inner = fit_slice_interpolant(data)
        for t in np.linspace(-5.0, 5.0, 37):
            assert model.predict([t, 1.0]) == pytest.approx(
                float(inner(t)), abs=1e-12
            )

    def test_square_slice_arithmetic(self):
        # f(t) = t^2 fitted on y0 = 1: prediction 4 + 9 - 1
        model_x = lambda t: np.asarray(t, dtype=float) ** 2
        assert predict_additive(model_x, [2.0, 3.0], 1.0) == pytest.approx(12.0)

    def test_literal_form_option(self):
        model_x = lambda t: np.asarray(t, dtype=float) ** 2
        assert predict_additive(model_x, [2.0, 3.0], 1.0, literal=True) == pytest.approx(13.0)

    def test_non_axis_aligned_rejected(self):
        t = np.arange(-3.0, 4.0)
        data = Dataset(np.column_stack([t, t]), t**2)
        with pytest.raises(UnsupportedGeometryError):
            fit_additive(data)


class TestRegistry:
    def test_all_names_fit(self):
        data = ripple_slice_dataset()
        for name in ("nn_ambient", "nn_projected", "linear", "extrusion", "additive"):
            model = fit_method(name, data)
            assert np.isfinite(model.predict([1.0, -3.0]))

    def test_unknown_name(self):
        with pytest.raises(ConfigurationError):
            fit_method("kriging", ripple_slice_dataset())
