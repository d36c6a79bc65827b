"""Non-symbolic polation baselines.

Two nearest-neighbour variants (ambient-nearest sample, and projection onto
the data subspace followed by a 1D interpolant), a least-squares linear model
on the subspace, extrusion of a subspace model along the orthogonal
directions, and the additive lifting f(x, y) = f(x) + f(y) - f(y0).
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigurationError,
    DegenerateFitError,
    UnsupportedGeometryError,
)
from .geometry import AffineSubspace, affine_hull, project

__all__ = [
    "SubspaceChart",
    "SliceModel",
    "PolationModel",
    "METHOD_NAMES",
    "fit_slice_interpolant",
    "fit_nn_ambient",
    "fit_nn_projected",
    "fit_linear",
    "fit_extrusion",
    "fit_additive",
    "fit_method",
    "predict_extrusion",
    "predict_additive",
]

METHOD_NAMES = ("nn_ambient", "nn_projected", "linear", "extrusion", "additive")


@dataclass(frozen=True)
class SubspaceChart:
    """Deterministic intrinsic coordinates on an affine subspace.

    The chart base is the projection of the ambient origin onto the subspace
    and direction signs are fixed by the hull fit, so two charts built from
    the same data coincide exactly.  Round-tripping intrinsic coordinates
    through the embedding is the identity on the subspace.
    """

    subspace: AffineSubspace
    base: np.ndarray

    @classmethod
    def from_subspace(cls, sub):
        base, _ = project(sub, np.zeros(sub.ambient_dim))
        base = base.copy()
        base.setflags(write=False)
        return cls(subspace=sub, base=base)

    @classmethod
    def from_dataset(cls, data, tol=None):
        sub = affine_hull(data) if tol is None else affine_hull(data, tol)
        return cls.from_subspace(sub)

    @property
    def dim(self):
        return self.subspace.dim

    @property
    def ambient_dim(self):
        return self.subspace.ambient_dim

    def to_intrinsic(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return (pts - self.base) @ self.subspace.basis.T

    def from_intrinsic(self, coords):
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        return self.base + coords @ self.subspace.basis

    def axis_aligned_line(self):
        """(parallel_axis, transverse_axis, offset) when the chart is a 1D
        line parallel to a coordinate axis in a 2D ambient space, else None."""
        if self.ambient_dim != 2 or self.dim != 1:
            return None
        direction = self.subspace.basis[0]
        for axis in (0, 1):
            if abs(abs(direction[axis]) - 1.0) <= 1e-10:
                transverse = 1 - axis
                return axis, transverse, float(self.base[transverse])
        return None


class SliceModel:
    """A 1D model of the function along the data's subspace.

    ``kind`` is ``"piecewise_linear"`` (strict interpolant with linear
    extrapolation from the two outermost points) or ``"affine"``.
    """

    def __init__(self, chart, kind, knots=None, values=None, coeffs=None):
        if chart.dim != 1:
            raise UnsupportedGeometryError("slice models require a 1D subspace")
        self.chart = chart
        self.kind = kind
        self.knots = None if knots is None else np.asarray(knots, dtype=float)
        self.values = None if values is None else np.asarray(values, dtype=float)
        self.coeffs = None if coeffs is None else np.asarray(coeffs, dtype=float)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        if self.kind == "affine":
            out = self.coeffs[0] + self.coeffs[1] * t
        else:
            xs, ys = self.knots, self.values
            out = np.interp(t, xs, ys)
            if xs.size >= 2:
                lo = t < xs[0]
                hi = t > xs[-1]
                if np.any(lo):
                    slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
                    out = np.where(lo, ys[0] + slope * (t - xs[0]), out)
                if np.any(hi):
                    slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
                    out = np.where(hi, ys[-1] + slope * (t - xs[-1]), out)
        return float(out[0]) if scalar else out


def fit_slice_interpolant(data, chart=None):
    """Default inner model: piecewise-linear through the slice samples.

    Duplicate intrinsic locations are averaged (strict mode guarantees their
    values agree, so averaging is a no-op there).
    """
    chart = chart or SubspaceChart.from_dataset(data)
    if chart.dim != 1:
        raise UnsupportedGeometryError(
            f"piecewise-linear interpolant needs a 1D hull, got dim {chart.dim}"
        )
    t = chart.to_intrinsic(data.locations)[:, 0]
    order = np.argsort(t, kind="stable")
    ts, ys = t[order], data.values[order]
    knots, counts = [], []
    vals = []
    for ti, yi in zip(ts, ys):
        if knots and abs(ti - knots[-1]) <= 1e-12:
            vals[-1] += yi
            counts[-1] += 1
        else:
            knots.append(ti)
            vals.append(yi)
            counts.append(1)
    values = np.asarray(vals) / np.asarray(counts)
    if len(knots) < 2:
        # a single distinct location: constant slice model
        return SliceModel(chart, "affine", coeffs=(values[0], 0.0))
    return SliceModel(chart, "piecewise_linear", knots=np.asarray(knots), values=values)


class PolationModel:
    """A fitted prediction method; immutable, predictions are pure.

    Use the ``fit_*`` functions (or :func:`fit_method`) to construct one.
    """

    def __init__(self, method, source, chart=None, **state):
        self.method = method
        self.source = source
        self.chart = chart
        self._state = state

    def __getattr__(self, name):
        try:
            return self.__dict__["_state"][name]
        except KeyError:
            raise AttributeError(name) from None

    def __repr__(self):
        return f"PolationModel({self.method!r})"

    def predict(self, points):
        points = np.asarray(points, dtype=float)
        scalar = points.ndim == 1
        pts = np.atleast_2d(points)
        out = self._predict(pts)
        return float(out[0]) if scalar else out

    def _predict(self, pts):
        if self.method == "nn_ambient":
            d2 = ((pts[:, None, :] - self.locations[None, :, :]) ** 2).sum(axis=2)
            # argmin takes the first minimum: ties break to the lowest index
            return self.values[np.argmin(d2, axis=1)]
        if self.method in ("nn_projected", "extrusion"):
            t = self.chart.to_intrinsic(pts)[:, 0]
            return np.atleast_1d(self.inner(t))
        if self.method == "linear":
            coords = self.chart.to_intrinsic(pts)
            return self.coeffs[0] + coords @ self.coeffs[1:]
        if self.method == "additive":
            f = self.inner
            para, trans = self.parallel_axis, self.transverse_axis
            out = np.atleast_1d(f(pts[:, para])) + np.atleast_1d(f(pts[:, trans]))
            if not self.literal:
                out = out - f(self.offset)
            return out
        raise ConfigurationError(f"unknown method {self.method!r}")


def fit_nn_ambient(data):
    """Predict the value of the Euclidean-nearest sample location."""
    return PolationModel(
        "nn_ambient", data, locations=data.locations, values=data.values
    )


def _as_inner(inner, chart):
    if isinstance(inner, SliceModel):
        model_chart = inner.chart
        fn = inner
    elif isinstance(inner, PolationModel) and inner.method == "linear":
        model_chart = inner.chart
        coeffs = inner.coeffs

        def fn(t):
            return coeffs[0] + coeffs[1] * np.asarray(t, dtype=float)

    else:
        raise ConfigurationError(
            "inner model must be a SliceModel or a fitted 'linear' PolationModel"
        )
    if model_chart.dim != chart.dim or not np.allclose(
        model_chart.subspace.basis, chart.subspace.basis, atol=1e-9
    ) or not np.allclose(model_chart.base, chart.base, atol=1e-9):
        raise ConfigurationError("inner model does not cover the data's affine hull")
    return fn


def fit_nn_projected(data, inner=None):
    """Interpolate/extrapolate along the subspace first, then carry those
    values to off-subspace queries at the projected location."""
    chart = SubspaceChart.from_dataset(data)
    if chart.dim != 1:
        raise UnsupportedGeometryError("nn_projected requires a 1D hull")
    if inner is None:
        inner_fn = fit_slice_interpolant(data, chart)
    else:
        inner_fn = _as_inner(inner, chart)
    return PolationModel("nn_projected", data, chart=chart, inner=inner_fn)


def fit_linear(data):
    """Least-squares affine model of the intrinsic coordinates.

    With exactly k+1 affinely independent strict samples this interpolates
    them exactly; a rank-deficient design raises DegenerateFitError.
    """
    chart = SubspaceChart.from_dataset(data)
    coords = chart.to_intrinsic(data.locations)
    design = np.column_stack([np.ones(len(data)), coords])
    if np.linalg.matrix_rank(design) < design.shape[1]:
        raise DegenerateFitError(
            f"need at least {chart.dim + 1} affinely independent samples"
        )
    coeffs, *_ = np.linalg.lstsq(design, data.values, rcond=None)
    return PolationModel("linear", data, chart=chart, coeffs=coeffs)


def fit_extrusion(data, inner=None):
    """Extrude a subspace model: constant along every orthogonal direction."""
    chart = SubspaceChart.from_dataset(data)
    if chart.dim != 1:
        raise UnsupportedGeometryError("extrusion baseline requires a 1D hull")
    if inner is None:
        inner_fn = fit_slice_interpolant(data, chart)
    else:
        inner_fn = _as_inner(inner, chart)
    return PolationModel("extrusion", data, chart=chart, inner=inner_fn)


def predict_extrusion(model, p):
    """Extruded prediction at ``p``: the subspace model at the projection."""
    if model.method not in ("extrusion", "nn_projected"):
        raise ConfigurationError("model is not an extrusion over the data subspace")
    return model.predict(np.asarray(p, dtype=float))


def fit_additive(data, literal=False):
    """Additive lifting for an axis-aligned slice in a 2D ambient space.

    The default prediction is f(x) + f(y) - f(y0), which restricts to the
    slice model exactly; ``literal=True`` selects the uncorrected form
    f(x) + f(y).
    """
    chart = SubspaceChart.from_dataset(data)
    aligned = chart.axis_aligned_line()
    if aligned is None:
        raise UnsupportedGeometryError(
            "additive lifting needs an axis-aligned 1D slice in a 2D space"
        )
    para, trans, offset = aligned
    inner = fit_slice_interpolant(data, chart)
    return PolationModel(
        "additive",
        data,
        chart=chart,
        inner=inner,
        parallel_axis=para,
        transverse_axis=trans,
        offset=offset,
        literal=bool(literal),
    )


def predict_additive(model_x, p, slice_offset, literal=False):
    """Additive prediction from a 1D slice model.

    ``model_x`` is evaluated at both coordinates of ``p``; the value at
    ``slice_offset`` is subtracted unless the literal form is requested.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise UnsupportedGeometryError("additive lifting is defined on 2D points")
    out = float(model_x(p[0])) + float(model_x(p[1]))
    if not literal:
        out -= float(model_x(slice_offset))
    return out


def fit_method(name, data):
    """Fit a baseline by its configuration name."""
    fitters = {
        "nn_ambient": fit_nn_ambient,
        "nn_projected": fit_nn_projected,
        "linear": fit_linear,
        "extrusion": fit_extrusion,
        "additive": fit_additive,
    }
    try:
        fitter = fitters[name]
    except KeyError:
        raise ConfigurationError(f"unknown method {name!r}") from None
    return fitter(data)
