"""Symbolic lifting search.

Fits an expression to the data slice by exhaustive shape enumeration with
least-squares constant fitting, then lifts it off the slice by replacing
constants with expressions in a transverse coordinate, ranking every
candidate by (fit residual, description-length score).

Three dataset geometries are supported:

* ambient dimension 1 ("new_dim"): the transverse coordinate is a fresh
  variable ``y`` and each candidate chooses the calibration ``y0`` at which
  the slice sits.  Since nothing orients the new axis, mirror candidates
  (``y0 = -v``) are emitted alongside and liftings whose transverse
  dependence cannot be mirrored inside the family pay a one-bit orientation
  surcharge.
* ambient dimension 2 with an axis-aligned 1D hull ("axis"): ``y0`` is fixed
  by the hull position, substitutions must be consistent with it, and the
  frame breaks the mirror symmetry.
* ambient dimension 2 with a general 1D hull ("ambient"): candidates are
  enumerated directly over both ambient variables and fitted against the
  samples.
"""

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from ._threads import thread_count
from .baselines import SubspaceChart
from .errors import UnsupportedGeometryError
from .expressions import (
    DEFAULT_COMPLEXITY,
    Grammar,
    ShapeEnumerator,
    assign_slots,
    canonical_simplify,
    complexity,
    const,
    evaluate,
    is_slot,
    node_count,
    serialize,
    slot_count,
    substitute,
    var,
)

__all__ = [
    "STRICT_TOL",
    "SliceFrame",
    "SliceFit",
    "CandidateLifting",
    "detect_frame",
    "fit_slice",
    "lift_constants",
    "search_hyperpolation",
    "restrict",
    "predict_candidate",
    "top_tie_set",
    "tie_sets",
    "candidate_to_dict",
]

STRICT_TOL = 1e-9
INT_SNAP_REL = 1e-6
ENUM_FLOOR = 4
DEFAULT_BUDGET = 200_000
SHIFT_OFFSETS = (-2, -1, 1, 2)
MAX_SLICE_FITS = 64
RANK_DIGITS = 9


def quantize_residual(residual):
    """Ranking form of a residual: 0 below the strict tolerance, else
    rounded to 9 significant digits so equally-good fits tie exactly
    instead of being ordered by floating-point noise."""
    if residual <= STRICT_TOL:
        return 0.0
    if not math.isfinite(residual):
        return math.inf
    exponent = math.floor(math.log10(residual))
    return round(residual, RANK_DIGITS - 1 - exponent)


@dataclass(frozen=True)
class SliceFrame:
    """Geometry of the data slice used to interpret candidate expressions."""

    mode: str  # "new_dim" | "axis" | "ambient"
    slice_var: str
    transverse_var: str
    y0: float  # fixed slice offset ("axis"/"ambient"); 0.0 for "new_dim"
    chart: SubspaceChart | None = None
    parallel_axis: int = 0

    @property
    def free_calibration(self):
        return self.mode == "new_dim"


@dataclass(frozen=True)
class SliceFit:
    """One fitted slice expression (over the intrinsic variable)."""

    expr: tuple
    residual: float
    score: float

    def __iter__(self):
        return iter((self.expr, self.residual, self.score))


@dataclass(frozen=True)
class CandidateLifting:
    """A lifted hypothesis: expression plus the slice calibration y0.

    The restriction of ``expr`` at the transverse coordinate ``y0``
    reproduces the fitted slice expression; ``residual`` is its max-abs
    mismatch on the sample locations and ``score`` the ranking score
    (description length plus any orientation surcharge).
    """

    expr: tuple
    y0: float
    score: float
    residual: float
    kind: str
    frame: SliceFrame
    slice_expr: tuple | None = None

    @property
    def rank_key(self):
        return (self.residual_rank, self.score, serialize(self.expr), self.y0)

    @property
    def residual_rank(self):
        return quantize_residual(self.residual)


def candidate_to_dict(c):
    return {
        "expr": serialize(c.expr),
        "y0": c.y0,
        "score": c.score,
        "residual": c.residual,
    }


def detect_frame(data, tol=None):
    """Classify the dataset geometry into one of the supported frames."""
    chart = SubspaceChart.from_dataset(data) if tol is None else SubspaceChart.from_dataset(data, tol)
    if data.ambient_dim == 1:
        if chart.dim != 1:
            raise UnsupportedGeometryError("all sample locations coincide")
        return SliceFrame(
            mode="new_dim", slice_var="x", transverse_var="y", y0=0.0, chart=chart
        )
    if data.ambient_dim == 2:
        if chart.dim != 1:
            raise UnsupportedGeometryError(
                f"symbolic search needs a 1D hull, got dim {chart.dim}"
            )
        aligned = chart.axis_aligned_line()
        names = ("x", "y")
        if aligned is not None:
            para, trans, offset = aligned
            return SliceFrame(
                mode="axis",
                slice_var=names[para],
                transverse_var=names[trans],
                y0=offset,
                chart=chart,
                parallel_axis=para,
            )
        normal = _line_normal(chart)
        return SliceFrame(
            mode="ambient",
            slice_var="x",
            transverse_var="y",
            y0=float(chart.base @ normal),
            chart=chart,
        )
    raise UnsupportedGeometryError(
        f"symbolic search supports ambient dimension 1 or 2, got {data.ambient_dim}"
    )


def _line_normal(chart):
    d = chart.subspace.basis[0]
    normal = np.array([-d[1], d[0]])
    nz = np.nonzero(np.abs(normal) > 1e-12)[0]
    if nz.size and normal[nz[0]] < 0:
        normal = -normal
    return normal


# ---------------------------------------------------------------------------
# constant fitting
# ---------------------------------------------------------------------------


def _scale_grid(envs, target):
    """Deterministic grid of starting values for constant fitting."""
    mags = [1.0]
    for arr in envs.values():
        mags.append(float(np.max(np.abs(arr))) if arr.size else 1.0)
    mags.append(float(np.max(np.abs(target))) if target.size else 1.0)
    top = 4.0 * max(1.0, max(mags)) ** 2
    geo = np.geomspace(1e-2, top, 56)
    lin = np.linspace(top / 64.0, top, 24)
    grid = np.unique(np.concatenate([[0.0], geo, -geo, lin, -lin]))
    return grid


def _linear_split(shape):
    """Strip profiled linear slots: shape == (core * c_a) + c_b.

    Returns (core, has_mul, has_add); the stripped slots are the last ones in
    DFS order, so the full constant vector is inner + [c_a] + [c_b].
    """
    has_add = has_mul = False
    core = shape
    if core[0] == "add":
        elements = _chain_list(core)
        if is_slot(elements[-1]):
            has_add = True
            core = _rebuild("add", elements[:-1])
    if core[0] == "mul":
        elements = _chain_list(core)
        if is_slot(elements[-1]):
            has_mul = True
            core = _rebuild("mul", elements[:-1])
    return core, has_mul, has_add


def _chain_list(e):
    op = e[0]
    out = [e[1]]
    rest = e[2]
    while rest[0] == op:
        out.append(rest[1])
        rest = rest[2]
    out.append(rest)
    return out


def _rebuild(op, elements):
    if len(elements) == 1:
        return elements[0]
    out = elements[-1]
    for e in reversed(elements[:-1]):
        out = (op, e, out)
    return out


def _profiled_sse(u, y, has_mul, has_add):
    """Least-squares over the profiled (c_a, c_b) given core values u.

    ``u`` may be (m,) or (m, G); returns (sse, c_a, c_b) arrays over G.
    """
    u = np.asarray(u, dtype=float)
    squeeze = u.ndim == 1
    if squeeze:
        u = u[:, None]
    m = u.shape[0]
    y = y[:, None]
    bad = ~np.isfinite(u).all(axis=0)
    with np.errstate(all="ignore"):
        if has_mul and has_add:
            um = u.mean(axis=0)
            ym = y.mean(axis=0)
            uc = u - um
            varu = (uc * uc).sum(axis=0)
            cov = (uc * (y - ym)).sum(axis=0)
            ca = np.where(varu > 0, cov / np.where(varu > 0, varu, 1.0), 0.0)
            cb = ym - ca * um
        elif has_mul:
            uu = (u * u).sum(axis=0)
            uy = (u * y).sum(axis=0)
            ca = np.where(uu > 0, uy / np.where(uu > 0, uu, 1.0), 0.0)
            cb = np.zeros_like(ca)
        elif has_add:
            ca = np.ones(u.shape[1])
            cb = (y - u).mean(axis=0)
        else:
            ca = np.ones(u.shape[1])
            cb = np.zeros(u.shape[1])
        resid = u * ca + cb - y if (has_mul or has_add) else u - y
        sse = (resid * resid).sum(axis=0)
    sse = np.where(bad | ~np.isfinite(sse), np.inf, sse)
    if squeeze:
        return float(sse[0]), float(ca[0]), float(cb[0])
    return sse, ca, cb


class _ShapeFitter:
    """Fits constant slots of shapes against targets over fixed sample envs."""

    def __init__(self, envs, target, strict_tol=STRICT_TOL):
        self.envs = {k: np.asarray(v, dtype=float) for k, v in envs.items()}
        self.target = np.asarray(target, dtype=float)
        self.strict_tol = strict_tol
        self.grid = _scale_grid(self.envs, self.target)
        self._col_envs = {k: v[:, None] for k, v in self.envs.items()}

    def _eval(self, shape, consts=None, grid_env=False):
        env = self._col_envs if grid_env else self.envs
        return evaluate(shape, env, consts)

    def fit(self, shape):
        """Return (const_vector, sse) or None when no finite fit exists."""
        with np.errstate(all="ignore"):
            return self._fit(shape)

    def _fit(self, shape):
        k = slot_count(shape)
        if k == 0:
            vals = np.broadcast_to(
                np.asarray(self._eval(shape), dtype=float), self.target.shape
            )
            if not np.all(np.isfinite(vals)):
                return None
            resid = vals - self.target
            return (), float(resid @ resid)
        core, has_mul, has_add = _linear_split(shape)
        k_inner = slot_count(core)
        if k_inner == 0:
            u = np.broadcast_to(
                np.asarray(self._eval(core), dtype=float), self.target.shape
            )
            sse, ca, cb = _profiled_sse(u, self.target, has_mul, has_add)
            if not np.isfinite(sse):
                return None
            return self._assemble((), ca, cb, has_mul, has_add), sse
        if k_inner == 1:
            inner, sse = self._fit_inner1(core, has_mul, has_add)
        elif k_inner == 2:
            inner, sse = self._fit_inner2(core, has_mul, has_add)
        else:
            inner, sse = self._fit_inner_many(core, k_inner, has_mul, has_add)
        if inner is None or not np.isfinite(sse):
            return None
        u = np.broadcast_to(
            np.asarray(self._eval(core, list(inner)), dtype=float), self.target.shape
        )
        sse, ca, cb = _profiled_sse(u, self.target, has_mul, has_add)
        if not np.isfinite(sse):
            return None
        return self._assemble(inner, ca, cb, has_mul, has_add), sse

    def _assemble(self, inner, ca, cb, has_mul, has_add):
        out = list(inner)
        if has_mul:
            out.append(float(ca))
        if has_add:
            out.append(float(cb))
        return tuple(out)

    def _sse_of(self, core, inner, has_mul, has_add):
        u = np.broadcast_to(
            np.asarray(self._eval(core, list(inner)), dtype=float), self.target.shape
        )
        sse, _, _ = _profiled_sse(u, self.target, has_mul, has_add)
        return sse

    def _fit_inner1(self, core, has_mul, has_add):
        grid = self.grid
        u = self._eval(core, [grid], grid_env=True)
        u = np.broadcast_to(np.asarray(u, dtype=float), (self.target.size, grid.size))
        sse, _, _ = _profiled_sse(u, self.target, has_mul, has_add)
        order = np.argsort(sse, kind="stable")[:3]
        best_c, best_sse = None, np.inf
        for idx in order:
            if not np.isfinite(sse[idx]):
                continue
            lo = grid[idx - 1] if idx > 0 else grid[idx] - 1.0
            hi = grid[idx + 1] if idx + 1 < grid.size else grid[idx] + 1.0
            res = minimize_scalar(
                lambda c: min(self._sse_of(core, (c,), has_mul, has_add), 1e300),
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-12},
            )
            cand_sse = float(res.fun)
            if np.isfinite(cand_sse) and cand_sse < best_sse:
                best_sse, best_c = cand_sse, float(res.x)
        if best_c is None:
            return None, np.inf
        return (best_c,), best_sse

    def _coarse(self):
        g = self.grid
        return g[:: max(1, g.size // 28)]

    def _fit_inner2(self, core, has_mul, has_add):
        coarse = self._coarse()
        best = []
        for c1 in coarse:
            u = self._eval(core, [c1, coarse], grid_env=True)
            u = np.broadcast_to(
                np.asarray(u, dtype=float), (self.target.size, coarse.size)
            )
            sse, _, _ = _profiled_sse(u, self.target, has_mul, has_add)
            idx = int(np.argmin(sse))
            if np.isfinite(sse[idx]):
                best.append((float(sse[idx]), float(c1), float(coarse[idx])))
        best.sort()
        best_v, best_sse = None, np.inf
        for _, c1, c2 in best[:3]:
            res = minimize(
                lambda c: self._sse_of(core, tuple(c), has_mul, has_add),
                x0=[c1, c2],
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 400},
            )
            if np.isfinite(res.fun) and res.fun < best_sse:
                best_sse, best_v = float(res.fun), tuple(float(v) for v in res.x)
        return best_v, best_sse

    def _fit_inner_many(self, core, k, has_mul, has_add):
        starts = [0.0, 1.0, -1.0, 2.0]
        best_v, best_sse = None, np.inf
        for combo in itertools.islice(itertools.product(starts, repeat=k), 64):
            res = minimize(
                lambda c: self._sse_of(core, tuple(c), has_mul, has_add),
                x0=list(combo),
                method="Nelder-Mead",
                options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 600},
            )
            if np.isfinite(res.fun) and res.fun < best_sse:
                best_sse, best_v = float(res.fun), tuple(float(v) for v in res.x)
        return best_v, best_sse

    def snap(self, shape, consts, sse):
        """Round near-integer constants when the fit does not degrade."""
        if not consts:
            return consts, sse
        snapped = tuple(
            round(c) if abs(c - round(c)) <= INT_SNAP_REL * max(1.0, abs(c)) else c
            for c in consts
        )
        if snapped == consts:
            return consts, sse
        vals = self._eval(shape, list(snapped))
        if not np.all(np.isfinite(vals)):
            return consts, sse
        resid = vals - self.target
        new_sse = float(resid @ resid)
        if new_sse <= sse * (1 + 1e-9) + 1e-18:
            return snapped, new_sse
        return consts, sse

    def residual_of(self, expr):
        vals = self._eval(expr)
        vals = np.broadcast_to(np.asarray(vals, dtype=float), self.target.shape)
        if not np.all(np.isfinite(vals)):
            return np.inf
        return float(np.max(np.abs(vals - self.target)))


def _shape_lower_bound(shape, model=DEFAULT_COMPLEXITY):
    """Lower bound on any lifted-candidate score from this shape.

    Operators and variables cost one point.  A surviving constant costs at
    least 3 (|c| >= 1 after identity folding) except in sub-LHS position
    where 0 survives folding; the cheapest substitution replaces one
    constant by pow2(y), worth 2 points.
    """
    slot_mins = []

    def walk(node, sub_lhs=False):
        if node[0] == "slot":
            slot_mins.append(1.0 if sub_lhs else 3.0)
            return 0.0
        if node[0] in ("var", "const"):
            return 1.0
        if node[0] == "sub":
            return 1.0 + walk(node[1], sub_lhs=True) + walk(node[2])
        return 1.0 + sum(walk(c) for c in node[1:])

    units = walk(shape)
    if not slot_mins:
        return units
    total = units + sum(slot_mins)
    return min(total, total - max(slot_mins) + 2.0)


# ---------------------------------------------------------------------------
# enumeration driver
# ---------------------------------------------------------------------------


def _iter_fitted(
    envs,
    target,
    grammar,
    budget,
    strict,
    score_floor_cb,
    threads=None,
    floor=ENUM_FLOOR,
):
    """Enumerate shapes ascending, fit constants, yield fitted expressions.

    ``score_floor_cb(expr, residual)`` returns the best achievable ranking
    score for a qualifying fit, used to certify when no later level can
    still contribute; in strict mode shapes whose lower bound exceeds the
    certified best are skipped without fitting.
    """
    fitter = _ShapeFitter(envs, target)
    enum = ShapeEnumerator(grammar)
    workers = thread_count(threads)
    budget = DEFAULT_BUDGET if budget is None else int(budget)
    best_score = math.inf
    seen = set()
    results = []

    def process(shape):
        fit = fitter.fit(shape)
        if fit is None:
            return None
        consts, sse = fitter.snap(shape, *fit)
        expr = canonical_simplify(assign_slots(shape, consts))
        if node_count(expr) < node_count(shape):
            return None  # folded duplicate of a smaller shape
        residual = fitter.residual_of(expr)
        if not np.isfinite(residual):
            return None
        return expr, residual

    # level 0 holds the bare-constant shape; level n the n-node shapes
    levels = [[("slot",)]] if grammar.allow_constants else [[]]
    max_nodes = grammar.max_nodes

    n = 0
    while n <= max_nodes:
        if budget <= 0:
            break
        if n >= len(levels):
            levels.append(
                [s for s in enum.shapes(n) if _depth_ok(s, grammar.max_depth)]
            )
        shapes = levels[n]
        if strict and math.isfinite(best_score) and n > max(best_score, floor):
            break
        batch = []
        for shape in shapes:
            if budget <= 0:
                break
            if (
                strict
                and math.isfinite(best_score)
                and n > floor
                and _shape_lower_bound(shape) > best_score
            ):
                continue
            batch.append(shape)
            budget -= 1
        if workers > 1 and len(batch) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                outs = list(pool.map(process, batch))
        else:
            outs = [process(s) for s in batch]
        for out in outs:
            if out is None:
                continue
            expr, residual = out
            key = serialize(expr)
            if key in seen:
                continue
            seen.add(key)
            results.append((expr, residual))
            if strict and residual <= STRICT_TOL:
                score = score_floor_cb(expr, residual)
                if score < best_score:
                    best_score = score
        n += 1
    return results


def _depth_ok(shape, max_depth):
    def depth(e):
        if e[0] in ("var", "const", "slot"):
            return 1
        return 1 + max(depth(c) for c in e[1:])

    return depth(shape) <= max_depth


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def fit_slice(data, grammar=None, budget=None, threads=None, scorer=DEFAULT_COMPLEXITY):
    """Fit slice expressions over the intrinsic coordinate t.

    Returns SliceFit records ordered by (residual, score, serialization);
    in strict mode (noise-free data) only fits with max-abs residual at or
    below the strict tolerance qualify.  An exhausted budget with no
    qualifying expression yields an empty list.
    """
    frame = detect_frame(data)
    t = _intrinsic_coordinate(data, frame)
    grammar = grammar or Grammar(variables=("t",))
    if grammar.variables != ("t",):
        grammar = replace(grammar, variables=("t",))
    strict = data.strict
    results = _iter_fitted(
        {"t": t},
        data.values,
        grammar,
        budget,
        strict,
        score_floor_cb=lambda e, r: complexity(e, scorer),
        threads=threads,
    )
    fits = []
    for expr, residual in results:
        if strict and residual > STRICT_TOL:
            continue
        fits.append(SliceFit(expr, residual, complexity(expr, scorer)))
    fits.sort(key=lambda f: (quantize_residual(f.residual), f.score, serialize(f.expr)))
    if not strict:
        fits = fits[:MAX_SLICE_FITS]
    return fits


def _intrinsic_coordinate(data, frame):
    if frame.mode == "new_dim":
        return data.locations[:, 0]
    if frame.mode == "axis":
        return data.locations[:, frame.parallel_axis]
    return frame.chart.to_intrinsic(data.locations)[:, 0]


def _replace_const_occurrence(expr, index, replacement):
    """Replace the index-th constant leaf (DFS order) by an expression."""
    counter = [0]

    def rec(node):
        if node[0] == "const":
            i = counter[0]
            counter[0] += 1
            return replacement if i == index else node
        if node[0] in ("var", "slot"):
            return node
        return (node[0],) + tuple(rec(c) for c in node[1:])

    return rec(expr)


def _const_values(expr):
    if expr[0] == "const":
        return [expr[1]]
    if expr[0] in ("var", "slot"):
        return []
    out = []
    for c in expr[1:]:
        out.extend(_const_values(c))
    return out


def _is_even_in(expr, name, probes=(0.37, 1.91, 5.3, 17.0)):
    """Numeric evenness check of expr in one variable (nan-tolerant)."""
    others = sorted(v for v in _variables(expr) if v != name)
    grid = np.array([-13.7, -2.3, 0.41, 3.9, 29.0])
    u = np.array(probes)
    env_pos = {name: u[:, None]}
    env_neg = {name: -u[:, None]}
    for i, v in enumerate(others):
        env_pos[v] = grid[None, :] + i
        env_neg[v] = grid[None, :] + i
    a = np.asarray(evaluate(expr, env_pos), dtype=float)
    b = np.asarray(evaluate(expr, env_neg), dtype=float)
    a = np.broadcast_to(a, (u.size, grid.size))
    b = np.broadcast_to(b, (u.size, grid.size))
    both = np.isfinite(a) & np.isfinite(b)
    if not np.array_equal(np.isfinite(a), np.isfinite(b)):
        return False
    if not both.any():
        return True
    return bool(np.allclose(a[both], b[both], rtol=1e-9, atol=1e-12))


def _variables(expr):
    if expr[0] == "var":
        return {expr[1]}
    if expr[0] in ("const", "slot"):
        return set()
    out = set()
    for c in expr[1:]:
        out |= _variables(c)
    return out


def lift_constants(
    expr,
    slice_hint=None,
    residual=0.0,
    scorer=DEFAULT_COMPLEXITY,
):
    """Lift a slice expression into the transverse coordinate.

    For each constant occurrence c the menu substitutes c -> y, c -> y^2 and
    c -> y^2 + b over small integer offsets b, plus the identity (extrusion)
    lifting; the slice variable t is renamed to the ambient one.  Every
    candidate records the calibration y0 that makes its restriction
    reproduce the slice expression; with a fixed frame, substitutions
    inconsistent with the known y0 are dropped.  Pure-constant expressions
    only extrude: there is no structure for a new coordinate to explain.
    """
    frame = slice_hint or SliceFrame(
        mode="new_dim", slice_var="x", transverse_var="y", y0=0.0
    )
    sv, tv = frame.slice_var, frame.transverse_var
    renamed = canonical_simplify(substitute(expr, {"t": var(sv)}))
    out = []

    def emit(e, y0, kind):
        e = canonical_simplify(e)
        score = complexity(e, scorer)
        if frame.free_calibration and tv in _variables(e) and not _is_even_in(e, tv):
            # the data cannot orient the new axis: unmirrorable transverse
            # dependence costs one extra bit
            score += scorer.int_bit_cost
        out.append(
            CandidateLifting(
                expr=e,
                y0=float(y0),
                score=score,
                residual=residual,
                kind=kind,
                frame=frame,
            )
        )

    emit(renamed, frame.y0 if not frame.free_calibration else 0.0, "extrusion")
    if not _variables(renamed):
        return _dedupe(out)

    free = frame.free_calibration
    y0_fixed = frame.y0
    for index, c in enumerate(_const_values(renamed)):
        # c -> y
        if free or math.isclose(c, y0_fixed, rel_tol=1e-9, abs_tol=1e-9):
            emit(
                _replace_const_occurrence(renamed, index, var(tv)),
                c if free else y0_fixed,
                "sub_y",
            )
        # c -> y^2 (+ integer offsets); skipped when c - b < 0
        for b in (0,) + SHIFT_OFFSETS:
            disc = c - b
            if disc < 0:
                continue
            body = ("pow2", var(tv))
            if b:
                body = ("add", body, const(b))
            if free:
                root = math.sqrt(disc)
                calibrations = [0.0] if root == 0.0 else [-root, root]
                for y0 in calibrations:
                    emit(_replace_const_occurrence(renamed, index, body), y0, "sub_y2")
            else:
                if math.isclose(y0_fixed**2, disc, rel_tol=1e-9, abs_tol=1e-9):
                    emit(
                        _replace_const_occurrence(renamed, index, body),
                        y0_fixed,
                        "sub_y2",
                    )
                # shifted square (y - a)^2 + b with the frame pinning a
                root = math.sqrt(disc)
                for a in sorted({y0_fixed - root, y0_fixed + root}):
                    if abs(a) <= 1e-12:
                        continue  # plain y^2 handled above
                    if abs(a - round(a)) <= 1e-9:
                        a = float(round(a))
                    shifted = ("pow2", ("sub", var(tv), const(a)))
                    if b:
                        shifted = ("add", shifted, const(b))
                    emit(
                        _replace_const_occurrence(renamed, index, shifted),
                        y0_fixed,
                        "sub_shift",
                    )
    return _dedupe(out)


def _dedupe(cands):
    seen = {}
    for c in cands:
        key = (serialize(c.expr), round(c.y0, 9))
        if key not in seen:
            seen[key] = c
    return list(seen.values())


def search_hyperpolation(
    data,
    grammar=None,
    budget=None,
    threads=None,
    scorer=DEFAULT_COMPLEXITY,
):
    """Full search: slice fit composed with constant lifting, ranked.

    Returns candidates ordered by (residual, score) with deterministic
    tie-breaking on (serialized expression, y0); reflected-symmetry pairs
    carry identical scores and co-occur.  On a general (non-axis-aligned)
    2D hull, candidates are enumerated directly over the ambient variables.
    """
    frame = detect_frame(data)
    if frame.mode == "ambient":
        candidates = _search_ambient(data, frame, grammar, budget, threads, scorer)
    else:
        candidates = _search_lifted(data, frame, grammar, budget, threads, scorer)
    candidates.sort(key=lambda c: c.rank_key)
    return candidates


def _search_lifted(data, frame, grammar, budget, threads, scorer):
    t = _intrinsic_coordinate(data, frame)
    grammar = grammar or Grammar(variables=("t",))
    if grammar.variables != ("t",):
        grammar = replace(grammar, variables=("t",))
    strict = data.strict
    fitter = _ShapeFitter({"t": t}, data.values)

    def best_candidate_score(expr, residual):
        cands = lift_constants(expr, frame, residual=residual, scorer=scorer)
        return min(c.score for c in cands)

    results = _iter_fitted(
        {"t": t},
        data.values,
        grammar,
        budget,
        strict,
        score_floor_cb=best_candidate_score,
        threads=threads,
    )
    slice_fits = []
    for expr, residual in results:
        if strict and residual > STRICT_TOL:
            continue
        slice_fits.append(SliceFit(expr, residual, complexity(expr, scorer)))
    slice_fits.sort(
        key=lambda f: (quantize_residual(f.residual), f.score, serialize(f.expr))
    )
    slice_fits = slice_fits[:MAX_SLICE_FITS]
    candidates = []
    for fit in slice_fits:
        lifted = lift_constants(fit.expr, frame, residual=fit.residual, scorer=scorer)
        for cand in lifted:
            restricted = restrict(cand)
            residual = fitter.residual_of(
                substitute(restricted, {frame.slice_var: var("t")})
            )
            if not np.isfinite(residual):
                continue
            candidates.append(
                replace(cand, residual=residual, slice_expr=fit.expr)
            )
    return _dedupe(candidates)


def _search_ambient(data, frame, grammar, budget, threads, scorer):
    grammar = grammar or Grammar(variables=("x", "y"))
    if set(grammar.variables) != {"x", "y"}:
        grammar = replace(grammar, variables=("x", "y"))
    envs = {"x": data.locations[:, 0], "y": data.locations[:, 1]}
    strict = data.strict
    results = _iter_fitted(
        envs,
        data.values,
        grammar,
        budget,
        strict,
        score_floor_cb=lambda e, r: complexity(e, scorer),
        threads=threads,
    )
    candidates = []
    for expr, residual in results:
        if strict and residual > STRICT_TOL:
            continue
        candidates.append(
            CandidateLifting(
                expr=expr,
                y0=frame.y0,
                score=complexity(expr, scorer),
                residual=residual,
                kind="direct",
                frame=frame,
            )
        )
    if not strict:
        candidates.sort(key=lambda c: c.rank_key)
        candidates = candidates[:MAX_SLICE_FITS]
    return _dedupe(candidates)


def restrict(candidate):
    """Slice restriction of a candidate: the expression at y = y0.

    For general 2D hulls the restriction substitutes the line's unit-speed
    parametrization instead.
    """
    frame = candidate.frame
    if frame.mode in ("new_dim", "axis"):
        return canonical_simplify(
            substitute(candidate.expr, {frame.transverse_var: const(candidate.y0)})
        )
    chart = frame.chart
    b = chart.base
    d = chart.subspace.basis[0]
    mapping = {}
    for i, name in enumerate(("x", "y")):
        expr = ("add", ("mul", const(d[i]), var("t")), const(b[i]))
        mapping[name] = canonical_simplify(expr)
    return canonical_simplify(substitute(candidate.expr, mapping))


def predict_candidate(candidate, points):
    """Evaluate a candidate hypothesis at ambient query points.

    New-dimension candidates read queries as (x, offset) in the canonical
    embedding where the slice sits at offset 0; the candidate's own frame
    places the slice at y0, so the transverse coordinate is y0 + offset.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    frame = candidate.frame
    if frame.mode == "new_dim":
        x = pts[:, 0]
        offset = pts[:, 1] if pts.shape[1] > 1 else np.zeros_like(x)
        env = {"x": x, "y": candidate.y0 + offset}
    else:
        env = {"x": pts[:, 0], "y": pts[:, 1]}
    vals = evaluate(candidate.expr, env)
    return np.broadcast_to(np.asarray(vals, dtype=float), (pts.shape[0],)).copy()


def tie_sets(candidates):
    """Group a ranked candidate list into runs of equal (residual, score)."""
    groups = []
    for c in candidates:
        key = (c.residual_rank, c.score)
        if groups and groups[-1][0] == key:
            groups[-1][1].append(c)
        else:
            groups.append((key, [c]))
    return [g for _, g in groups]


def top_tie_set(candidates):
    """The best-ranked tie set (empty list for an empty search result)."""
    groups = tie_sets(candidates)
    return groups[0] if groups else []
