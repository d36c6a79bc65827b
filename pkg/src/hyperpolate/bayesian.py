"""Bayesian inference over an explicit, finite family of function hypotheses.

All three polation kinds reduce to the same procedure: weight hypotheses a
priori by simplicity (2^-score), update on the samples (exact-fit indicator
in strict mode, Gaussian likelihood under noise), and read predictions off
the resulting mixture at any query point.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NoPredictionError
from .expressions import DEFAULT_COMPLEXITY, complexity, evaluate, serialize
from .symbolic import STRICT_TOL, CandidateLifting, predict_candidate

__all__ = [
    "Hypothesis",
    "HypothesisFamily",
    "Posterior",
    "PredictiveDistribution",
    "build_prior",
    "family_from_candidates",
    "update",
    "predict",
]

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True)
class Hypothesis:
    """One candidate function over the ambient space."""

    expr: tuple
    score: float
    candidate: CandidateLifting | None = None

    @property
    def label(self):
        if self.candidate is not None and self.candidate.frame.mode == "new_dim":
            return f"{serialize(self.expr)}@y0={self.candidate.y0:g}"
        return serialize(self.expr)

    def __call__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if self.candidate is not None:
            return predict_candidate(self.candidate, pts)
        names = ("x", "y", "z")
        env = {names[i]: pts[:, i] for i in range(min(pts.shape[1], 3))}
        vals = evaluate(self.expr, env)
        return np.broadcast_to(np.asarray(vals, dtype=float), (pts.shape[0],)).copy()


def _normalized(log_weights):
    log_weights = np.asarray(log_weights, dtype=float)
    finite = np.isfinite(log_weights)
    if not finite.any():
        return None
    shifted = log_weights - np.max(log_weights[finite])
    w = np.where(finite, np.exp(np.where(finite, shifted, -np.inf)), 0.0)
    return w / w.sum()


@dataclass(frozen=True)
class HypothesisFamily:
    """Hypotheses with normalized prior weights."""

    hypotheses: tuple
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if abs(w.sum() - 1.0) > NORMALIZATION_TOL:
            raise InvalidInputError("prior weights must sum to 1")
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.hypotheses)


@dataclass(frozen=True)
class Posterior:
    """Updated weights; empty when no hypothesis survives the evidence."""

    hypotheses: tuple
    weights: np.ndarray
    noise_sigma: float

    @property
    def is_empty(self):
        return len(self.hypotheses) == 0

    def __len__(self):
        return len(self.hypotheses)

    def map_hypothesis(self):
        if self.is_empty:
            raise NoPredictionError("empty posterior")
        idx = int(np.argmax(self.weights))
        return self.hypotheses[idx]

    def to_records(self, data=None):
        """JSON-ready records {expr, weight, residual}."""
        out = []
        for h, w in zip(self.hypotheses, self.weights):
            rec = {"expr": h.label, "weight": float(w)}
            if data is not None:
                vals = h(data.locations)
                rec["residual"] = float(np.max(np.abs(vals - data.values)))
            out.append(rec)
        return out


@dataclass(frozen=True)
class PredictiveDistribution:
    """Discrete mixture of hypothesis values at one query point.

    ``map_value`` is the value of the highest-weight surviving hypothesis
    (not of the largest merged atom).
    """

    values: np.ndarray
    weights: np.ndarray
    mean: float
    map_value: float

    def __len__(self):
        return len(self.values)


def build_prior(expressions, scorer=None):
    """Prior over hypotheses with weights proportional to 2^(-score).

    ``expressions`` may hold expression trees or Hypothesis objects; the
    scorer defaults to the description-length complexity.
    """
    if not expressions:
        raise InvalidInputError("hypothesis family must be nonempty")
    scorer = scorer or (lambda e: complexity(e, DEFAULT_COMPLEXITY))
    hyps = []
    for e in expressions:
        if isinstance(e, Hypothesis):
            hyps.append(e)
        else:
            hyps.append(Hypothesis(expr=e, score=float(scorer(e))))
    log_w = np.array([-h.score * math.log(2.0) for h in hyps])
    return HypothesisFamily(hypotheses=tuple(hyps), weights=_normalized(log_w))


def family_from_candidates(candidates):
    """Prior built from search results, reusing their recorded scores."""
    if not candidates:
        raise InvalidInputError("hypothesis family must be nonempty")
    hyps = [
        Hypothesis(expr=c.expr, score=float(c.score), candidate=c)
        for c in candidates
    ]
    log_w = np.array([-h.score * math.log(2.0) for h in hyps])
    return HypothesisFamily(hypotheses=tuple(hyps), weights=_normalized(log_w))


def update(prior, data, strict_tol=STRICT_TOL):
    """Condition the prior on the dataset.

    Strict mode (sigma = 0) keeps exactly the hypotheses whose max-abs
    residual is within tolerance; flexible mode multiplies by the Gaussian
    likelihood at sigma.  A hypothesis that hits an evaluation domain error
    at any sample gets zero weight.  When nothing survives, the result is an
    explicit empty posterior, not an exception.
    """
    sigma = data.noise_sigma
    log_w = np.log(prior.weights)
    for i, h in enumerate(prior.hypotheses):
        vals = h(data.locations)
        if not np.all(np.isfinite(vals)):
            log_w[i] = -np.inf
            continue
        resid = vals - data.values
        if sigma == 0.0:
            if np.max(np.abs(resid)) > strict_tol:
                log_w[i] = -np.inf
        else:
            log_w[i] -= float(resid @ resid) / (2.0 * sigma * sigma)
    weights = _normalized(log_w)
    if weights is None:
        return Posterior(hypotheses=(), weights=np.array([]), noise_sigma=sigma)
    return Posterior(hypotheses=prior.hypotheses, weights=weights, noise_sigma=sigma)


def predict(post, p, merge_tol=1e-12):
    """Predictive distribution at a query point.

    Hypothesis values closer than ``merge_tol`` collapse into one atom, so a
    mirror-symmetric pair queried on its symmetry axis yields a point mass.
    """
    if post.is_empty:
        raise NoPredictionError("cannot predict from an empty posterior")
    p = np.asarray(p, dtype=float)
    values = np.array([float(h(p[None, :])[0]) for h in post.hypotheses])
    if not np.all(np.isfinite(values)):
        bad = ~np.isfinite(values)
        keep = ~bad
        if not keep.any():
            raise NoPredictionError("all hypotheses hit domain errors at the query")
        values = values[keep]
        weights = post.weights[keep]
        weights = weights / weights.sum()
    else:
        weights = post.weights
    mean = float(values @ weights)
    map_value = float(values[int(np.argmax(weights))])
    order = np.argsort(values, kind="stable")
    merged_v, merged_w = [], []
    for idx in order:
        v, w = float(values[idx]), float(weights[idx])
        if merged_v and abs(v - merged_v[-1]) <= merge_tol * max(1.0, abs(v)):
            merged_w[-1] += w
        else:
            merged_v.append(v)
            merged_w.append(w)
    return PredictiveDistribution(
        values=np.asarray(merged_v),
        weights=np.asarray(merged_w),
        mean=mean,
        map_value=map_value,
    )
