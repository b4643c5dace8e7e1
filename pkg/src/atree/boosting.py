"""Decision-stump weak learners and discrete Adaboost strong classifiers.

A trained BoostedClassifier is immutable and safe for concurrent scoring;
training touches only its private weight array.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

# Candidates whose fast-scan error lands within this slack of the minimum are
# re-scored with the direct weighted sum before the winner is picked, so the
# reported error and tie-breaking are independent of cumulative-sum rounding.
_TIE_SLACK = 1e-9


@dataclass(frozen=True)
class DecisionStump:
    """Single-feature threshold test: +1 when polarity*(x[f] - t) > 0, else -1."""

    feature_index: int
    threshold: float
    polarity: int

    def predict(self, x):
        return 1 if self.polarity * (x[self.feature_index] - self.threshold) > 0 else -1

    def predict_batch(self, X):
        s = self.polarity * (X[:, self.feature_index] - self.threshold)
        return np.where(s > 0, 1, -1).astype(np.int64)


@dataclass
class BoostConfig:
    """Knobs for adaboost_train.

    max_rounds: cap on retained rounds.
    gamma: a round whose weighted error exceeds gamma is discarded and
        training stops (early exit).
    min_weight_floor: a round error below this counts as perfect; its vote is
        capped at 0.5*ln((1-floor)/floor) to keep scores finite.
    """

    max_rounds: int = 50
    gamma: float = 0.48
    min_weight_floor: float = 1e-10

    def __post_init__(self):
        if self.max_rounds < 1:
            raise ValidationError("max_rounds must be positive")
        if not 0.0 < self.gamma <= 0.5:
            raise ValidationError("gamma must lie in (0, 0.5]")
        if self.min_weight_floor <= 0:
            raise ValidationError("min_weight_floor must be positive")


@dataclass
class BoostedClassifier:
    """Weighted stump ensemble; score is the alpha-weighted vote sum."""

    rounds: list = field(default_factory=list)      # [(alpha, DecisionStump)]
    round_errors: list = field(default_factory=list)
    exited_early: bool = False
    pure: bool = False

    def max_feature_index(self):
        return max((s.feature_index for _, s in self.rounds), default=-1)


def _validate_binary_labels(y):
    values = set(np.unique(y).tolist())
    if not values <= {-1, 1}:
        raise ValidationError(f"labels must be in {{+1, -1}}, found {sorted(values)}")
    return values


def _candidate_errors(values, y, w):
    """Errors of every (threshold, polarity) candidate for one feature.

    Returns (thresholds, err_plus, err_minus) where index 0 is the
    below-minimum threshold and the rest are midpoints between consecutive
    distinct sorted values, in ascending order.
    """
    order = np.argsort(values, kind="stable")
    xs = values[order]
    ws = w[order]
    wpos = np.where(y[order] > 0, ws, 0.0)
    wneg = np.where(y[order] > 0, 0.0, ws)
    cum_pos = np.cumsum(wpos)
    cum_neg = np.cumsum(wneg)
    total_pos = cum_pos[-1]
    total_neg = cum_neg[-1]
    cuts = np.flatnonzero(np.diff(xs) != 0)
    thresholds = np.concatenate(([xs[0] - 1.0], (xs[cuts] + xs[cuts + 1]) / 2.0))
    # polarity +1 predicts -1 left of the threshold, +1 right of it
    err_plus = np.concatenate(([total_neg], cum_pos[cuts] + (total_neg - cum_neg[cuts])))
    err_minus = np.concatenate(([total_pos], cum_neg[cuts] + (total_pos - cum_pos[cuts])))
    return thresholds, err_plus, err_minus


def train_stump(X, y, w):
    """Exhaustive weighted-error-minimizing stump.

    Searches every feature, every midpoint between consecutive distinct
    values plus one threshold below the minimum, and both polarities.
    Ties break to the lowest feature index, then the lowest threshold, then
    polarity +1. Returns (stump, weighted_error).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    n, d = X.shape
    per_feature = []
    best = math.inf
    for f in range(d):
        thresholds, err_plus, err_minus = _candidate_errors(X[:, f], y, w)
        per_feature.append((thresholds, err_plus, err_minus))
        m = min(err_plus.min(), err_minus.min())
        if m < best:
            best = m
    cut = best + _TIE_SLACK
    best_err = math.inf
    best_stump = None
    for f in range(d):
        thresholds, err_plus, err_minus = per_feature[f]
        # ravel of (T, 2) walks candidates threshold-ascending, +1 before -1
        flat = np.column_stack([err_plus, err_minus]).ravel()
        for idx in np.flatnonzero(flat <= cut):
            t = float(thresholds[idx // 2])
            pol = 1 if idx % 2 == 0 else -1
            stump = DecisionStump(f, t, pol)
            err = float(w[stump.predict_batch(X) != y].sum())
            if err < best_err:
                best_err = err
                best_stump = stump
    return best_stump, best_err


def adaboost_train(X, y, w, config):
    """Discrete Adaboost over decision stumps.

    Per retained round: error eps, vote alpha = 0.5*ln((1-eps)/eps),
    multiplicative re-weighting (mistakes up, correct down), renormalize.
    Stops at max_rounds, on a perfect stump (eps below the floor, capped
    alpha), or the first time eps exceeds gamma (round discarded,
    exited_early set).
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    w = np.asarray(w, dtype=np.float64)
    values = _validate_binary_labels(y)
    total = w.sum()
    if total <= 0:
        raise ValidationError("weights must have positive total mass")
    w = w / total
    model = BoostedClassifier()
    if len(values) == 1:
        stump, err = train_stump(X, y, w)
        floor = config.min_weight_floor
        model.rounds.append((0.5 * math.log((1.0 - floor) / floor), stump))
        model.round_errors.append(err)
        model.pure = True
        return model
    for _ in range(config.max_rounds):
        stump, eps = train_stump(X, y, w)
        if eps > config.gamma:
            model.exited_early = True
            break
        model.round_errors.append(eps)
        if eps < config.min_weight_floor:
            floor = config.min_weight_floor
            model.rounds.append((0.5 * math.log((1.0 - floor) / floor), stump))
            break
        alpha = 0.5 * math.log((1.0 - eps) / eps)
        model.rounds.append((alpha, stump))
        w = w * np.exp(-alpha * y * stump.predict_batch(X))
        w = w / w.sum()
    return model


def _check_dimension(model, dim):
    need = model.max_feature_index() + 1
    if dim < need:
        raise ValidationError(f"input has {dim} feature(s), model expects at least {need}")


def strong_score(model, x):
    """Alpha-weighted vote sum H(x); an empty model scores 0."""
    x = np.asarray(x, dtype=np.float64)
    _check_dimension(model, x.shape[0])
    return float(sum(alpha * stump.predict(x) for alpha, stump in model.rounds))


def strong_score_batch(model, X):
    X = np.asarray(X, dtype=np.float64)
    _check_dimension(model, X.shape[1])
    h = np.zeros(X.shape[0])
    for alpha, stump in model.rounds:
        h += alpha * stump.predict_batch(X)
    return h


# Logistic outputs are clamped inside (0, 1): downstream routing thresholds
# compare probabilities against a delta that may equal 1 exactly.
_PROB_CLAMP = 1e-15


def _logistic(h):
    if h >= 0:
        p = 1.0 / (1.0 + math.exp(-h))
    else:
        e = math.exp(h)
        p = e / (1.0 + e)
    return min(max(p, _PROB_CLAMP), 1.0 - _PROB_CLAMP)


def prob_positive(model, x):
    """Logistic partition probability 1/(1 + exp(-H(x))), clamped into (0, 1)."""
    return _logistic(strong_score(model, x))


def prob_negative(model, x):
    return 1.0 - prob_positive(model, x)


def prob_positive_batch(model, X):
    h = strong_score_batch(model, X)
    p = np.empty_like(h)
    pos = h >= 0
    p[pos] = 1.0 / (1.0 + np.exp(-h[pos]))
    e = np.exp(h[~pos])
    p[~pos] = e / (1.0 + e)
    return np.clip(p, _PROB_CLAMP, 1.0 - _PROB_CLAMP)


def error_bound(model):
    """Multiplicative training-error bound: prod over rounds of 2*sqrt(eps*(1-eps)).

    Diagnostic only; requires at least one recorded round.
    """
    if not model.round_errors:
        raise ValidationError("error_bound needs at least one recorded round")
    eps = np.asarray(model.round_errors, dtype=np.float64)
    return float(np.prod(2.0 * np.sqrt(eps * (1.0 - eps))))
