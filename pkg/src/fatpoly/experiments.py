"""Synthetic polytope instances, the random-direction heuristic and the
halfspace-count benchmark across dimensions."""
import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import LearningFailure
from .geometry import Hyperplane, Polytope, polytope_min_value
from .sampling import as_rng, make_rng, sample_unit_ball, sample_unit_sphere

FIG3_HEADER = ("d", "mean_halfspaces", "std_halfspaces", "trials", "failures")
MAX_ATTEMPTS = 100


@dataclass(frozen=True)
class ExperimentConfig:
    dims: tuple = tuple(range(2, 21))
    n_points: int = 1000
    margin: float = 0.05
    offset_range: tuple = (0.05, 0.95)
    M: int = 10000
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        if not self.margin > 0:
            raise ValueError("margin must be positive")
        lo, hi = self.offset_range
        if not 0 < lo <= hi < 1:
            raise ValueError("offset_range must lie inside (0, 1)")
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))


def random_polytope(d, t, rng, offset_range=(0.05, 0.95)):
    """``t`` halfspaces ``w_j . x <= b_j`` with uniform directions, origin inside.

    Stored as ``Hyperplane(-w_j, b_j)`` so that inside means value ``>= 0``.
    """
    rng = as_rng(rng)
    W = sample_unit_sphere(d, rng, size=t)
    b = rng.uniform(offset_range[0], offset_range[1], size=t)
    return Polytope([Hyperplane(-w, c) for w, c in zip(W, b)], dim=d)


def label_by_margin(P, X, margin):
    """Labels +1/-1 for points at min-value ``>= margin`` / ``<= -margin``; band points dropped."""
    m = polytope_min_value(P, X)
    keep = np.abs(m) >= margin
    return X[keep], np.where(m[keep] > 0, 1, -1)


def generate_instance(d, config, rng):
    """Ball-uniform points labeled by a random ``d``-halfspace polytope.

    Returns ``(X, y, target)``. Points within ``config.margin`` of the target's
    boundary (in min-value) are discarded, so fewer than ``n_points`` may be
    returned.
    """
    if d < 2:
        raise ValueError("instances start at d = 2")
    rng = as_rng(rng)
    for _ in range(MAX_ATTEMPTS):
        X = sample_unit_ball(d, rng, size=config.n_points)
        P = random_polytope(d, d, rng, config.offset_range)
        Xk, y = label_by_margin(P, X, config.margin)
        if Xk.shape[0]:
            return Xk, y, P
    raise RuntimeError(f"every point fell in the margin band in {MAX_ATTEMPTS} attempts")


def planted_instance(d, t, gamma, n, rng, offset_range=(0.3, 0.7), require_both=True):
    """``n`` ball-uniform points at min-value distance ``>= gamma`` from a random t-polytope.

    Returns ``(X, y, target)``; the target is gamma-consistent on the sample.
    """
    rng = as_rng(rng)
    for _ in range(MAX_ATTEMPTS):
        P = random_polytope(d, t, rng, offset_range)
        X, y = _fill(P, gamma, n, d, rng)
        if not require_both or (np.any(y == 1) and np.any(y == -1)):
            return X, y, P
    raise RuntimeError("could not plant an instance with both labels")


def _fill(P, gamma, n, d, rng):
    xs, ys, have = [], [], 0
    while have < n:
        Xk, y = label_by_margin(P, sample_unit_ball(d, rng, size=max(2 * n, 256)), gamma)
        xs.append(Xk)
        ys.append(y)
        have += Xk.shape[0]
    return np.vstack(xs)[:n], np.concatenate(ys)[:n]


def planted_sampler(P, gamma):
    """Example source for ``learn_pac``: ball-uniform points outside the gamma band of ``P``."""
    def sample(m, rng):
        return _fill(P, gamma, m, P.dim, as_rng(rng))
    return sample


def _heuristic_round(pos, neg, M, rng):
    d = pos.shape[1] if pos.size else neg.shape[1]
    U = sample_unit_sphere(d, rng, size=M)
    # smallest offset keeping every positive inside (boundary allowed)
    b = (pos @ U.T).max(axis=0) if pos.shape[0] else np.zeros(M)
    counts = ((b[None, :] - neg @ U.T) < 0).sum(axis=0)
    best = int(np.argmax(counts))
    h = Hyperplane(-U[best], b[best])
    if pos.shape[0]:
        # absorb rounding so that positives evaluate to >= 0 exactly as stored
        low = h.value(pos).min()
        while low < 0:
            h = Hyperplane(h.normal, h.offset - low)
            low = h.value(pos).min()
    removed = h.value(neg) < 0
    return h, removed, int(removed.sum())


def heuristic_learn(X, y, M, rng):
    """Randomized greedy polytope from ``M`` random directions per round.

    Each round draws ``M`` directions ``w``, places each halfspace
    ``w . x <= b`` at the smallest ``b`` keeping all positives inside, and
    keeps the one with the most negatives strictly outside (lowest sample
    index on ties). A round that removes nothing is retried once with fresh
    directions before giving up.

    Returns
    -------
    Polytope
        Consistent at margin 0: positives have min-value >= 0, negatives < 0.

    Raises
    ------
    LearningFailure
        ``reason="no_progress"``.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).ravel()
    rng = as_rng(rng)
    d = X.shape[1]
    pos, neg = X[y == 1], X[y == -1]
    chosen = []
    while neg.shape[0]:
        h, removed, count = _heuristic_round(pos, neg, M, rng)
        if count == 0:
            h, removed, count = _heuristic_round(pos, neg, M, rng)
            if count == 0:
                raise LearningFailure("no_progress",
                                      f"{neg.shape[0]} negatives left after {len(chosen)} halfspaces")
        chosen.append(h)
        neg = neg[~removed]
    P = Polytope(chosen, dim=d)
    m = polytope_min_value(P, X) if len(chosen) else np.full(len(y), np.inf)
    assert np.all(m[y == 1] >= 0) and np.all(m[y == -1] < 0), "heuristic output inconsistent"
    return P


def evaluate(model, X, y, gamma=0.0):
    """Confusion-style counts of ``model`` on ``(X, y)``.

    ``true_pos``/``true_neg`` count points classified correctly at margin
    ``gamma``; ``margin_violations`` counts correctly signed points closer than
    ``gamma``; ``errors`` counts points misclassified at margin 0 (a point with
    min-value exactly 0 is predicted positive).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).ravel()
    m = np.atleast_1d(polytope_min_value(model, X)) if X.size else np.zeros(0)
    pred = np.where(m >= 0, 1, -1)
    correct = pred == y
    tp = int(np.sum((y == 1) & (m >= gamma)))
    tn = int(np.sum((y == -1) & (m <= -gamma)))
    return {
        "true_pos": tp,
        "true_neg": tn,
        "margin_violations": int(np.sum(correct)) - tp - tn,
        "errors": int(np.sum(~correct)),
        "n": int(y.size),
        "predicted_pos": int(np.sum(pred == 1)),
    }


def _fig3_trial(d, config, trial):
    rng = make_rng(config.seed, d * 1_000_003 + trial)
    X, y, _ = generate_instance(d, config, rng)
    try:
        P = heuristic_learn(X, y, config.M, rng)
    except LearningFailure:
        return None
    return len(P)


def run_fig3(config, n_jobs=1):
    """Halfspace counts of the heuristic per dimension.

    Every (dimension, trial) pair owns its random stream, so rows are
    identical for any ``n_jobs``. Returns a list of dicts keyed by
    :data:`FIG3_HEADER`; ``mean``/``std`` are NaN when a dimension had no
    successful trial.
    """
    tasks = [(d, i) for d in config.dims for i in range(config.trials)]
    if n_jobs == 1 or not tasks:
        results = [_fig3_trial(d, config, i) for d, i in tasks]
    else:
        from joblib import Parallel, delayed
        results = Parallel(n_jobs=n_jobs)(delayed(_fig3_trial)(d, config, i) for d, i in tasks)
    rows = []
    for d in config.dims:
        counts = [r for (dd, _), r in zip(tasks, results) if dd == d and r is not None]
        failures = sum(1 for (dd, _), r in zip(tasks, results) if dd == d and r is None)
        if config.trials == 0:
            continue
        rows.append({
            "d": d,
            "mean_halfspaces": float(np.mean(counts)) if counts else math.nan,
            "std_halfspaces": float(np.std(counts)) if counts else math.nan,
            "trials": config.trials,
            "failures": failures,
        })
    return rows


def fig3_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIG3_HEADER, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
