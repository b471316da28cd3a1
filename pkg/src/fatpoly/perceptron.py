"""Margin Perceptron for affine and homogeneous halfspaces.

Affine data is lifted to ``(x, 1)`` and a homogeneous weight vector ``v`` is
learned; the point at position ``i`` triggers an update whenever
``y_i v . x_i <= (target_margin / 2) * ||v||``. Points are visited cyclically
in input order, so the output is a deterministic function of the input.
"""
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import PerceptronFailure
from .geometry import Hyperplane

DEFAULT_MAX_UPDATES = 100_000


@dataclass(frozen=True)
class PerceptronConfig:
    target_margin: float = 0.0
    max_updates: int = DEFAULT_MAX_UPDATES
    homogenize: bool = True

    def __post_init__(self):
        if self.target_margin < 0:
            raise ValueError("target_margin must be >= 0")
        if self.max_updates < 1:
            raise ValueError("max_updates must be >= 1")


@dataclass(frozen=True, eq=False)
class PerceptronResult:
    hyperplane: Hyperplane
    weights: np.ndarray
    updates: int


def perceptron_update_bound(planted_margin, target_margin):
    """Worst-case update count on data in the unit ball.

    Assumes the data are separated by a unit-normal ``(w*, b*)`` with
    ``|b*| <= 1`` at margin ``planted_margin > target_margin``. In the lifted
    space the radius is ``sqrt(2)`` and the normalized margin at least
    ``planted_margin / sqrt(2)``; with ``g = planted_margin - target_margin``
    and threshold ``tau = target_margin / 2`` the norm-growth argument gives
    ``T <= 8/g^2 + (4 + 2 sqrt(2) tau)/g``.
    """
    g = planted_margin - target_margin
    if g <= 0:
        raise ValueError("planted margin must exceed the target margin")
    tau = target_margin / 2.0
    return math.ceil(8.0 / g**2 + (4.0 + 2.0 * math.sqrt(2.0) * tau) / g)


def margin_perceptron(X, y, config=None, init=None):
    """Find a halfspace putting every ``(x_i, y_i)`` on its labeled side.

    Parameters
    ----------
    X : array of shape (n, d)
    y : array of shape (n,)
        Labels in {+1, -1}.
    config : PerceptronConfig, optional
    init : array, optional
        Starting weight vector in the (lifted) space; zeros by default.

    Returns
    -------
    PerceptronResult
        ``hyperplane`` has a unit normal. In the affine case
        ``y_i (w . x_i + b) > target_margin / 2`` for every point; in the
        homogeneous case the same holds with ``b = 0``.

    Raises
    ------
    PerceptronFailure
        If ``max_updates`` updates were made and some point still violates
        the threshold.
    """
    config = config or PerceptronConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y have different lengths")
    n = X.shape[0]
    Xa = np.hstack([X, np.ones((n, 1))]) if config.homogenize else X
    Z = Xa * y[:, None]
    v = np.zeros(Xa.shape[1]) if init is None else np.array(init, dtype=float)
    tau = config.target_margin / 2.0
    updates = 0
    pos = 0
    while True:
        viol = np.flatnonzero(Z @ v <= tau * np.linalg.norm(v))
        if viol.size == 0:
            break
        if updates >= config.max_updates:
            raise PerceptronFailure(updates)
        ahead = viol[viol >= pos]
        j = ahead[0] if ahead.size else viol[0]
        v += Z[j]
        updates += 1
        pos = j + 1 if j + 1 < n else 0

    if config.homogenize:
        w, b = v[:-1], v[-1]
    else:
        w, b = v, 0.0
    if not np.any(w):
        raise PerceptronFailure(updates, "learned a zero normal; no affine hyperplane")
    return PerceptronResult(Hyperplane(w, b), v, updates)
