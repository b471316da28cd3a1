"""Dense Gaussian Johnson-Lindenstrauss maps.

The matrix has i.i.d. N(0, 1/k) entries so ``E ||f(x)||^2 = ||x||^2``.
``required_dim`` uses ``k = ceil(C ln(n) / eps^2)`` with ``C = 8``.
"""
import json
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DimensionMismatch
from .sampling import as_rng

JL_CONSTANT = 8.0


@dataclass(frozen=True, eq=False)
class JlMap:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise ValueError("JL matrix must be a nonempty 2-d array")
        if not np.all(np.isfinite(m)):
            raise ValueError("JL matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def target_dim(self):
        return self.matrix.shape[0]

    @property
    def source_dim(self):
        return self.matrix.shape[1]

    def __call__(self, x):
        return apply(self, x)

    def to_json(self):
        return json.dumps({"k": self.target_dim, "d": self.source_dim,
                           "m": self.matrix.tolist()})

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        m = np.asarray(data["m"], dtype=float).reshape(data["k"], data["d"])
        return cls(m)


def required_dim(n, eps, constant=JL_CONSTANT):
    """Target dimension ``ceil(C ln n / eps^2)`` (at least 1) for ``n`` vectors."""
    if not 0 < eps < 1:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if n < 2:
        raise ValueError(f"need at least 2 vectors, got {n}")
    return max(1, math.ceil(constant * math.log(n) / eps**2))


def make_jl(d, k, rng):
    if d < 1 or k < 1:
        raise ValueError("source and target dimensions must be >= 1")
    rng = as_rng(rng)
    return JlMap(rng.standard_normal((k, d)) / math.sqrt(k))


def apply(f, x):
    """Image of ``x`` (shape ``(d,)`` or ``(n, d)``) under ``f``."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != f.source_dim:
        raise DimensionMismatch(f"JL map expects dim {f.source_dim}, got {x.shape[-1]}")
    return x @ f.matrix.T


def check_dot_products(f, S, T, eps):
    """Fraction of pairs ``(x, t)`` with ``|f(t).f(x) - t.x| > eps``."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    T = np.asarray(T, dtype=float)
    if T.size == 0 or S.size == 0:
        return 0.0
    T = np.atleast_2d(T)
    err = np.abs(apply(f, S) @ apply(f, T).T - S @ T.T)
    return float(np.mean(err > eps))


class JLProjection(TransformerMixin, BaseEstimator):
    """Gaussian random projection as a scikit-learn transformer.

    Parameters
    ----------
    eps : float
        Distortion used to size the projection when ``n_components='auto'``.
    n_components : int or 'auto'
    random_state : int, RngSeed or Generator, optional
    """

    def __init__(self, eps=0.2, n_components="auto", random_state=None):
        self.eps = eps
        self.n_components = n_components
        self.random_state = random_state

    def fit(self, X, y=None):
        X = check_array(X)
        if self.n_components == "auto":
            k = required_dim(max(X.shape[0], 2), self.eps)
        else:
            k = int(self.n_components)
        self.map_ = make_jl(X.shape[1], k, self.random_state)
        self.n_features_in_ = X.shape[1]
        self.n_components_ = k
        return self

    def transform(self, X):
        check_is_fitted(self, "map_")
        X = check_array(X)
        return apply(self.map_, X)
