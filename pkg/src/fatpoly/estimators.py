"""scikit-learn style classifiers wrapping the polytope learners."""
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .experiments import heuristic_learn
from .geometry import BALL_TOL, polytope_min_value
from .learner import LearnerConfig, build_candidates, enumerate_t_polytope, greedy_polytope
from .sampling import make_rng

ALGOS = ("greedy", "enumerate")


class _PolytopeBase(ClassifierMixin, BaseEstimator):
    """Shared label handling: the larger of two labels is the inside class."""

    def _encode(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = unique_labels(y)
        if self.classes_.size > 2:
            raise ValueError(f"binary labels required, got {self.classes_.size} classes")
        if self.classes_.size == 2:
            self._labels = (self.classes_[0], self.classes_[1])
        elif self.classes_[0] in (1, -1):
            self._labels = (-1, 1)
        else:
            raise ValueError("a single-class sample must use labels +1 or -1")
        signs = np.where(y == self._labels[1], 1, -1)
        norms = np.linalg.norm(X, axis=1)
        if np.any(norms > 1.0 + BALL_TOL):
            raise ValueError(f"points must lie in the unit ball (max norm {norms.max():.6g})")
        self.n_features_in_ = X.shape[1]
        return X, signs

    def decision_function(self, X):
        """Min-value of each row: positive inside the learned polytope."""
        check_is_fitted(self, "polytope_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return np.atleast_1d(polytope_min_value(self.polytope_, X))

    def predict(self, X):
        return np.where(self.decision_function(X) >= 0, self._labels[1], self._labels[0])

    @property
    def n_halfspaces_(self):
        check_is_fitted(self, "polytope_")
        return len(self.polytope_)


class PolytopeClassifier(_PolytopeBase):
    """Gamma-fat polytope learned from mirror candidates.

    Parameters
    ----------
    gamma : float in (0, 1)
        Margin the training sample is assumed to have.
    algo : {'greedy', 'enumerate'}
    t : int, optional
        Number of halfspaces; required by ``'enumerate'``, a hint for the
        greedy iteration cap otherwise.
    candidate_budget : int, optional
        Number of random net directions; None sizes the net from its radius.
    jl_dim : 'auto', None or int
    delta_net : float, optional
        Net radius; defaults to ``gamma / 12``.
    random_state : int
    """

    def __init__(self, gamma=0.1, algo="greedy", t=None, candidate_budget=None,
                 jl_dim="auto", delta_net=None, random_state=0):
        self.gamma = gamma
        self.algo = algo
        self.t = t
        self.candidate_budget = candidate_budget
        self.jl_dim = jl_dim
        self.delta_net = delta_net
        self.random_state = random_state

    def fit(self, X, y):
        if self.algo not in ALGOS:
            raise ValueError(f"algo must be one of {ALGOS}, got {self.algo!r}")
        if self.algo == "enumerate" and not self.t:
            raise ValueError("algo='enumerate' needs t")
        X, s = self._encode(X, y)
        cfg = LearnerConfig(gamma=self.gamma, t_hint=self.t, delta_net=self.delta_net,
                            candidate_budget=self.candidate_budget, jl_dim=self.jl_dim,
                            seed=int(self.random_state or 0))
        self.candidates_ = build_candidates(X, s, cfg)
        if self.algo == "greedy":
            self.polytope_ = greedy_polytope(X, s, self.gamma, self.candidates_,
                                             iteration_cap=cfg.iteration_cap(X.shape[0]))
        else:
            self.polytope_ = enumerate_t_polytope(X, s, self.gamma, self.t, self.candidates_)
        return self


class HeuristicPolytopeClassifier(_PolytopeBase):
    """Polytope from the random-direction greedy heuristic (consistent at margin 0).

    Parameters
    ----------
    M : int
        Directions drawn per round.
    random_state : int
    """

    def __init__(self, M=10_000, random_state=0):
        self.M = M
        self.random_state = random_state

    def fit(self, X, y):
        if int(self.M) < 1:
            raise ValueError("M must be >= 1")
        X, s = self._encode(X, y)
        self.polytope_ = heuristic_learn(X, s, int(self.M), make_rng(int(self.random_state or 0), 0))
        return self
