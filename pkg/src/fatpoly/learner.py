"""Learning gamma-fat polytopes from labeled samples.

Pipeline: project the sample with a JL map, lay a delta-net of directions and
a grid of offsets over the projected space, and for every (direction, offset)
pair recover a full-dimensional "mirror" halfspace with the margin
Perceptron. A consistent polytope is then assembled from mirrors, either by
exhaustive search over t-subsets or by a greedy cover of the negatives.

When the JL target dimension is not smaller than the input dimension the
projection is skipped and directions live in the input space. In that case
the pair ``(v, b')`` already separates its own induced sample with room to
spare, so the warm-started Perceptron stops without an update and the mirror
is ``(v, b')`` itself. The stopping rule is still evaluated for every pair
and any pair that fails it goes through the Perceptron.
"""
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import pac_sample_size
from .exceptions import CombinatorialBlowup, LearningFailure, PerceptronFailure
from .geometry import Hyperplane, Polytope, is_consistent
from .jl import apply, make_jl, required_dim
from .net import build_net
from .perceptron import PerceptronConfig, margin_perceptron
from .sampling import make_rng

DEDUP_TOL = 1e-6
ENUMERATION_CAP = 10**7
_CHUNK = 1 << 16
_DIR_CHUNK = 64


@dataclass(frozen=True)
class LearnerConfig:
    """Parameters of the candidate pipeline.

    Derived quantities default to the fractions of ``gamma`` used by the
    analysis (JL distortion ``gamma/24``, net radius ``gamma/12``, offset step
    ``gamma/12``, mirror threshold ``3 gamma/4``) and can be overridden.

    ``candidate_budget`` is the number of random directions drawn for the
    net. ``jl_dim`` may be ``'auto'`` (project only when it reduces the
    dimension), ``None`` (never project) or an explicit target dimension.
    """

    gamma: float
    t_hint: int = None
    eps_jl: float = None
    delta_net: float = None
    offset_step: float = None
    mirror_threshold: float = None
    greedy_iteration_cap: int = None
    candidate_budget: int = None
    jl_dim: object = "auto"
    perceptron_max_updates: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.gamma < 1:
            raise ValueError(f"gamma must lie in (0, 1), got {self.gamma}")
        g = self.gamma
        for name, default in (("eps_jl", g / 24), ("delta_net", g / 12),
                              ("offset_step", g / 12), ("mirror_threshold", 3 * g / 4)):
            if getattr(self, name) is None:
                object.__setattr__(self, name, default)

    def iteration_cap(self, n):
        if self.greedy_iteration_cap is not None:
            return int(self.greedy_iteration_cap)
        ln = math.log(max(n, 2))
        if self.t_hint:
            return max(64, math.ceil(3 * self.t_hint * ln))
        return 8 * math.ceil(ln**2)

    def offsets(self):
        """Symmetric grid ``{step * i : |step * i| <= 1 + gamma}``."""
        imax = math.floor((1.0 + self.gamma) / self.offset_step + 1e-9)
        return self.offset_step * np.arange(-imax, imax + 1)


@dataclass(frozen=True, eq=False)
class CandidateSet:
    """Mirror halfspaces as arrays, in generation order.

    ``W`` has unit rows; ``net_index`` and ``offset`` record the
    (direction, grid offset) pair each mirror was recovered from.
    """

    W: np.ndarray
    b: np.ndarray
    net_index: np.ndarray
    offset: np.ndarray
    net_size: int = 0
    grid_size: int = 0
    projected_dim: int = 0
    jl_used: bool = False
    perceptron_calls: int = 0
    normal_id: np.ndarray = None
    _mirrors: list = field(default=None, repr=False)

    def __len__(self):
        return self.W.shape[0]

    @property
    def dim(self):
        return self.W.shape[1]

    @property
    def group_ids(self):
        """Ids shared by candidates with the same normal (one per row if unknown)."""
        if self.normal_id is None:
            return np.arange(len(self))
        return self.normal_id

    def hyperplane(self, i):
        return Hyperplane(self.W[i], self.b[i])

    @property
    def mirrors(self):
        if self._mirrors is None:
            object.__setattr__(self, "_mirrors", [self.hyperplane(i) for i in range(len(self))])
        return self._mirrors

    @classmethod
    def from_hyperplanes(cls, hyperplanes, dim=None):
        hyperplanes = list(hyperplanes)
        if hyperplanes:
            W = np.vstack([h.normal for h in hyperplanes])
            b = np.array([h.offset for h in hyperplanes])
        else:
            W, b = np.zeros((0, dim or 0)), np.zeros(0)
        idx = np.arange(len(hyperplanes))
        return cls(W, b, idx, np.full(len(hyperplanes), np.nan))


def _check_sample(X, y):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).ravel().astype(int)
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y have different lengths")
    if not np.all(np.isin(y, (-1, 1))):
        raise ValueError("labels must be +1 or -1")
    return X, y


def _dedup(W, b, tol=DEDUP_TOL):
    """Indices of the first occurrence of each mirror, rounding ``(w, b)`` to ``tol``."""
    if W.shape[0] == 0:
        return np.zeros(0, dtype=int)
    key = np.ascontiguousarray(np.round(np.hstack([W, b[:, None]]) / tol).astype(np.int64))
    view = key.view(np.dtype((np.void, key.dtype.itemsize * key.shape[1]))).ravel()
    _, first = np.unique(view, return_index=True)
    return np.sort(first)


def build_candidates(X, y, config):
    """Mirror halfspaces for every (net direction, grid offset) pair.

    Parameters
    ----------
    X : array of shape (n, d)
        Points in the unit ball.
    y : array of shape (n,)
        Labels in {+1, -1}.
    config : LearnerConfig

    Returns
    -------
    CandidateSet
        Possibly empty. Mirrors closer than ``1e-6`` in ``(w, b)`` are merged.
    """
    X, y = _check_sample(X, y)
    n, d = X.shape
    if n == 0:
        raise ValueError("need a nonempty sample")
    g = config.gamma

    m = n + (config.t_hint or n)
    k = required_dim(max(m, 2), config.eps_jl)
    if config.jl_dim is None or (config.jl_dim == "auto" and k >= d):
        FX, k, jl_used = X, d, False
    else:
        if config.jl_dim != "auto":
            k = int(config.jl_dim)
        FX, jl_used = apply(make_jl(d, k, make_rng(config.seed, 0)), X), True

    net = build_net(k, config.delta_net, make_rng(config.seed, 1), budget=config.candidate_budget)
    B = config.offsets()
    thr = config.mirror_threshold
    pcfg = PerceptronConfig(target_margin=g / 4, max_updates=config.perceptron_max_updates)
    tau = pcfg.target_margin / 2.0
    lift_norm = np.sqrt(1.0 + B**2)

    W_out, b_out, net_out, off_out = [], [], [], []
    calls = 0
    cache = {}
    proj = FX @ net.dirs.T
    for j0 in range(0, len(net), _DIR_CHUNK):
        J = np.arange(j0, min(j0 + _DIR_CHUNK, len(net)))
        pj = proj[:, J]
        # S' is nonempty iff some point clears the threshold on either side
        nonempty = ((pj.max(axis=0)[:, None] + B[None, :] >= thr)
                    | (pj.min(axis=0)[:, None] + B[None, :] <= -thr))
        if jl_used:
            settled = np.zeros_like(nonempty)
        else:
            # every point of S' has y (v . x + b') >= thr, so the warm start
            # (v, b') meets the Perceptron's stopping rule iff thr > tau ||(v, b')||
            settled = nonempty & (thr > tau * lift_norm)[None, :]
            jj, cc = np.nonzero(settled)
            W_out.append(net.dirs[J[jj]])
            b_out.append(B[cc])
            net_out.append(J[jj])
            off_out.append(B[cc])
        for jj, cc in zip(*np.nonzero(nonempty & ~settled)):
            j = J[jj]
            v = pj[:, jj] + B[cc]
            mask = np.abs(v) >= thr
            lab = np.where(v[mask] > 0, 1.0, -1.0)
            init = None if jl_used else np.append(net.dirs[j], B[cc])
            key = (mask.tobytes(), lab.tobytes(), None if init is None else init.tobytes())
            if key not in cache:
                calls += 1
                try:
                    h = margin_perceptron(X[mask], lab, pcfg, init=init).hyperplane
                except PerceptronFailure:
                    h = None
                cache[key] = h
            h = cache[key]
            if h is None:
                continue
            W_out.append(h.normal[None, :])
            b_out.append(np.array([h.offset]))
            net_out.append(np.array([j]))
            off_out.append(np.array([B[cc]]))

    if W_out:
        W = np.vstack(W_out)
        b = np.concatenate(b_out)
        net_idx = np.concatenate(net_out).astype(int)
        off = np.concatenate(off_out)
        order = np.lexsort((off, net_idx))
        W, b, net_idx, off = W[order], b[order], net_idx[order], off[order]
        if calls:
            first = _dedup(W, b)
            W, b, net_idx, off = W[first], b[first], net_idx[first], off[first]
    else:
        W, b = np.zeros((0, d)), np.zeros(0)
        net_idx, off = np.zeros(0, dtype=int), np.zeros(0)
    normal_id = net_idx.copy() if not calls else _normal_groups(W)
    return CandidateSet(np.ascontiguousarray(W), b, net_idx, off, normal_id=normal_id,
                        net_size=len(net), grid_size=B.size, projected_dim=k,
                        jl_used=jl_used, perceptron_calls=calls)


def _normal_groups(W):
    """Group id per row, equal ids for bit-identical normals."""
    if W.shape[0] == 0:
        return np.zeros(0, dtype=int)
    key = np.ascontiguousarray(W)
    view = key.view(np.dtype((np.void, key.dtype.itemsize * key.shape[1]))).ravel()
    _, inv = np.unique(view, return_inverse=True)
    return inv.ravel()


def _cover_tables(X, y, C, margin, prune=False):
    """Positive-consistent candidates and their (negatives x candidates) cover table.

    Values are computed once per distinct normal. With ``prune``, a candidate
    is dropped when another one with the same normal, a smaller offset and a
    smaller index is also positive-consistent: it covers a superset of the
    negatives, so a lowest-index argmax never prefers the dropped one.
    """
    pos, neg = X[y == 1], X[y == -1]
    gid = C.group_ids
    G = int(gid.max()) + 1 if gid.size else 0
    first = np.full(G, -1)
    first[gid[::-1]] = np.arange(gid.size)[::-1]
    U = C.W[first] if G else np.zeros((0, X.shape[1]))
    if pos.shape[0]:
        min_pos = np.full(G, np.inf)
        for s in range(0, G, _CHUNK):
            min_pos[s:s + _CHUNK] = (pos @ U[s:s + _CHUNK].T).min(axis=0)
        pos_ok = min_pos[gid] + C.b >= margin
    else:
        pos_ok = np.ones(len(C), dtype=bool)
    idx = np.flatnonzero(pos_ok)
    if prune and idx.size:
        order = np.lexsort((idx, C.b[idx], gid[idx]))
        g_sorted = gid[idx[order]]
        lead = np.ones(order.size, dtype=bool)
        lead[1:] = g_sorted[1:] != g_sorted[:-1]
        best = np.full(G, -1)
        best[g_sorted[lead]] = idx[order[lead]]
        idx = idx[idx <= best[gid[idx]]]
    neg_proj = neg @ U.T
    covers = np.empty((neg.shape[0], idx.size), dtype=bool)
    for s in range(0, idx.size, _CHUNK):
        sl = idx[s:s + _CHUNK]
        covers[:, s:s + _CHUNK] = neg_proj[:, gid[sl]] + C.b[sl] <= -margin
    return idx, covers


def greedy_polytope(X, y, gamma, candidates, iteration_cap=None):
    """Greedy cover of the negatives by positive-consistent mirrors.

    Each round keeps the mirror with value ``>= gamma/4`` on every positive
    that puts the most remaining negatives at value ``<= -gamma/4`` (lowest
    index on ties), then drops those negatives.

    Raises
    ------
    LearningFailure
        ``reason="no_progress"`` if the best mirror covers no remaining
        negative, ``reason="cap"`` if ``iteration_cap`` rounds did not suffice.
    """
    X, y = _check_sample(X, y)
    d = X.shape[1]
    margin = gamma / 4.0
    n_neg = int(np.sum(y == -1))
    if n_neg == 0:
        return Polytope([], dim=d)
    cap = iteration_cap if iteration_cap is not None else 8 * math.ceil(math.log(max(len(y), 2)) ** 2)
    idx, covers = _cover_tables(X, y, candidates, margin, prune=True)
    remaining = np.ones(n_neg, dtype=bool)
    chosen = []
    while remaining.any():
        if len(chosen) >= cap:
            raise LearningFailure("cap", f"{remaining.sum()} negatives left after {cap} rounds")
        if idx.size == 0:
            raise LearningFailure("no_progress", "no mirror is consistent with the positives")
        counts = covers[remaining].sum(axis=0)
        best = int(np.argmax(counts))
        if counts[best] == 0:
            raise LearningFailure("no_progress",
                                  f"no mirror separates any of {remaining.sum()} remaining negatives")
        chosen.append(idx[best])
        remaining &= ~covers[:, best]
    P = Polytope([candidates.hyperplane(i) for i in chosen], dim=d)
    assert is_consistent(P, margin, X, y), "greedy output failed its own consistency check"
    return P


def enumerate_t_polytope(X, y, gamma, t, candidates, cap=ENUMERATION_CAP):
    """First t-subset of mirrors (lexicographic) forming a gamma/4-consistent polytope.

    Raises
    ------
    CombinatorialBlowup
        If ``C(len(candidates), t)`` exceeds ``cap``.
    LearningFailure
        ``reason="not_found"`` when no subset is consistent.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    X, y = _check_sample(X, y)
    d = X.shape[1]
    total = math.comb(len(candidates), t)
    if total > cap:
        raise CombinatorialBlowup(f"C({len(candidates)}, {t}) = {total} subsets exceeds cap {cap}")
    margin = gamma / 4.0
    idx, covers = _cover_tables(X, y, candidates, margin)
    n_neg = covers.shape[0]
    full = (1 << n_neg) - 1
    bits = [sum(1 << int(i) for i in np.flatnonzero(col)) for col in covers.T]
    for combo in itertools.combinations(range(idx.size), t):
        acc = 0
        for c in combo:
            acc |= bits[c]
        if acc == full:
            P = Polytope([candidates.hyperplane(idx[c]) for c in combo], dim=d)
            assert is_consistent(P, margin, X, y)
            return P
    raise LearningFailure("not_found", f"no {t} mirrors form a consistent polytope")


def learn_pac(t, gamma, eps, delta, sampler, config=None, rng=None):
    """Draw ``pac_sample_size(t, gamma, eps, delta)`` examples and fit the greedy learner.

    ``sampler(m, rng)`` must return ``(X, y)``. Returns ``(polytope, m)``.
    """
    config = config or LearnerConfig(gamma=gamma, t_hint=t)
    m = pac_sample_size(t, gamma, eps, delta)
    X, y = sampler(m, rng if rng is not None else make_rng(config.seed, 2))
    C = build_candidates(X, y, config)
    P = greedy_polytope(X, y, gamma, C, iteration_cap=config.iteration_cap(m))
    return P, m
