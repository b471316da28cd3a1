"""Randomized delta-nets of unit directions.

Uniform unit vectors are drawn and kept greedily, in draw order, whenever
they are farther than ``delta`` from everything kept so far. The kept set is
delta-separated by construction; coverage is checked by Monte-Carlo probes.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .exceptions import DimensionMismatch, NetOverflowError
from .sampling import as_rng, sample_unit_sphere

HARD_SAMPLE_LIMIT = 10**7
MIN_SAMPLES = 64
_BLOCK = 1 << 15


@dataclass(frozen=True, eq=False)
class DirectionNet:
    dirs: np.ndarray
    delta: float

    def __post_init__(self):
        dirs = np.array(self.dirs, dtype=float)
        if dirs.ndim != 2:
            raise ValueError("dirs must be a 2-d array")
        dirs.setflags(write=False)
        object.__setattr__(self, "dirs", dirs)

    @property
    def dim(self):
        return self.dirs.shape[1]

    def __len__(self):
        return self.dirs.shape[0]


def default_sample_count(k, delta):
    """``ceil((1 + 2/delta)^k * k * ln(3/delta))``, floored at ``MIN_SAMPLES``."""
    log_n = k * math.log1p(2.0 / delta) + math.log(k * math.log(3.0 / delta))
    if log_n > math.log(HARD_SAMPLE_LIMIT) + 1:
        return math.inf
    return max(MIN_SAMPLES, math.ceil(math.exp(log_n)))


def build_net(k, delta, rng, budget=None, hard_limit=HARD_SAMPLE_LIMIT):
    """Greedy delta-separated subset of random unit vectors in ``R^k``.

    Parameters
    ----------
    k : int
        Dimension.
    delta : float
        Separation/coverage radius in (0, 1).
    rng : Generator, RngSeed, int or None
    budget : int, optional
        Number of random samples; defaults to :func:`default_sample_count`.
    hard_limit : int
        Refuse to draw more samples than this.

    Returns
    -------
    DirectionNet

    Raises
    ------
    NetOverflowError
        When the sample count exceeds ``hard_limit``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if budget is not None and budget < 1:
        raise ValueError("budget must be a positive sample count")
    n = default_sample_count(k, delta) if budget is None else int(budget)
    if n > hard_limit:
        raise NetOverflowError(
            f"a delta={delta} net in {k} dims needs {n} samples (> {hard_limit}); "
            "raise delta, lower k or pass an explicit budget")
    rng = as_rng(rng)

    kept = np.zeros((0, k))
    drawn = 0
    block_size = 256
    while drawn < n:
        m = min(block_size, n - drawn)
        block_size = min(2 * block_size, _BLOCK)
        block = sample_unit_sphere(k, rng, size=m)
        drawn += m
        if len(kept):
            dist, _ = cKDTree(kept).query(block, k=1)
            block = block[dist > delta]
        new = np.empty_like(block)
        c = 0
        for u in block:
            if c and np.min(np.sum((new[:c] - u) ** 2, axis=1)) <= delta * delta:
                continue
            new[c] = u
            c += 1
        if c:
            kept = np.vstack([kept, new[:c]])
    net = DirectionNet(kept, delta)
    _assert_separated(net)
    return net


def _assert_separated(net):
    if len(net) < 2:
        return
    pairs = cKDTree(net.dirs).query_pairs(net.delta)
    if pairs:
        raise AssertionError(f"net is not {net.delta}-separated: {len(pairs)} close pairs")


def nearest_in_net(net, w):
    """``(index, distance)`` of the net direction closest to ``w``; lowest index on ties."""
    if len(net) == 0:
        raise ValueError("net is empty")
    w = np.asarray(w, dtype=float)
    if w.shape != (net.dim,):
        raise DimensionMismatch(f"expected a vector of dim {net.dim}, got shape {w.shape}")
    dist = np.linalg.norm(net.dirs - w, axis=1)
    i = int(np.argmin(dist))
    return i, float(dist[i])


def coverage_check(net, probes, rng=None, radius=None):
    """Fraction of probe directions farther than ``radius`` (default ``delta``) from the net.

    ``probes`` is either a count of uniform random unit vectors or an explicit
    ``(m, k)`` array of probe vectors.
    """
    radius = net.delta if radius is None else radius
    if np.ndim(probes) == 0:
        if int(probes) < 1:
            raise ValueError("need at least one probe")
        P = sample_unit_sphere(net.dim, as_rng(rng), size=int(probes))
    else:
        P = np.atleast_2d(np.asarray(probes, dtype=float))
    if len(net) == 0:
        return 1.0
    dist, _ = cKDTree(net.dirs).query(P, k=1)
    return float(np.mean(dist > radius))
