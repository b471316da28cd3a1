"""Seeded random streams and the sphere/ball samplers.

Every random draw in the package goes through a :class:`numpy.random.Generator`
backed by Philox, a counter-based bit generator. A ``(seed, stream)`` pair
identifies a generator; parallel work item ``i`` uses ``stream=i`` so results
do not depend on how work is scheduled.

Normals come from numpy's ziggurat sampler (``Generator.standard_normal``).
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngSeed:
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def generator(self):
        return make_rng(self.seed, self.stream)

    def child(self, index):
        """Seed of the ``index``-th sub-stream below this one."""
        return RngSeed(self.seed, _mix(self.stream, index))


def _mix(stream, index):
    # distinct (stream, index) pairs map to distinct 64-bit streams w.h.p.
    ss = np.random.SeedSequence(entropy=stream, spawn_key=(index,))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed=0, stream=0):
    """Generator for sub-stream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def as_rng(rng):
    """Accept a Generator, an :class:`RngSeed`, an int seed or None (seed 0)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngSeed):
        return rng.generator()
    if rng is None:
        return make_rng(0)
    return make_rng(int(rng))


def _check_dim(d):
    if int(d) < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    return int(d)


def sample_gaussian_vector(d, rng, size=None):
    """``d`` independent N(0, 1) coordinates (``size`` rows of them if given)."""
    d = _check_dim(d)
    rng = as_rng(rng)
    shape = (d,) if size is None else (size, d)
    return rng.standard_normal(shape)


def sample_unit_sphere(d, rng, size=None):
    """Uniform direction(s) on the unit sphere in ``R^d``.

    Normalized Gaussian vectors; an all-zero draw (probability zero) is
    redrawn rather than divided by.
    """
    d = _check_dim(d)
    rng = as_rng(rng)
    n = 1 if size is None else int(size)
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1)
    bad = norms == 0.0
    while np.any(bad):
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms[bad] = np.linalg.norm(g[bad], axis=1)
        bad = norms == 0.0
    u = g / norms[:, None]
    return u[0] if size is None else u


def sample_unit_ball(d, rng, size=None):
    """Uniform point(s) in the unit ball: a sphere direction at radius ``u**(1/d)``."""
    d = _check_dim(d)
    rng = as_rng(rng)
    n = 1 if size is None else int(size)
    u = sample_unit_sphere(d, rng, size=n)
    r = rng.random(n) ** (1.0 / d)
    x = u * r[:, None]
    return x[0] if size is None else x
