"""Points, hyperplanes and polytopes in H-representation.

A polytope is stored as ``t`` unit-normal halfspaces ``w_i . x + b_i >= 0``;
a point is inside iff the minimum of those values is nonnegative. An empty
list of halfspaces is legal and stands for the whole space.

All functions that take a point also accept a batch of shape ``(n, d)``
and then return one value per row.
"""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .exceptions import DimensionMismatch

UNIT_TOL = 1e-12
BALL_TOL = 1e-9


class RegionTag(Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    INNER_MARGIN = "inner_margin"
    OUTER_MARGIN = "outer_margin"
    INNER_ENVELOPE = "inner_envelope"
    OUTER_ENVELOPE = "outer_envelope"


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledPoint:
    coords: np.ndarray
    label: int

    def __post_init__(self):
        coords = _frozen(self.coords).ravel()
        if np.linalg.norm(coords) > 1.0 + BALL_TOL:
            raise ValueError("point lies outside the unit ball")
        if self.label not in (1, -1):
            raise ValueError(f"label must be +1 or -1, got {self.label!r}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "label", int(self.label))


def as_arrays(points):
    """Stack a sequence of :class:`LabeledPoint` into ``(X, y)`` arrays."""
    points = list(points)
    if not points:
        return np.zeros((0, 0)), np.zeros(0, dtype=int)
    X = np.vstack([p.coords for p in points])
    y = np.array([p.label for p in points], dtype=int)
    return X, y


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """Affine functional ``x -> normal . x + offset`` with a unit normal.

    Construction rescales ``(normal, offset)`` by ``1/||normal||`` so that the
    value of a point equals its signed Euclidean distance to the plane. A
    normal already within ``UNIT_TOL`` of unit length is kept bit-for-bit, so
    serialized models reload exactly.
    """

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        w = np.asarray(self.normal, dtype=float).ravel()
        norm = np.linalg.norm(w)
        if not np.isfinite(norm) or norm == 0.0:
            raise ValueError("hyperplane normal must be finite and nonzero")
        if abs(norm - 1.0) <= UNIT_TOL:
            norm = 1.0
        object.__setattr__(self, "normal", _frozen(w / norm))
        object.__setattr__(self, "offset", float(self.offset) / norm)

    def __eq__(self, other):
        if not isinstance(other, Hyperplane):
            return NotImplemented
        return self.offset == other.offset and np.array_equal(self.normal, other.normal)

    def __hash__(self):
        return hash((self.normal.tobytes(), self.offset))

    @property
    def dim(self):
        return self.normal.shape[0]

    def value(self, x):
        return hyperplane_value(self, x)

    def to_dict(self):
        return {"w": self.normal.tolist(), "b": self.offset}


@dataclass(frozen=True)
class Polytope:
    """Intersection of halfspaces ``{x : min_i w_i . x + b_i >= 0}``.

    Parameters
    ----------
    halfspaces : sequence of Hyperplane
        May be empty, in which case ``dim`` must be given.
    dim : int, optional
        Ambient dimension; inferred from the first halfspace when omitted.
    """

    halfspaces: tuple = ()
    dim: int = None
    W: np.ndarray = field(init=False, repr=False, compare=False)
    b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        hs = tuple(self.halfspaces)
        dim = self.dim
        if dim is None:
            if not hs:
                raise ValueError("an empty polytope needs an explicit dim")
            dim = hs[0].dim
        for h in hs:
            if h.dim != dim:
                raise DimensionMismatch(f"halfspace of dim {h.dim} in a {dim}-dim polytope")
        object.__setattr__(self, "halfspaces", hs)
        object.__setattr__(self, "dim", int(dim))
        if hs:
            W = np.vstack([h.normal for h in hs])
            b = np.array([h.offset for h in hs])
        else:
            W = np.zeros((0, dim))
            b = np.zeros(0)
        object.__setattr__(self, "W", _frozen(W))
        object.__setattr__(self, "b", _frozen(b))

    @classmethod
    def from_arrays(cls, W, b, dim=None):
        """Build from a ``(t, d)`` normal matrix and ``(t,)`` offsets (rows renormalized)."""
        W = np.atleast_2d(np.asarray(W, dtype=float))
        b = np.asarray(b, dtype=float).ravel()
        if dim is None and W.size == 0:
            raise ValueError("an empty polytope needs an explicit dim")
        if W.shape[0] != b.shape[0]:
            raise ValueError("W and b disagree on the number of halfspaces")
        hs = [Hyperplane(w, c) for w, c in zip(W, b)]
        return cls(hs, dim=dim if dim is not None else W.shape[1])

    @classmethod
    def cube(cls, d, half_width=1.0):
        """Axis-aligned cube ``[-half_width, half_width]^d`` as ``2d`` halfspaces."""
        eye = np.eye(d)
        return cls.from_arrays(np.vstack([-eye, eye]), np.full(2 * d, half_width))

    @property
    def n_halfspaces(self):
        return len(self.halfspaces)

    def __len__(self):
        return len(self.halfspaces)

    def values(self, x):
        """Per-halfspace values, shape ``(t,)`` or ``(n, t)``."""
        x = _check_points(x, self.dim)
        return x @ self.W.T + self.b

    def min_value(self, x):
        return polytope_min_value(self, x)

    def contains(self, x):
        return polytope_min_value(self, x) >= 0

    def shift(self, s):
        return shift(self, s)

    def to_dict(self, gamma=None):
        out = {"dim": self.dim}
        if gamma is not None:
            out["gamma"] = float(gamma)
        out["halfspaces"] = [h.to_dict() for h in self.halfspaces]
        return out

    @classmethod
    def from_dict(cls, data):
        hs = [Hyperplane(h["w"], h["b"]) for h in data["halfspaces"]]
        return cls(hs, dim=int(data["dim"]))


def _check_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim or x.ndim > 2:
        raise DimensionMismatch(f"expected points of dimension {dim}, got shape {x.shape}")
    return x


def hyperplane_value(h, x):
    """Signed distance ``w . x + b`` of ``x`` (or each row of ``x``) to ``h``."""
    x = _check_points(x, h.dim)
    out = x @ h.normal + h.offset
    return float(out) if np.ndim(out) == 0 else out


def polytope_min_value(P, x):
    """``min_i w_i . x + b_i``; ``+inf`` for the halfspace-free polytope."""
    x = _check_points(x, P.dim)
    if P.n_halfspaces == 0:
        out = np.full(x.shape[:-1], np.inf)
    else:
        out = (x @ P.W.T + P.b).min(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _check_gamma(gamma):
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")


def margin_region(P, gamma, x):
    """Classify ``x`` as inside, outside, or in the inner/outer gamma-margin.

    The margin bands are closed: a min-value of exactly ``+-gamma`` is in the
    margin. Returns a :class:`RegionTag` for a single point, or an object
    array of tags for a batch.
    """
    _check_gamma(gamma)
    m = polytope_min_value(P, x)
    tags = np.where(m > gamma, RegionTag.INSIDE,
           np.where(m >= 0, RegionTag.INNER_MARGIN,
           np.where(m >= -gamma, RegionTag.OUTER_MARGIN, RegionTag.OUTSIDE)))
    return tags.item() if np.ndim(m) == 0 else tags


def fat_classify(P, gamma, x, y):
    """Label of the pair ``(x, y)`` under the gamma-fat polytope concept.

    Points strictly inside the ambiguous band ``|min| < gamma`` get -1 whatever
    ``y`` is; a min-value of exactly ``+-gamma`` is confidently signed.
    """
    _check_gamma(gamma)
    m = np.asarray(polytope_min_value(P, x))
    y = np.asarray(y)
    agree = ((m >= gamma) & (y == 1)) | ((m <= -gamma) & (y == -1))
    out = np.where(agree, 1, -1)
    return int(out) if out.ndim == 0 else out


def is_consistent(P, gamma, X, y):
    """True iff positives have min-value ``>= gamma`` and negatives ``<= -gamma``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if X.size == 0:
        return True
    m = np.atleast_1d(polytope_min_value(P, X.reshape(-1, P.dim)))
    y = np.atleast_1d(y)
    return bool(np.all(m[y == 1] >= gamma) and np.all(m[y == -1] <= -gamma))


def shift(P, s):
    """Move every halfspace outward by ``s`` (inward for negative ``s``)."""
    hs = [Hyperplane(h.normal, h.offset + s) for h in P.halfspaces]
    return Polytope(hs, dim=P.dim)
