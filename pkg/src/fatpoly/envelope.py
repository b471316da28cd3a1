"""Nearest-point projection, envelopes vs. margins, expanding polytopes.

Projection onto a polytope uses Dykstra's alternating projections over its
halfspaces, vectorized over a batch of query points. A sweep that leaves a
feasible iterate unchanged certifies optimality: the accumulated increments
then sum to ``x - z`` and each lies in the normal cone of its halfspace at
``z``.
"""
from dataclasses import dataclass

import numpy as np

from .exceptions import ProjectionError
from .geometry import Polytope, RegionTag, polytope_min_value, _check_gamma
from .sampling import as_rng, sample_unit_ball, sample_unit_sphere

PROJ_TOL = 1e-9
MAX_SWEEPS = 100_000
MEMBER_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class ProjectionResult:
    point: np.ndarray
    distance: float
    iterations: int
    converged: bool


def project_batch(P, X, tol=PROJ_TOL, max_sweeps=MAX_SWEEPS):
    """Dykstra projection of every row of ``X`` onto ``P``.

    Returns
    -------
    points : (n, d) array
    distances : (n,) array
    sweeps : (n,) int array
        Sweeps used per point.
    converged : (n,) bool array
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    n, d = X.shape
    Z = X.copy()
    sweeps = np.zeros(n, dtype=int)
    converged = np.zeros(n, dtype=bool)
    t = P.n_halfspaces
    if t == 0 or n == 0:
        converged[:] = True
        return Z, np.zeros(n), sweeps, converged
    W, b = P.W, P.b
    # points already inside are their own projection
    active = np.flatnonzero(polytope_min_value(P, X) < 0)
    converged[np.setdiff1d(np.arange(n), active)] = True
    z = Z[active]
    E = np.zeros((t, active.size, d))
    it = 0
    while active.size and it < max_sweeps:
        it += 1
        z_prev = z.copy()
        for i in range(t):
            yv = z + E[i]
            v = yv @ W[i] + b[i]
            z = yv - np.minimum(v, 0.0)[:, None] * W[i]
            E[i] = yv - z
        moved = np.sqrt(np.sum((z - z_prev) ** 2, axis=1))
        # a stalled iterate outside P means the halfspaces have no common point
        done = (moved <= tol) & ((z @ W.T + b).min(axis=1) >= -tol)
        if np.any(done):
            ids = active[done]
            Z[ids] = z[done]
            sweeps[ids] = it
            converged[ids] = True
            keep = ~done
            active, z, E = active[keep], z[keep], E[:, keep]
    if active.size:
        Z[active] = z
        sweeps[active] = it
    dist = np.sqrt(np.sum((X - Z) ** 2, axis=1))
    return Z, dist, sweeps, converged


def project_onto_polytope(P, x, tol=PROJ_TOL, max_sweeps=MAX_SWEEPS):
    """Nearest point of ``P`` to ``x``.

    Raises
    ------
    ProjectionError
        If Dykstra has not converged after ``max_sweeps`` sweeps; the error
        carries the last iterate as ``best``.
    """
    x = np.asarray(x, dtype=float).ravel()
    Z, dist, sweeps, conv = project_batch(P, x[None, :], tol, max_sweeps)
    if not conv[0]:
        raise ProjectionError(f"no convergence after {sweeps[0]} sweeps", best=Z[0], sweeps=int(sweeps[0]))
    return ProjectionResult(Z[0], float(dist[0]), int(sweeps[0]), True)


def distance_to_polytope(P, X, tol=PROJ_TOL, max_sweeps=MAX_SWEEPS):
    """Projection distances of a batch; raises if any point fails to converge."""
    _, dist, sweeps, conv = project_batch(P, X, tol, max_sweeps)
    if not np.all(conv):
        raise ProjectionError(f"{np.sum(~conv)} projections did not converge", sweeps=int(sweeps.max()))
    return dist


def envelope_region(P, gamma, x):
    """Inside / outside / inner or outer gamma-envelope tag for ``x``.

    Inside ``P`` the distance to the complement equals the min-value, so the
    inner envelope is ``0 <= min <= gamma``; outside it takes a projection.
    """
    _check_gamma(gamma)
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    m = np.atleast_1d(polytope_min_value(P, X))
    inside = m >= 0
    tags = np.empty(X.shape[0], dtype=object)
    tags[inside] = np.where(m[inside] <= gamma, RegionTag.INNER_ENVELOPE, RegionTag.INSIDE)
    if np.any(~inside):
        dist = distance_to_polytope(P, X[~inside])
        tags[~inside] = np.where(dist <= gamma, RegionTag.OUTER_ENVELOPE, RegionTag.OUTSIDE)
    return tags[0] if single else tags


def _sample_region(d, rng, size, radius):
    return radius * sample_unit_ball(d, rng, size=size)


def verify_inner_identity(P, gamma, samples, rng, radius=1.0, directions=100):
    """Count points where the inward-shift and Minkowski-erosion tests disagree.

    Points are drawn uniformly from the ball of the given radius. A point with
    min-value ``>= gamma`` must keep ``x + gamma u`` inside ``P`` for each of
    ``directions`` random unit ``u``; a point with ``0 <= min < gamma`` must
    escape ``P`` along the outward normal of its tightest halfspace within
    distance ``gamma``. Each failed certificate counts once.
    """
    _check_gamma(gamma)
    rng = as_rng(rng)
    if P.n_halfspaces == 0:
        return 0
    X = _sample_region(P.dim, rng, samples, radius)
    vals = P.values(X)
    m = vals.min(axis=1)
    failures = 0

    deep = X[m >= gamma]
    if deep.shape[0]:
        U = sample_unit_sphere(P.dim, rng, size=directions)
        for s in range(0, deep.shape[0], 512):
            pts = deep[s:s + 512, None, :] + gamma * U[None, :, :]
            inner = polytope_min_value(P, pts.reshape(-1, P.dim)).reshape(pts.shape[:2])
            failures += int(np.sum(np.any(inner < -MEMBER_TOL, axis=1)))

    shallow = (m >= 0) & (m < gamma)
    if np.any(shallow):
        Xs, ms = X[shallow], m[shallow]
        tight = vals[shallow].argmin(axis=1)
        step = 0.5 * (ms + gamma)
        escaped = Xs - step[:, None] * P.W[tight]
        failures += int(np.sum(polytope_min_value(P, escaped) >= 0))
    return failures


def find_witness(P, gamma, rng, starts=2000, iters=200):
    """A point of the unit ball with min-value ``>= gamma``, or None.

    Random multistart followed by projected subgradient ascent on the
    min-value, restricted to the unit ball.
    """
    rng = as_rng(rng)
    d = P.dim
    if P.n_halfspaces == 0:
        return np.zeros(d)
    X = np.vstack([np.zeros((1, d)), sample_unit_ball(d, rng, size=starts)])
    m = polytope_min_value(P, X)
    best = np.argsort(-m)[:16]
    Z = X[best].copy()
    step = 0.1
    for _ in range(iters):
        vals = P.values(Z)
        g = P.W[vals.argmin(axis=1)]
        Z = Z + step * g
        norms = np.maximum(np.linalg.norm(Z, axis=1), 1.0)
        Z = Z / norms[:, None]
        step *= 0.98
    cand = np.vstack([X[best], Z])
    mv = polytope_min_value(P, cand)
    i = int(np.argmax(mv))
    return cand[i] if mv[i] >= gamma else None


def sample_margin_band(P, width, n, rng, max_draws=None, radius=1.0):
    """Up to ``n`` ball-uniform points with ``|min-value| <= width`` (rejection sampling)."""
    rng = as_rng(rng)
    max_draws = max_draws if max_draws is not None else 2000 * n
    out, have, drawn = [], 0, 0
    batch = max(4 * n, 10_000)
    while have < n and drawn < max_draws:
        m = min(batch, max_draws - drawn)
        X = _sample_region(P.dim, rng, m, radius)
        drawn += m
        sel = X[np.abs(polytope_min_value(P, X)) <= width]
        out.append(sel)
        have += sel.shape[0]
    if not out:
        return np.zeros((0, P.dim))
    return np.vstack(out)[:n]


def verify_margin_in_envelope(P, gamma, samples, rng, witness=None, max_draws=None):
    """Violations of "the (gamma^2/2)-margin inside the unit ball lies in the gamma-envelope".

    Parameters
    ----------
    P : Polytope
    gamma : float in (0, 1)
    samples : int
        Number of margin-band points to test.
    rng : Generator, RngSeed, int or None
    witness : array, optional
        Point of the unit ball with min-value ``>= gamma``; searched for if
        omitted.
    max_draws : int, optional
        Cap on ball samples drawn while filling the band; a band too thin to
        hit is reported as zero violations.

    Returns
    -------
    int

    Raises
    ------
    ValueError
        If no witness exists (the containment is not claimed then).
    """
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    rng = as_rng(rng)
    if witness is None:
        witness = find_witness(P, gamma, rng)
    if witness is None or np.linalg.norm(witness) > 1 + 1e-9 or polytope_min_value(P, witness) < gamma:
        raise ValueError("no point of the unit ball has min-value >= gamma; containment is not claimed")
    band = sample_margin_band(P, gamma**2 / 2, samples, rng, max_draws=max_draws)
    if band.shape[0] == 0:
        return 0
    m = polytope_min_value(P, band)
    violations = int(np.sum((m >= 0) & (m > gamma)))
    outside = band[m < 0]
    if outside.shape[0]:
        violations += int(np.sum(distance_to_polytope(P, outside) > gamma))
    return violations


@dataclass(frozen=True, eq=False)
class ExpandingPolytope:
    """Halfspaces of ``base`` moving outward, halfspace ``i`` at ``speeds[i]``."""

    base: Polytope
    speeds: np.ndarray

    def __post_init__(self):
        s = np.array(self.speeds, dtype=float).ravel()
        if s.shape[0] != self.base.n_halfspaces:
            raise ValueError("need one speed per halfspace")
        if np.any(s < 0):
            raise ValueError("speeds must be nonnegative")
        s.setflags(write=False)
        object.__setattr__(self, "speeds", s)

    @classmethod
    def unit(cls, P):
        return cls(P, np.ones(P.n_halfspaces))

    def at(self, tau):
        return Polytope.from_arrays(self.base.W, self.base.b + self.speeds * tau, dim=self.base.dim)

    def min_value(self, x, tau):
        """Min-value of point(s) ``x`` in ``Q(tau)``; ``tau`` may be one value per row."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        tau = np.asarray(tau, dtype=float).reshape(-1, 1)
        if self.base.n_halfspaces == 0:
            return np.full(x.shape[0], np.inf)
        return (x @ self.base.W.T + self.base.b + tau * self.speeds).min(axis=1)


def membership_along_line(Q, p0, v, times):
    times = np.asarray(times, dtype=float)
    pts = np.asarray(p0, dtype=float)[None, :] + times[:, None] * np.asarray(v, dtype=float)[None, :]
    return Q.min_value(pts, times) >= 0


def no_reenter_check(Q, p0, v, times):
    """True iff ``p0 + tau v`` lies in ``Q(tau)`` for a contiguous block of grid times."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) <= 0):
        raise ValueError("times must be strictly increasing")
    inside = membership_along_line(Q, p0, v, times)
    idx = np.flatnonzero(inside)
    return bool(idx.size == 0 or idx[-1] - idx[0] + 1 == idx.size)


@dataclass(frozen=True, eq=False)
class HausdorffEstimate:
    distance: float
    samples: int
    point: np.ndarray


def chebyshev_center(P, box=None):
    """Center of the largest ball inside ``P`` (intersected with ``[-box, box]^d``)."""
    from scipy.optimize import linprog

    d = P.dim
    W, b = P.W, P.b
    if box is not None:
        eye = np.eye(d)
        W = np.vstack([W, -eye, eye])
        b = np.concatenate([b, np.full(2 * d, float(box))])
    # maximize r subject to w_i . x + b_i >= r  (unit normals)
    c = np.zeros(d + 1)
    c[-1] = -1.0
    A = np.hstack([-W, np.ones((W.shape[0], 1))])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * d + [(None, None)], method="highs")
    if res.status != 0:
        raise ValueError(f"could not find an interior point: {res.message}")
    return res.x[:d]


def _ray_exit(P, c, U, box):
    """Parameter ``s >= 0`` where ``c + s u`` leaves ``P`` (or the sampling box)."""
    slope = U @ P.W.T                              # (m, t)
    base = P.W @ c + P.b                            # (t,)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = np.where(slope < 0, base[None, :] / -slope, np.inf)
    s = s.min(axis=1) if P.n_halfspaces else np.full(U.shape[0], np.inf)
    if box is not None:
        with np.errstate(divide="ignore", invalid="ignore"):
            sb = np.where(U > 0, (box - c) / U, np.where(U < 0, (-box - c) / U, np.inf))
        s = np.minimum(s, sb.min(axis=1))
    return s


def hausdorff_distance(P1, P2, boundary_samples, rng, box=None, interior=None,
                       refine_top=8, refine_iters=60):
    """Lower estimate of the Hausdorff distance between nested ``P1 <= P2``.

    Boundary points of ``P2`` are found by shooting rays from an interior
    point of ``P1`` in random directions; the largest projection distance to
    ``P1`` is returned. The best few rays are then locally perturbed
    (accepting only improvements), which sharpens the estimate near vertices
    while every evaluated point stays a genuine boundary point.

    Raises
    ------
    ValueError
        If a ray never leaves ``P2`` and no sampling ``box`` was given.
    """
    rng = as_rng(rng)
    d = P1.dim
    c = chebyshev_center(P1, box) if interior is None else np.asarray(interior, dtype=float)
    U = sample_unit_sphere(d, rng, size=boundary_samples)
    s = _ray_exit(P2, c, U, box)
    if not np.all(np.isfinite(s)):
        raise ValueError("P2 is unbounded along a sampled ray; pass a sampling box")
    Q = c + s[:, None] * U
    dist = distance_to_polytope(P1, Q)
    best = int(np.argmax(dist))
    value, point = float(dist[best]), Q[best]
    evaluated = boundary_samples

    if refine_top and boundary_samples:
        top = np.argsort(-dist)[:refine_top]
        Ut, dt = U[top].copy(), dist[top].copy()
        sigma = np.full(top.size, 0.05)
        for _ in range(refine_iters):
            prop = Ut + sigma[:, None] * rng.standard_normal(Ut.shape)
            prop /= np.linalg.norm(prop, axis=1, keepdims=True)
            sp = _ray_exit(P2, c, prop, box)
            ok = np.isfinite(sp)
            Qp = c + np.where(ok, sp, 0.0)[:, None] * prop
            dp = np.where(ok, distance_to_polytope(P1, Qp), -np.inf)
            evaluated += top.size
            better = dp > dt
            Ut[better], dt[better] = prop[better], dp[better]
            sigma = np.where(better, sigma * 1.5, sigma * 0.7)
        j = int(np.argmax(dt))
        if dt[j] > value:
            value = float(dt[j])
            point = c + _ray_exit(P2, c, Ut[j:j + 1], box)[0] * Ut[j]
    return HausdorffEstimate(value, evaluated, point)


def hausdorff_speed_profile(Q, times, step, samples, rng, box=None):
    """Estimates of ``H(Q(tau), Q(tau + step)) / step`` for each ``tau`` in ``times``."""
    if not step > 0:
        raise ValueError("step must be positive")
    rng = as_rng(rng)
    out = []
    for tau in times:
        est = hausdorff_distance(Q.at(tau), Q.at(tau + step), samples, rng, box=box)
        out.append(est.distance / step)
    return np.array(out)
