"""Graph-based hard instances for polytope learning, and LP feasibility
driven by a homogeneous separator oracle.
"""
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSystem, InfeasibleOrTimeout, PerceptronFailure
from .geometry import Hyperplane, Polytope
from .perceptron import PerceptronConfig, margin_perceptron

BRUTE_FORCE_MAX_N = 20
PIVOT_TOL = 1e-10
VERIFY_TOL = 1e-8
SEPARATOR_MAX_UPDATES = 100_000
SEPARATOR_MARGIN = 1e-9


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __init__(self, n, edges=()):
        n = int(n)
        if n < 0:
            raise ValueError("vertex count must be >= 0")
        norm = set()
        for e in edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge {(i, j)} has a vertex outside [0, {n})")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(norm))

    def adjacent(self, i, j):
        return (min(i, j), max(i, j)) in self.edges

    def is_independent(self, vertices):
        vs = sorted(set(vertices))
        return not any(self.adjacent(a, c) for a, c in itertools.combinations(vs, 2))

    @classmethod
    def complete(cls, n):
        return cls(n, itertools.combinations(range(n), 2))

    @classmethod
    def cycle(cls, n):
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n):
        return cls(n, [(i, i + 1) for i in range(n - 1)])

    @classmethod
    def random(cls, n, p, rng):
        pairs = list(itertools.combinations(range(n), 2))
        keep = rng.random(len(pairs)) < p
        return cls(n, [e for e, k in zip(pairs, keep) if k])


def graph_to_instance(G):
    """Labeled points in dimension ``n``: ``-e_i`` per vertex, ``+0`` and ``+(e_i+e_j)/2`` per edge.

    Returns ``(X, y)`` with negatives first (row ``i`` is vertex ``i``), then
    the origin, then edge midpoints in sorted edge order.
    """
    if G.n < 1:
        raise ValueError("graph needs at least one vertex")
    eye = np.eye(G.n)
    mids = [0.5 * (eye[i] + eye[j]) for i, j in sorted(G.edges)]
    X = np.vstack([eye, np.zeros((1, G.n))] + ([np.array(mids)] if mids else []))
    y = np.concatenate([-np.ones(G.n, dtype=int), np.ones(1 + len(mids), dtype=int)])
    return X, y


def independent_set_hyperplane(G, vertices):
    """Halfspace with ``-1/sqrt(k)`` on the chosen vertices and offset ``3/(4 sqrt(k))``.

    Negatives of the ``k`` chosen vertices get value ``-1/(4 sqrt(k))``; the
    origin and every edge midpoint get at least ``1/(4 sqrt(k))``.
    """
    vs = sorted(set(int(v) for v in vertices))
    if not vs:
        raise ValueError("vertex set must be nonempty")
    if any(not 0 <= v < G.n for v in vs):
        raise ValueError("vertex outside the graph")
    if not G.is_independent(vs):
        raise ValueError(f"vertex set {vs} is not independent")
    k = len(vs)
    w = np.zeros(G.n)
    w[vs] = -1.0 / math.sqrt(k)
    return Hyperplane(w, 3.0 / (4.0 * math.sqrt(k)))


def brute_force_max_separable(G):
    """Size of a maximum independent set, by exhaustive branch and bound over vertex subsets.

    Equals the most negatives one positive-consistent halfspace can cut off:
    a halfspace negative at both ends of an edge is negative at its midpoint.
    """
    if G.n > BRUTE_FORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_FORCE_MAX_N}")
    adj = [0] * G.n
    for i, j in G.edges:
        adj[i] |= 1 << j
        adj[j] |= 1 << i
    best = 0

    def grow(cand, size):
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + bin(cand).count("1") <= best:
            return
        v = (cand & -cand).bit_length() - 1
        grow(cand & ~(1 << v) & ~adj[v], size + 1)
        grow(cand & ~(1 << v), size)
    grow((1 << G.n) - 1, 0)
    return best


def _split_classes(coloring, n):
    classes = {}
    for v in range(n):
        classes.setdefault(coloring[v], []).append(v)
    cap = math.ceil(n / len(classes))
    out = []
    for c in sorted(classes, key=lambda c: classes[c][0]):
        members = classes[c]
        out.extend(members[i:i + cap] for i in range(0, len(members), cap))
    return out


def coloring_to_cover(G, coloring):
    """Polytope with one independent-set halfspace per color class.

    Classes larger than ``ceil(n / #colors)`` are cut into consecutive chunks
    of that size first. The result is consistent on :func:`graph_to_instance`
    with margin ``1/(4 sqrt(largest class))``.
    """
    if G.n < 1:
        raise ValueError("graph needs at least one vertex")
    coloring = [coloring[v] for v in range(G.n)] if isinstance(coloring, dict) else list(coloring)
    if len(coloring) != G.n:
        raise ValueError("need one color per vertex")
    for i, j in G.edges:
        if coloring[i] == coloring[j]:
            raise ValueError(f"improper coloring: edge {(i, j)} has both ends colored {coloring[i]!r}")
    classes = _split_classes(coloring, G.n)
    return Polytope([independent_set_hyperplane(G, c) for c in classes], dim=G.n)


@dataclass(frozen=True, eq=False)
class StrictLp:
    """System ``A x < b``."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.array(self.A, dtype=float))
        b = np.array(self.b, dtype=float).ravel()
        if A.shape[0] != b.shape[0]:
            raise ValueError("A and b have different row counts")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("entries must be finite")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def shape(self):
        return self.A.shape

    def satisfied_by(self, x):
        return bool(np.all(self.A @ x < self.b))


def perceptron_separator(max_updates=SEPARATOR_MAX_UPDATES):
    """Oracle mapping points to ``w`` with ``p . w > 0`` for all rows, via the homogeneous Perceptron.

    Points are scaled to unit norm first. A tiny positive target margin keeps
    rounding ties (dot products of order 1e-17) from counting as separated.
    Returns the weight vector, or None if the budget ran out (which includes
    every infeasible input).
    """
    cfg = PerceptronConfig(target_margin=SEPARATOR_MARGIN, max_updates=max_updates, homogenize=False)

    def separate(points):
        norms = np.linalg.norm(points, axis=1)
        if np.any(norms == 0):
            return None
        try:
            res = margin_perceptron(points / norms[:, None], np.ones(points.shape[0]), cfg)
        except PerceptronFailure:
            return None
        return res.weights
    return separate


def lp_strict_solve(L, separator=None):
    """Solve ``A x < b`` by strictly separating ``{(-A_i, b_i)} + {(0, 1)}`` from the origin.

    Raises
    ------
    InfeasibleOrTimeout
        The oracle found no separator, or its answer did not verify.
    """
    separator = separator or perceptron_separator()
    m, n = L.shape
    pts = np.vstack([np.hstack([-L.A, L.b[:, None]]), np.eye(n + 1)[-1:]])
    w = separator(pts)
    if w is None:
        raise InfeasibleOrTimeout(f"no strict solution found for a {m}x{n} system")
    w = np.asarray(w, dtype=float)
    if not w[-1] > 0:
        raise InfeasibleOrTimeout("separator returned a non-positive last coordinate")
    x = w[:-1] / w[-1]
    if not L.satisfied_by(x):
        raise InfeasibleOrTimeout("separator answer fails strict verification")
    return x


class _Affine:
    """Parametrization ``x = T y + c`` of the surviving variables."""

    def __init__(self, n):
        self.T = np.eye(n)
        self.c = np.zeros(n)

    def eliminate(self, a, beta):
        """Impose ``a . x = beta``; returns False if the row is redundant."""
        row = a @ self.T
        rhs = beta - a @ self.c
        k = int(np.argmax(np.abs(row))) if row.size else -1
        if k < 0 or abs(row[k]) < PIVOT_TOL:
            if abs(rhs) <= VERIFY_TOL:
                return False
            raise DegenerateSystem(f"equality row has no pivot above {PIVOT_TOL} but residual {rhs:.3g}; "
                                   "the forced equalities contradict each other or the oracle timed out")
        # y_k = (rhs - sum_{l != k} row_l y_l) / row_k
        E = np.delete(np.eye(row.size), k, axis=1)
        E[k] = -np.delete(row, k) / row[k]
        shift = np.zeros(row.size)
        shift[k] = rhs / row[k]
        self.c = self.c + self.T @ shift
        self.T = self.T @ E
        return True


def lp_solve(A, b, strict_solver=None):
    """A point with ``A x <= b``, found with a strict-system oracle.

    A single forward sweep keeps every row whose strict version stays
    jointly feasible with the rows kept so far. If some rows are left out,
    they hold with equality at every solution; each is solved for its largest
    coefficient variable, substituted away, and the smaller system is solved
    recursively.

    Parameters
    ----------
    A : (m, n) array
    b : (m,) array
    strict_solver : callable(StrictLp) -> x, optional
        Must raise :class:`InfeasibleOrTimeout` on failure. Defaults to
        :func:`lp_strict_solve` with the Perceptron separator.

    Raises
    ------
    InfeasibleOrTimeout
    DegenerateSystem
        An equality row could not be pivoted, or the final answer failed
        verification.
    """
    A = np.atleast_2d(np.array(A, dtype=float))
    b = np.array(b, dtype=float).ravel()
    if A.shape[0] != b.shape[0]:
        raise ValueError("A and b have different row counts")
    strict_solver = strict_solver or lp_strict_solve
    x = _solve_level(A, b, strict_solver)
    if not np.all(A @ x <= b + VERIFY_TOL):
        raise DegenerateSystem(f"solution violates the system by {np.max(A @ x - b):.3g}")
    return x


def _solve_level(A, b, strict_solver):
    m, n = A.shape
    if n == 0:
        if np.all(b >= -VERIFY_TOL):
            return np.zeros(0)
        raise InfeasibleOrTimeout("reduced system 0 <= b has a negative right-hand side")
    S, sol = [], None
    for i in range(m):
        trial = S + [i]
        try:
            sol = strict_solver(StrictLp(A[trial], b[trial]))
        except InfeasibleOrTimeout:
            continue
        S = trial
    if len(S) == m:
        return sol if sol is not None else np.zeros(n)
    aff = _Affine(n)
    for j in range(m):
        if j not in S:
            aff.eliminate(A[j], b[j])
    # rows outside S now hold by construction; S rows carry over as inequalities
    A2 = A[S] @ aff.T
    b2 = b[S] - A[S] @ aff.c
    y = _solve_level(A2, b2, strict_solver)
    return aff.T @ y + aff.c
