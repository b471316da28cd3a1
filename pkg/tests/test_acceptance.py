"""Acceptance suite: one PASS/FAIL line per criterion, with wall time and the measured numbers.

Run with ``pytest tests/test_acceptance.py -v``; the summary lines are written
straight to the terminal even when output is captured.
"""
import itertools
import math
import time

import numpy as np
import pytest
from scipy.optimize import linprog

from conftest import vertex_death_instance, wedge
from fatpoly import bounds
from fatpoly.envelope import (ExpandingPolytope, find_witness, hausdorff_speed_profile, no_reenter_check,
                              project_onto_polytope, verify_margin_in_envelope)
from fatpoly.exceptions import LearningFailure
from fatpoly.experiments import (ExperimentConfig, fig3_csv, planted_instance, planted_sampler,
                                 random_polytope, run_fig3)
from fatpoly.geometry import Polytope, is_consistent, polytope_min_value
from fatpoly.hardness import (Graph, brute_force_max_separable, coloring_to_cover, graph_to_instance,
                              independent_set_hyperplane, lp_solve)
from fatpoly.jl import check_dot_products, make_jl, required_dim
from fatpoly.learner import LearnerConfig, build_candidates, greedy_polytope, learn_pac
from fatpoly.net import build_net, coverage_check
from fatpoly.perceptron import PerceptronConfig, margin_perceptron
from fatpoly.sampling import make_rng, sample_unit_ball, sample_unit_sphere


@pytest.fixture
def report(capsys):
    def emit(name, ok, elapsed, limit, detail):
        within = elapsed < limit
        status = "PASS" if ok and within else "FAIL"
        with capsys.disabled():
            print(f"\n[{status}] {name}: {detail}; {elapsed:.1f}s (limit {limit:g}s)")
        assert ok, detail
        assert within, f"took {elapsed:.1f}s, limit {limit:g}s"
    return emit


def test_c01_perceptron_mistake_bound(report):
    t0 = time.perf_counter()
    cfg = PerceptronConfig(target_margin=0.1)
    updates = []
    for s in range(100):
        X, y, _ = planted_instance(5, 1, 0.2, 200, make_rng(s, 101))
        r = margin_perceptron(X, y, cfg)
        assert np.min(y * r.hyperplane.value(X)) > 0.05
        updates.append(r.updates)
    el = time.perf_counter() - t0
    report("C1 perceptron updates <= 800", max(updates) <= 800, el, 5,
           f"max updates {max(updates)}, mean {np.mean(updates):.1f} over 100 instances")


def test_c02_jl_dot_products(report):
    t0 = time.perf_counter()
    eps, d = 0.2, 20
    k = required_dim(210, eps)
    fracs = []
    for s in range(20):
        rng = make_rng(s, 102)
        S = sample_unit_ball(d, rng, size=200)
        T = sample_unit_sphere(d, rng, size=10)
        fracs.append(check_dot_products(make_jl(d, k, rng), S, T, eps))
    good = sum(f <= 0.01 for f in fracs)
    el = time.perf_counter() - t0
    report("C2 JL dot products", good >= 18, el, 30,
           f"k={k}, {good}/20 seeds with failure fraction <= 1% (worst {max(fracs):.4f})")


def test_c03_delta_net_coverage(report):
    t0 = time.perf_counter()
    misses = {}
    for k, delta in ((3, 0.3), (5, 0.3)):
        net = build_net(k, delta, make_rng(k, 103))
        misses[(k, delta)] = (coverage_check(net, 10_000, rng=make_rng(k, 104)), len(net))
    el = time.perf_counter() - t0
    ok = all(m <= 0.01 for m, _ in misses.values())
    detail = ", ".join(f"(k={k}, delta={d}): miss {m:.4f} with {n} directions" for (k, d), (m, n) in misses.items())
    report("C3 delta-net coverage", ok, el, 60, detail)


def test_c04_greedy_planted(report):
    t0 = time.perf_counter()
    gamma, t, n = 0.25, 3, 300
    good, counts = 0, []
    for s in range(100):
        X, y, _ = planted_instance(5, t, gamma, n, make_rng(s, 105))
        cfg = LearnerConfig(gamma=gamma, t_hint=t, candidate_budget=10**4, seed=s)
        try:
            P = greedy_polytope(X, y, gamma, build_candidates(X, y, cfg), iteration_cap=cfg.iteration_cap(n))
        except LearningFailure:
            continue
        counts.append(len(P))
        good += is_consistent(P, gamma / 4, X, y) and len(P) <= 3 * t * math.log(n)
    el = time.perf_counter() - t0
    report("C4 greedy fat polytope", good >= 95, el, 600,
           f"{good}/100 seeds consistent at gamma/4 within 3 t ln n = {3 * t * math.log(n):.1f} halfspaces "
           f"(max {max(counts) if counts else '-'})")


def test_c05_pac_wrapper(report):
    t0 = time.perf_counter()
    gamma, eps, delta = 0.3, 0.2, 0.1
    errs = []
    for s in range(100):
        _, _, target = planted_instance(3, 1, gamma, 10, make_rng(s, 106))
        sampler = planted_sampler(target, gamma)
        cfg = LearnerConfig(gamma=gamma, t_hint=1, candidate_budget=2000, seed=s)
        try:
            P, _ = learn_pac(1, gamma, eps, delta, sampler, cfg, rng=make_rng(s, 107))
        except LearningFailure:
            errs.append(1.0)
            continue
        Z, yz = sampler(10_000, make_rng(s, 108))
        errs.append(float(np.mean(np.where(polytope_min_value(P, Z) >= 0, 1, -1) != yz)))
    good = sum(e <= eps for e in errs)
    el = time.perf_counter() - t0
    report("C5 PAC holdout error", good >= 90, el, 300,
           f"{good}/100 seeds with holdout error <= {eps} (worst {max(errs):.4f}), "
           f"m = {bounds.pac_sample_size(1, gamma, eps, delta)}")


def _envelope_polytopes(count):
    rng = make_rng(0, 109)
    out = []
    while len(out) < count:
        i = len(out)
        d = 2 + i % 5
        gamma = (0.1, 0.2)[i % 2]
        P = random_polytope(d, int(rng.integers(2, 2 * d + 1)), rng, offset_range=(0.3, 0.9))
        q = find_witness(P, gamma, rng)
        if q is not None:
            out.append((P, gamma, q))
    return out


def test_c06_margin_in_envelope(report):
    t0 = time.perf_counter()
    total = 0
    polys = _envelope_polytopes(20)
    for j, (P, gamma, q) in enumerate(polys):
        total += verify_margin_in_envelope(P, gamma, 100_000, make_rng(j, 110), witness=q)
    # thin wedge: a gamma-margin point beyond the ball is farther than gamma from the polytope
    gamma = 0.2
    W = wedge(5, [1.5, 0.0], [-1.0, 0.0])
    q = find_witness(W, gamma, make_rng(0, 111))
    far = np.array([2.5, 0.0])
    far_margin = float(polytope_min_value(W, far))
    far_dist = project_onto_polytope(W, far).distance
    escapes = -gamma <= far_margin < 0 and far_dist > gamma
    inside_ball = verify_margin_in_envelope(W, gamma, 100_000, make_rng(1, 111), witness=q)
    el = time.perf_counter() - t0
    ok = total == 0 and escapes and inside_ball == 0
    report("C6 margin inside envelope", ok, el, 600,
           f"{total} violations over 20 polytopes x 1e5 samples (dims {sorted({P.dim for P, _, _ in polys})}); "
           f"wedge: far point margin {far_margin:.3f}, distance {far_dist:.3f} > {gamma}, "
           f"{inside_ball} violations inside the ball")


def test_c07_expanding_polytopes(report):
    t0 = time.perf_counter()
    rng = make_rng(0, 112)
    times = np.linspace(-3.0, 3.0, 1000)
    bad = 0
    for _ in range(1000):
        d = int(rng.integers(2, 6))
        P = random_polytope(d, int(rng.integers(1, 2 * d + 1)), rng)
        Q = ExpandingPolytope(P, rng.uniform(0.0, 2.0, len(P)))
        p = 1.5 * sample_unit_ball(d, rng)
        v = sample_unit_sphere(d, rng) * rng.uniform(0.0, 3.0)
        bad += not no_reenter_check(Q, p, v, times[times >= 0] if rng.random() < 0.5 else times)
    Qv, tau_star = vertex_death_instance()
    vt = np.arange(0.0, 0.41, 0.05)
    prof = hausdorff_speed_profile(Qv, vt, 0.01, 3000, make_rng(1, 112))
    rise = float(np.max(np.diff(prof)))
    sq = hausdorff_speed_profile(ExpandingPolytope.unit(Polytope.cube(2, 1.0)), [0.0, 0.5, 1.0], 0.01, 2000,
                                 make_rng(2, 112))
    sq_err = float(np.max(np.abs(sq - math.sqrt(2))))
    el = time.perf_counter() - t0
    ok = bad == 0 and rise <= 0.05 and sq_err <= 0.05
    report("C7 no re-entry and Hausdorff speed", ok, el, 300,
           f"{bad}/1000 re-entries; vertex-death profile {np.round(prof, 3).tolist()} "
           f"(largest rise {rise:.4f}, apex dies at {tau_star:.2f}); square speed error {sq_err:.4f}")


def _greedy_coloring(G):
    color = {}
    for v in range(G.n):
        used = {color[u] for u in color if G.adjacent(u, v)}
        color[v] = next(c for c in itertools.count() if c not in used)
    return color


def _cuts_off(G, S):
    """Independent oracle: does some halfspace keep all positives (>= 0) and push every ``e_i``, i in S, below 0?"""
    X, y = graph_to_instance(G)
    pos = X[y == 1]
    n = G.n
    # variables (w, b); positives: -(w.x + b) <= 0; chosen negatives: w_i + b <= -1 (scale-free)
    A = [np.r_[-p, -1.0] for p in pos] + [np.r_[np.eye(n)[i], 1.0] for i in S]
    rhs = [0.0] * len(pos) + [-1.0] * len(S)
    res = linprog(np.zeros(n + 1), A_ub=np.array(A), b_ub=rhs, bounds=[(None, None)] * (n + 1), method="highs")
    return res.status == 0


def test_c08_hardness_instances(report):
    t0 = time.perf_counter()
    rng = make_rng(0, 113)
    worst_gap, problems, lp_checks = np.inf, [], 0
    for g in range(100):
        n = int(rng.integers(1, 11))
        G = Graph.random(n, float(rng.uniform(0.1, 0.9)), rng)
        X, y = graph_to_instance(G)
        opt = brute_force_max_separable(G)
        sets = [c for k in range(1, n + 1) for c in itertools.combinations(range(n), k) if G.is_independent(c)]
        if max(len(c) for c in sets) != opt:
            problems.append(f"graph {g}: brute force {opt} disagrees with subset scan")
        for c in sets:
            rows = np.r_[list(c), np.arange(n, len(y))]  # the chosen negatives and every positive
            gap = np.min(y[rows] * independent_set_hyperplane(G, c).value(X[rows])) - 1 / (4 * math.sqrt(opt))
            worst_gap = min(worst_gap, gap)
        P = coloring_to_cover(G, _greedy_coloring(G))
        if not is_consistent(P, 0.0, X, y):
            problems.append(f"graph {g}: coloring cover inconsistent")
        # inseparability: a set of opt + 1 vertices always contains an edge, and no halfspace cuts it off
        best = max(sets, key=len)
        if not _cuts_off(G, best):
            problems.append(f"graph {g}: maximum independent set not cut off")
        for c in itertools.islice(itertools.combinations(range(n), opt + 1), 5):
            lp_checks += 1
            if _cuts_off(G, c):
                problems.append(f"graph {g}: non-independent set {c} cut off")
    el = time.perf_counter() - t0
    ok = worst_gap >= -1e-12 and not problems
    report("C8 hardness instances", ok, el, 120,
           f"min margin minus 1/(4 sqrt opt) = {worst_gap:.3g}; {lp_checks} inseparability LPs; "
           f"{len(problems)} problems{': ' + problems[0] if problems else ''}")


def test_c09_lp_via_separation(report):
    t0 = time.perf_counter()
    rng = make_rng(0, 114)
    worst, margins = -np.inf, []
    for _ in range(20):
        A = sample_unit_sphere(5, rng, size=20)
        x0 = 0.5 * sample_unit_ball(5, rng)
        b = A @ x0 + rng.uniform(0.05, 1.0, 20)
        margins.append(float(np.min(b - A @ x0)))
        x = lp_solve(A, b)
        worst = max(worst, float(np.max(A @ x - b)))
    eq_err, eq_viol = 0.0, -np.inf
    for _ in range(5):
        x0 = 0.5 * sample_unit_ball(5, rng)
        A_in = sample_unit_sphere(5, rng, size=12)
        E = sample_unit_sphere(5, rng, size=2)
        A = np.vstack([A_in, E, -E])
        b = np.concatenate([A_in @ x0 + rng.uniform(0.05, 1.0, 12), E @ x0, -(E @ x0)])
        x = lp_solve(A, b)
        eq_viol = max(eq_viol, float(np.max(A @ x - b)))
        eq_err = max(eq_err, float(np.max(np.abs(E @ x - E @ x0))))
    el = time.perf_counter() - t0
    ok = worst <= 1e-8 and eq_viol <= 1e-8 and eq_err <= 1e-8
    report("C9 LP via strict separation", ok, el, 120,
           f"20 planted LPs (interior margin >= {min(margins):.3f}) max violation {worst:.3g}; "
           f"5 forced-equality systems max violation {eq_viol:.3g}, equality residual {eq_err:.3g}")


def test_c10_heuristic_benchmark(report):
    t0 = time.perf_counter()
    cfg = ExperimentConfig(dims=tuple(range(2, 9)), n_points=500, M=2000, trials=20, seed=0)
    rows = run_fig3(cfg, n_jobs=4)
    again = run_fig3(cfg, n_jobs=1)
    identical = fig3_csv(rows) == fig3_csv(again)
    failures = {r["d"]: r["failures"] for r in rows if r["failures"]}
    ratios = {r["d"]: r["mean_halfspaces"] / r["d"] for r in rows}
    peak = max(ratios, key=ratios.get)
    directional = ratios[peak] > 1 and min(ratios) < peak < max(ratios)
    el = time.perf_counter() - t0
    ok = not failures and directional and identical
    report("C10 heuristic halfspace counts", ok, el, 900,
           f"means {[round(r['mean_halfspaces'], 2) for r in rows]}; count/d "
           f"{ {d: round(v, 2) for d, v in ratios.items()} } peak at d={peak}; "
           f"failed trials {failures or 'none'}; CSV identical across runs: {identical}")


def test_c11_bounds(report):
    t0 = time.perf_counter()
    tol = 1e-9
    checks = [
        bounds.vc_fat_hyperplane(2) == 4,
        bounds.vc_fat_hyperplane(1) == 9,
        abs(bounds.vc_fat_hyperplane(0.1) - 441) <= tol,
        abs(bounds.vc_fat_polytope(1, 1, 2) - 4 * math.log2(3)) <= tol,
        abs(bounds.vc_envelope_polytope(1000, 1, 1.0) - 2 * 25 * 1 * math.log2(3)) <= tol,
        abs(bounds.generalization_error(1000, 10, 0.05)
            - (2 / 1000) * (10 * math.log(200 * math.e) + math.log(40))) <= tol,
        bounds.pac_sample_size(1, 0.5, 0.5, 0.5) == 17,
    ]
    try:
        bounds.vc_envelope_polytope(3, 1, 2.0)
        checks.append(False)
    except ValueError:
        checks.append(True)
    grid_g = [0.05, 0.1, 0.2, 0.5, 0.9, 1.0]
    for d in (1, 2, 5, 20, 100):
        for t in (1, 2, 3, 8):
            for g in grid_g:
                checks.append(bounds.vc_fat_polytope(d, t + 1, g) >= bounds.vc_fat_polytope(d, t, g))
                checks.append(bounds.vc_fat_polytope(d + 1, t, g) >= bounds.vc_fat_polytope(d, t, g))
                checks.append(bounds.vc_envelope_polytope(d, t, g) == bounds.vc_fat_polytope(d, t, g * g / 2))
            for g1, g2 in zip(grid_g, grid_g[1:]):
                checks.append(bounds.vc_fat_polytope(d, t, g2) <= bounds.vc_fat_polytope(d, t, g1))
    for m in (20, 100, 1000, 10**5):
        checks.append(bounds.generalization_error(2 * m, 10, 0.05) < bounds.generalization_error(m, 10, 0.05))
    for t in (1, 3):
        for g in (0.1, 0.3, 0.7):
            for e in (0.4, 0.2, 0.1):
                checks.append(bounds.pac_sample_size(t, g, e / 2, 0.1) >= bounds.pac_sample_size(t, g, e, 0.1))
            checks.append(bounds.pac_sample_size(t, g / 2, 0.2, 0.1) >= bounds.pac_sample_size(t, g, 0.2, 0.1))
    ratio = bounds.pac_sample_size(20000, 0.3, 0.2, 0.1) / bounds.pac_sample_size(10000, 0.3, 0.2, 0.1)
    checks.append(2.0 <= ratio <= 2.3)
    el = time.perf_counter() - t0
    report("C11 bounds calculators", all(checks), el, 1,
           f"{sum(checks)}/{len(checks)} hand values and monotonicity checks hold")
