"""Command-line front end: ``fatpoly <subcommand> ...``."""
import argparse
import csv
import io
import json
import logging
import sys

import numpy as np

from . import bounds
from .envelope import (ExpandingPolytope, hausdorff_speed_profile, no_reenter_check,
                       verify_inner_identity, verify_margin_in_envelope)
from .exceptions import CombinatorialBlowup, DegenerateSystem, InfeasibleOrTimeout, LearningFailure
from .experiments import ExperimentConfig, evaluate, fig3_csv, generate_instance, heuristic_learn, run_fig3
from .hardness import Graph, StrictLp, graph_to_instance, lp_solve, lp_strict_solve
from .io import load_model, points_from_csv, points_to_csv, save_model
from .learner import LearnerConfig, build_candidates, enumerate_t_polytope, greedy_polytope
from .sampling import make_rng, sample_unit_ball, sample_unit_sphere

log = logging.getLogger("fatpoly")

EXIT_OK, EXIT_FAIL, EXIT_INFEASIBLE, EXIT_DEGENERATE = 0, 1, 2, 3
MONOTONE_TOL = 0.05


def _emit(args, record):
    """Print a flat dict as JSON, CSV or ``key: value`` lines."""
    fmt = getattr(args, "fmt", None)
    if fmt == "json":
        print(json.dumps(record, indent=2))
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(record), lineterminator="\n")
        w.writeheader()
        w.writerow(record)
        sys.stdout.write(buf.getvalue())
    else:
        for k, v in record.items():
            print(f"{k}: {v}")


def _dims(text):
    if "-" in text:
        lo, hi = (int(v) for v in text.split("-"))
        return tuple(range(lo, hi + 1))
    return tuple(int(v) for v in text.split(","))


def cmd_gen(args):
    cfg = ExperimentConfig(n_points=args.n, margin=args.margin, seed=args.seed)
    X, y, P = generate_instance(args.dim, cfg, make_rng(args.seed, 0))
    points_to_csv(X, y, args.out)
    if args.target:
        save_model(P, args.target, gamma=args.margin)
    _emit(args, {"points": int(X.shape[0]), "positives": int(np.sum(y == 1)), "halfspaces": len(P)})
    return EXIT_OK


def cmd_learn(args):
    X, y = points_from_csv(args.inp)
    try:
        if args.algo == "heuristic":
            P = heuristic_learn(X, y, args.M, make_rng(args.seed, 0))
            gamma = 0.0
        else:
            if args.gamma is None:
                raise SystemExit("--gamma is required for enumerate and greedy")
            if args.algo == "enumerate" and not args.t:
                raise SystemExit("--t is required for enumerate")
            cfg = LearnerConfig(gamma=args.gamma, t_hint=args.t, candidate_budget=args.budget,
                                jl_dim=args.jl_dim, seed=args.seed)
            C = build_candidates(X, y, cfg)
            log.info("%d candidates from %d directions x %d offsets", len(C), C.net_size, C.grid_size)
            if args.algo == "greedy":
                P = greedy_polytope(X, y, args.gamma, C, iteration_cap=cfg.iteration_cap(len(y)))
            else:
                P = enumerate_t_polytope(X, y, args.gamma, args.t, C)
            gamma = args.gamma
    except (LearningFailure, CombinatorialBlowup) as e:
        print(f"learning failed: {e}", file=sys.stderr)
        return EXIT_FAIL
    save_model(P, args.out, gamma=gamma)
    _emit(args, {"halfspaces": len(P), "points": int(len(y))})
    return EXIT_OK


def cmd_eval(args):
    P, g = load_model(args.model)
    X, y = points_from_csv(args.inp)
    gamma = args.gamma if args.gamma is not None else (g or 0.0)
    _emit(args, evaluate(P, X, y, gamma))
    return EXIT_OK


def cmd_bounds(args):
    need = {"vc-h": ("gamma",), "vc-p": ("d", "t", "gamma"), "vc-env": ("d", "t", "gamma"),
            "gen-err": ("m", "dvc", "delta"), "sample-size": ("t", "gamma", "eps", "delta")}[args.what]
    missing = [n for n in need if getattr(args, n) is None]
    if missing:
        raise SystemExit(f"--what {args.what} needs " + ", ".join("--" + n for n in missing))
    a = args
    value = {
        "vc-h": lambda: bounds.vc_fat_hyperplane(a.gamma),
        "vc-p": lambda: bounds.vc_fat_polytope(a.d, a.t, a.gamma),
        "vc-env": lambda: bounds.vc_envelope_polytope(a.d, a.t, a.gamma),
        "gen-err": lambda: bounds.generalization_error(a.m, a.dvc, a.delta),
        "sample-size": lambda: bounds.pac_sample_size(a.t, a.gamma, a.eps, a.delta),
    }[args.what]()
    record = {"what": args.what, "value": value}
    record.update({n: getattr(args, n) for n in need})
    record.update(bounds.conventions())
    _emit(args, record)
    return EXIT_OK


def cmd_verify(args):
    P, g = load_model(args.model)
    gamma = args.gamma if args.gamma is not None else g
    rng = make_rng(args.seed, 0)
    record = {"check": args.check}
    if args.check == "inner-identity":
        bad = verify_inner_identity(P, gamma, args.samples, rng)
    elif args.check == "margin-envelope":
        try:
            bad = verify_margin_in_envelope(P, gamma, args.samples, rng)
        except ValueError as e:
            print(f"check not applicable: {e}", file=sys.stderr)
            return EXIT_FAIL
    elif args.check == "no-reenter":
        Q = ExpandingPolytope.unit(P)
        times = np.linspace(0.0, args.horizon, 1000)
        p0 = sample_unit_ball(P.dim, rng, size=args.samples)
        V = sample_unit_sphere(P.dim, rng, size=args.samples) * rng.uniform(0, 5, size=(args.samples, 1))
        bad = sum(not no_reenter_check(Q, p, v, times) for p, v in zip(p0, V))
    else:
        Q = ExpandingPolytope.unit(P)
        times = np.linspace(0.0, args.horizon, 6)
        prof = hausdorff_speed_profile(Q, times, args.step, args.samples, rng, box=args.box)
        bad = int(np.sum(np.diff(prof) > MONOTONE_TOL))
        record["profile"] = [float(v) for v in prof]
    record["violations"] = int(bad)
    _emit(args, record)
    return EXIT_OK if bad == 0 else EXIT_FAIL


def cmd_fig3(args):
    cfg = ExperimentConfig(dims=_dims(args.dims), n_points=args.n, margin=args.margin,
                           M=args.M, trials=args.trials, seed=args.seed)
    text = fig3_csv(run_fig3(cfg, n_jobs=args.threads))
    if args.out:
        with open(args.out, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _read_edges(path):
    edges, top = [], -1
    with open(path) as f:
        for line in f:
            line = line.split("#")[0].strip()
            if not line:
                continue
            i, j = (int(v) for v in line.replace(",", " ").split())
            edges.append((i, j))
            top = max(top, i, j)
    return edges, top + 1


def cmd_reduce(args):
    edges, n = _read_edges(args.edges)
    G = Graph(max(n, args.n or 0), edges)
    X, y = graph_to_instance(G)
    points_to_csv(X, y, args.out)
    _emit(args, {"vertices": G.n, "edges": len(G.edges), "points": int(len(y))})
    return EXIT_OK


def cmd_lp(args):
    A = np.atleast_2d(np.loadtxt(args.A, delimiter=",", ndmin=2))
    b = np.atleast_1d(np.loadtxt(args.b, delimiter=",")).ravel()
    try:
        x = lp_strict_solve(StrictLp(A, b)) if args.strict else lp_solve(A, b)
    except InfeasibleOrTimeout as e:
        print(f"infeasible or timeout: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except DegenerateSystem as e:
        print(f"degenerate: {e}", file=sys.stderr)
        return EXIT_DEGENERATE
    _emit(args, {"x": [float(v) for v in x]} if args.fmt == "json" else
          {f"x{i + 1}": float(v) for i, v in enumerate(x)})
    return EXIT_OK


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--threads", type=int, default=argparse.SUPPRESS)
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", default=argparse.SUPPRESS)
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", default=argparse.SUPPRESS)
    p.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="fatpoly", parents=[common],
                                     description="Learn margin-separated polytopes and check their geometry.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="random polytope-labeled points")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.add_argument("--target", help="also write the target polytope as JSON")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("learn", parents=[common], help="fit a polytope to labeled points")
    p.add_argument("--algo", choices=("enumerate", "greedy", "heuristic"), default="greedy")
    p.add_argument("--gamma", type=float)
    p.add_argument("--t", type=int)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--budget", type=int, help="number of net directions")
    p.add_argument("--jl-dim", default="auto", type=lambda s: s if s == "auto" else int(s))
    p.add_argument("--M", type=int, default=10_000, help="heuristic directions per round")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("eval", parents=[common], help="confusion counts of a model on points")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--gamma", type=float)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bounds", parents=[common], help="VC and sample-size calculators")
    p.add_argument("--what", choices=("vc-h", "vc-p", "vc-env", "gen-err", "sample-size"), required=True)
    for name, typ in (("d", int), ("t", int), ("gamma", float), ("m", int), ("dvc", float),
                      ("eps", float), ("delta", float)):
        p.add_argument(f"--{name}", type=typ)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify-geometry", parents=[common], help="Monte-Carlo margin/envelope checks")
    p.add_argument("--check", choices=("inner-identity", "margin-envelope", "no-reenter", "hausdorff-speed"),
                   required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--horizon", type=float, default=0.5, help="largest expansion time")
    p.add_argument("--step", type=float, default=0.01, help="time step of the speed estimate")
    p.add_argument("--box", type=float, default=4.0, help="sampling box half-width")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench-fig3", parents=[common], help="heuristic halfspace counts per dimension")
    p.add_argument("--dims", default="2-20")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--margin", type=float, default=0.05)
    p.add_argument("--M", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fig3)

    p = sub.add_parser("reduce-graph", parents=[common], help="graph edge list to labeled points")
    p.add_argument("--edges", required=True, help="one 'i j' pair per line")
    p.add_argument("--n", type=int, help="vertex count (default: largest id + 1)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("lp-solve", parents=[common], help="solve A x <= b (or A x < b) via separation")
    p.add_argument("--A", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_lp)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    for name, default in (("seed", 0), ("threads", 1), ("fmt", None), ("verbose", False)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
