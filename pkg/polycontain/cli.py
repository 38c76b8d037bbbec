"""
Command-line front end.

    polycontain contain --inbody X.json --circumbody Y.json [--method auto]
    polycontain hausdorff A.json B.json [--lower 1000]
    polycontain reduce Z.json --order 2 --mode outer [--trace t.csv] [--frames dir]
    polycontain project F.json --n 2 --rows 6 [--center 0,0]
    polycontain loss-experiment --trials 500 --out losses.csv --summary summary.json
    polycontain render A.json [B.json ...] --out figure.svg

Results go to stdout as JSON. Exit status: 0 on success, 1 when ``contain``
does not certify, 2 on bad input, 3 on solver or resource failures.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

import numpy as np

from polycontain import approximate, containment, metrics, oracle, render, serialization
from polycontain.config import SOLVERS, get_settings, set_settings
from polycontain.errors import InvalidInputError, PolycontainError
from polycontain.geometry import AHPolytope, HPolytope, Zonotope

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NOT_CERTIFIED = 1
EXIT_INPUT = 2
EXIT_FAILURE = 3

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# short names accepted by --method
METHOD_ALIASES = {
    "lemma1": containment.H_IN_H,
    "cor2": containment.AH_IN_H,
    "thm1": containment.AH_IN_AH,
    "thm3": containment.ZONOTOPE,
    "prop2": containment.SUM_INBODY,
    "prop3": containment.SUM_CIRCUMBODY,
    "prop4": containment.H_HULL,
    "cor4": containment.HULL,
    "prop5": containment.DISJUNCTIVE,
    "cor5": containment.ZONOTOPE_HULL,
    "cor6": containment.ZONOTOPE_DISJUNCTIVE,
}


def _method(value: str) -> str:
    return METHOD_ALIASES.get(value.lower(), value)


def _emit(payload: dict):
    print(json.dumps(payload, indent=2))


def _load_sets(paths: Sequence[str]) -> List:
    out = []
    for path in paths:
        loaded = serialization.load_any(path)
        out.extend(loaded if isinstance(loaded, list) else [loaded])
    return out


def _require(s, kind, path: str, what: str):
    if not isinstance(s, kind):
        raise InvalidInputError(f"{path}: {what} must be a {kind.__name__}, got {type(s).__name__}")
    return s


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as err:
        raise InvalidInputError(f"expected comma-separated numbers, got {text!r}") from err


def _alternation_config(args) -> approximate.AlternationConfig:
    return approximate.AlternationConfig(max_iters=args.max_iters, max_entry_step=args.step,
                                         seed=get_settings().seed)


# ---------------------------------------------------------------- commands

def cmd_contain(args) -> int:
    inbody = _load_sets(args.inbody)
    circumbody = _load_sets(args.circumbody)
    inb = inbody if len(inbody) > 1 else inbody[0]
    circ = circumbody if len(circumbody) > 1 or args.kind != containment.SINGLE else circumbody[0]
    result = containment.contains(inb, circ, method=args.method, kind=args.kind)
    payload = {"verdict": result.verdict, "method": result.method}
    if args.scaling:
        lam, _ = containment.max_scaling(inb, circ, method=args.method, kind=args.kind)
        payload["max_scaling"] = lam
    _emit(payload)
    if args.out and result.certificate is not None:
        result.certificate.save(args.out)
        _log.info("certificate written to %s", args.out)
    return EXIT_OK if result.contained else EXIT_NOT_CERTIFIED


def cmd_hausdorff(args) -> int:
    X1 = serialization.load(args.first)
    X2 = serialization.load(args.second)
    ball = None
    if args.ball:
        ball = _require(serialization.load(args.ball), HPolytope, args.ball, "the ball")
    if args.lower > 0:
        result = metrics.hausdorff_bounds(X1, X2, directions=args.lower, ball=ball)
    else:
        result = metrics.hausdorff_upper(X1, X2, ball)
    _emit(result.to_dict())
    return EXIT_OK


def cmd_reduce(args) -> int:
    Z = _require(serialization.load(args.zonotope), Zonotope, args.zonotope, "the input")
    if args.cols is not None:
        target = args.cols
    else:
        target = args.order * Z.dim
        if abs(target - round(target)) > 1e-9:
            raise InvalidInputError(f"order {args.order} times dimension {Z.dim} is not a column count")
        target = int(round(target))
    cfg = _alternation_config(args)
    reducer = approximate.reduce_outer if args.mode == approximate.OUTER else approximate.reduce_inner
    reduced, trace = reducer(Z, target, cfg)
    if args.trace:
        trace.to_csv(args.trace)
    if args.frames:
        render.render_trace(trace, Z, args.frames)
    if args.out:
        serialization.save(reduced.zonotope, args.out)
    _emit({"mode": reduced.mode, "cols": reduced.zonotope.num_generators, "bound": reduced.bound,
           "iterations": trace.iterations, "converged": trace.converged})
    return EXIT_OK


def cmd_project(args) -> int:
    F = _require(serialization.load(args.polytope), HPolytope, args.polytope, "the lifted set")
    center = None if args.center is None else _vector(args.center)
    cfg = _alternation_config(args)
    X, eps, trace = approximate.project_inner(F, args.n, args.rows, center=center, cfg=cfg)
    if args.trace:
        trace.to_csv(args.trace)
    if args.frames:
        projection = AHPolytope(np.zeros(args.n), np.hstack([np.eye(args.n), np.zeros((args.n, F.dim - args.n))]), F)
        render.render_trace(trace, projection, args.frames)
    if args.out:
        serialization.save(X, args.out)
    _emit({"rows": X.num_rows, "bound": eps, "iterations": trace.iterations, "converged": trace.converged})
    return EXIT_OK


def cmd_loss_experiment(args) -> int:
    records, summary = oracle.loss_experiment(n_range=tuple(args.dims), cols_range=(None, args.max_cols),
                                              trials=args.trials, perturb_centers=args.perturb_centers,
                                              lossless_method=args.lossless)
    if args.out:
        oracle.write_records_csv(records, args.out)
    if args.summary:
        with open(args.summary, "w") as f:
            json.dump(summary, f, indent=2)
    _emit({k: summary[k] for k in ("trials", "fraction_below_0.01", "max_loss")})
    return EXIT_OK


def cmd_render(args) -> int:
    sets = _load_sets(args.inputs)
    render.render_2d(sets, args.out, render.Style(labels=args.labels))
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _add_alternation_options(p: argparse.ArgumentParser):
    p.add_argument("--max-iters", type=int, default=100, help="accepted iterates before stopping")
    p.add_argument("--step", type=float, default=0.1, help="initial trust-region radius per entry")
    p.add_argument("--trace", help="CSV of (iteration, bound)")
    p.add_argument("--frames", help="directory for one SVG per accepted iterate (2-D only)")
    p.add_argument("--out", help="JSON file for the result set")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polycontain",
                                     description="Polytope containment, Hausdorff bounds and order reduction")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")
    parser.add_argument("--tol", type=float, help="LP feasibility tolerance")
    parser.add_argument("--solver", choices=SOLVERS, help="LP backend")
    parser.add_argument("--seed", type=int, help="seed for every random choice")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("contain", help="certify inbody ⊆ circumbody")
    p.add_argument("--inbody", action="append", required=True,
                   help="inbody JSON; repeat for a Minkowski sum")
    p.add_argument("--circumbody", action="append", required=True,
                   help="circumbody JSON; repeat for a list combined by --kind")
    p.add_argument("--kind", choices=containment.KINDS, default=containment.SINGLE)
    p.add_argument("--method", type=_method, choices=containment.METHODS, default=containment.AUTO,
                   help="encoding, by name or short name (" + ", ".join(METHOD_ALIASES) + ")")
    p.add_argument("--scaling", action="store_true", help="also report the largest certified scaling")
    p.add_argument("--out", help="certificate JSON")
    p.set_defaults(func=cmd_contain)

    p = sub.add_parser("hausdorff", help="Hausdorff distance bounds")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--lower", type=int, default=0, help="sampled directions for a lower bound (0 to skip)")
    p.add_argument("--ball", help="H-polytope JSON of the unit ball (default: the unit box)")
    p.set_defaults(func=cmd_hausdorff)

    p = sub.add_parser("reduce", help="zonotope order reduction")
    p.add_argument("zonotope")
    target = p.add_mutually_exclusive_group(required=True)
    target.add_argument("--order", type=float, help="target order (columns per dimension)")
    target.add_argument("--cols", type=_positive_int, help="target column count")
    p.add_argument("--mode", choices=(approximate.OUTER, approximate.INNER), default=approximate.OUTER)
    _add_alternation_options(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("project", help="inner H-polytope of a projection")
    p.add_argument("polytope", help="H-polytope JSON over (x, u)")
    p.add_argument("--n", type=_positive_int, required=True, help="number of leading coordinates kept")
    p.add_argument("--rows", type=_positive_int, required=True, help="facets of the inner polytope")
    p.add_argument("--center", help="comma-separated interior point of the projection")
    _add_alternation_options(p)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("loss-experiment", help="randomized loss of the zonotope encoding")
    p.add_argument("--trials", type=_positive_int, default=500)
    p.add_argument("--dims", type=_positive_int, nargs="+", default=[3, 4, 5, 6])
    p.add_argument("--max-cols", type=_positive_int, default=12)
    p.add_argument("--perturb-centers", action="store_true")
    p.add_argument("--lossless", choices=("facets", "vertices"), default="facets")
    p.add_argument("--out", help="per-trial CSV")
    p.add_argument("--summary", help="summary JSON")
    p.set_defaults(func=cmd_loss_experiment)

    p = sub.add_parser("render", help="SVG of 2-D sets")
    p.add_argument("inputs", nargs="*", help="polytope JSON files (a file may hold a list)")
    p.add_argument("--labels", nargs="*")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def _configure(args):
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    changes = {}
    if args.tol is not None:
        changes["feasibility_tol"] = args.tol
    if args.solver is not None:
        changes["solver"] = args.solver
    if args.seed is not None:
        changes["seed"] = args.seed
    if changes:
        set_settings(get_settings().replace(**changes))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    previous = get_settings()
    try:
        _configure(args)
        _log.info("%s: start", args.command)
        status = args.func(args)
        _log.info("%s: done (exit %d)", args.command, status)
        return status
    except InvalidInputError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except PolycontainError as err:
        print(f"failure: {err}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        set_settings(previous)
