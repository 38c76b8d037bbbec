#!/usr/bin/env python3
"""
Replay the worked examples from fixtures/ and check the expected numbers.

    python reproduce_examples.py [-v] [--svg-dir figures]

Exits non-zero if any check fails.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from polycontain import approximate, containment, metrics, oracle, render, serialization
from polycontain.geometry import AHPolytope

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join(HERE, "fixtures")


def fixture(name):
    return serialization.load(os.path.join(FIXTURES, name))


class Report:
    def __init__(self):
        self.failures = 0

    def check(self, label, ok, detail=""):
        mark = "✅" if ok else "❌"
        print(f"  {mark} {label}{': ' + detail if detail else ''}")
        if not ok:
            self.failures += 1


def example_zonotope_containment(report, expected, svg_dir):
    print("\n📐 zonotope containment")
    Zx, Zy, Zy_star = fixture("ex1_zx.json"), fixture("ex1_zy.json"), fixture("ex1_zy_star.json")
    for method in (containment.ZONOTOPE, containment.AH_IN_AH):
        full = containment.contains(Zx, Zy, method=method)
        dropped = containment.contains(Zx, Zy_star, method=method)
        report.check(f"{method}: Zx inside Zy", full.verdict == expected["verdict"], full.verdict)
        report.check(f"{method}: last column dropped", not dropped.contained, dropped.verdict)
    if svg_dir:
        render.render_2d([Zy, Zx], os.path.join(svg_dir, "zonotopes.svg"))
        render.render_2d([Zy_star, Zx], os.path.join(svg_dir, "zonotopes_dropped.svg"))


def example_counterexample(report, expected):
    print("\n🔍 encoding loss on a 3-D pair")
    Zx, Zy = fixture("ex2_zx.json"), fixture("ex2_zy.json")
    tol = expected["tol"]
    report.check("vertex oracle says contained", oracle.containment_oracle(Zx, Zy))
    report.check("encoding fails at scale 1", not containment.contains(Zx, Zy, method=containment.ZONOTOPE).contained)
    record = oracle.loss_for_pair(Zx, Zy)
    report.check("max scaling", abs(record.lambda_encoding - expected["max_scaling"]) <= tol,
                 f"{record.lambda_encoding:.5f}")
    report.check("loss", abs(record.loss - expected["loss"]) <= tol, f"{record.loss:.5f}")


def example_minkowski(report, expected, svg_dir):
    print("\n➕ Minkowski-sum circumbody")
    P1, P2, P_sum = fixture("ex3_p1.json"), fixture("ex3_p2.json"), fixture("ex3_psum.json")
    lam, _ = containment.max_scaling(P_sum, [P1, P2], kind=containment.SUM)
    report.check("max scaling", abs(lam - expected["max_scaling"]) <= expected["tol"], f"{lam:.4f}")
    if svg_dir:
        render.render_2d([P1, P2], os.path.join(svg_dir, "minkowski_parts.svg"))
        render.render_2d([P_sum], os.path.join(svg_dir, "minkowski_sum.svg"))


def example_hausdorff(report, expected):
    print("\n📏 Hausdorff bounds")
    Zx, Zy_star = fixture("ex1_zx.json"), fixture("ex1_zy_star.json")
    tol = expected["tol"]
    for label, result in (("generic", metrics.hausdorff_upper(Zy_star, Zx)),
                          ("zonotope", metrics.zonotope_hausdorff_upper(Zy_star, Zx))):
        got = (result.d12_upper, result.d21_upper, result.d_upper)
        want = (expected["d12"], expected["d21"], expected["d_upper"])
        report.check(f"{label} (d12, d21, d)", np.allclose(got, want, atol=tol),
                     ", ".join(f"{v:.4f}" for v in got))


def example_order_reduction(report, svg_dir):
    print("\n✂️  order reduction 12 -> 4 generators")
    Z = fixture("ex5_order6.json")
    cfg = approximate.AlternationConfig(max_iters=30)
    for reducer in (approximate.reduce_outer, approximate.reduce_inner):
        reduced, trace = reducer(Z, 4, cfg)
        bounds = trace.bounds
        report.check(f"{reduced.mode}: bounds non-increasing", bool(np.all(np.diff(bounds) <= 1e-9)),
                     f"{bounds[0]:.4f} -> {bounds[-1]:.4f} in {trace.iterations} iterations")
        pair = (Z, reduced.zonotope) if reduced.mode == approximate.OUTER else (reduced.zonotope, Z)
        report.check(f"{reduced.mode}: containment holds", oracle.containment_oracle(*pair))
        if svg_dir:
            render.render_trace(trace, Z, os.path.join(svg_dir, f"reduce_{reduced.mode}"))


def example_projection(report, expected, svg_dir):
    print("\n🎯 projection of the MPC feasible set")
    A = np.array([[1.0, 0.1], [-0.1, 1.0]])
    B = np.array([[0.0], [0.1]])
    F = approximate.mpc_feasible_set(A, B, expected["horizon"])
    report.check("hyperplanes in F", F.num_rows == expected["rows"], str(F.num_rows))
    cfg = approximate.AlternationConfig(max_iters=10)
    for rows in (4, 6):
        X, eps, trace = approximate.project_inner(F, 2, rows, cfg=cfg)
        report.check(f"{rows} rows: bounds non-increasing", bool(np.all(np.diff(trace.bounds) <= 1e-9)),
                     f"eps {eps:.4f}")
        if svg_dir:
            projection = AHPolytope(np.zeros(2), np.hstack([np.eye(2), np.zeros((2, F.dim - 2))]), F)
            render.render_trace(trace, projection, os.path.join(svg_dir, f"projection_{rows}"))


def main():
    parser = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--svg-dir", help="also write the figures here")
    parser.add_argument("--skip-slow", action="store_true", help="skip reduction and projection")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    with open(os.path.join(FIXTURES, "expected.json"), "r") as f:
        expected = json.load(f)
    if args.svg_dir:
        os.makedirs(args.svg_dir, exist_ok=True)

    print("🚀 polycontain worked examples")
    print("=" * 50)
    report = Report()
    example_zonotope_containment(report, expected["ex1"], args.svg_dir)
    example_counterexample(report, expected["ex2"])
    example_minkowski(report, expected["ex3"], args.svg_dir)
    example_hausdorff(report, expected["ex4"])
    if not args.skip_slow:
        example_order_reduction(report, args.svg_dir)
        example_projection(report, expected["mpc"], args.svg_dir)
    print("=" * 50)
    if report.failures:
        print(f"❌ {report.failures} check(s) failed")
        return 1
    print("✅ all checks passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
