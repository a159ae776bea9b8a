"""Command line front end.

    reachplan solve <scenario> [--out DIR] [--svg] [--verbose]
    reachplan distfield <scenario> --grid H [--out DIR]
    reachplan check-grad <scenario> [--trials K]

A scenario argument is a file path, or the name of a bundled scenario such as
``test5-soft``.  Exit status: 0 success, 1 invalid scenario or settings,
2 file could not be read or written.
"""
from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from . import eikonal, geometry, objective, optimize, output, scenario
from .errors import ParseError, ReachplanError

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


def _load(arg: str) -> scenario.ScenarioFile:
    if not os.path.exists(arg) and arg in scenario.bundled_names():
        return scenario.bundled_scenario(arg)
    return scenario.load_scenario(arg)


def _solve(args) -> int:
    sf = _load(args.scenario)
    settings = dataclasses.replace(sf.settings, verbose=args.verbose)
    report = optimize.descend(sf.scenario, settings)
    written = output.write_run(args.out, sf.scenario, report)
    if args.svg or sf.svg:
        p = os.path.join(args.out, "plot.svg")
        output.emit_svg(p, sf.scenario, report.u_star)
        written.append(p)
    b = report.final_breakdown
    print(f"tip error        {report.tip_error:.6e}")
    print(f"max penetration  {report.max_penetration:.6e}")
    print(f"cost             {b.total:.6e}  (control {b.control_cost:.6e}, tip {b.tip_cost:.6e}, "
          f"obstacle {b.obstacle_cost:.6e})")
    print(f"rounds           {len(report.rounds)}, inner iterations {sum(report.inner_iterations)}")
    if report.did_not_converge:
        print("warning: some rounds stopped at max_inner before meeting tol", file=sys.stderr)
    for p in written:
        print(f"wrote {p}")
    return EXIT_OK


def _distfield(args) -> int:
    sf = _load(args.scenario)
    ob = sf.scenario.obstacle
    if isinstance(ob, geometry.Sampled) or any(isinstance(m, geometry.Sampled) for m in geometry.members(ob)):
        ob = geometry.Union(tuple(m.source if isinstance(m, geometry.Sampled) else m
                                  for m in geometry.members(ob)))
    if geometry.bounding_box(ob) is None:
        print("error: the scenario has no obstacles", file=sys.stderr)
        return EXIT_INVALID
    field = eikonal.distance_field(ob, args.grid)
    os.makedirs(args.out, exist_ok=True)
    p = os.path.join(args.out, "distfield.csv")
    output.write_field(p, field)
    g = field.grid
    print(f"grid {g.nx} x {g.ny}, h = {g.spacing:g}, inside nodes {int(field.inside_mask.sum())}")
    print(f"wrote {p}")
    return EXIT_OK


def _check_grad(args) -> int:
    sf = _load(args.scenario)
    res = objective.check_gradient(sf.scenario, trials=args.trials, seed=args.seed)
    print(f"max relative error {res.max_error:.3e} over {len(res.errors)} controls "
          f"({res.rejected} near-kink draws skipped)")
    return EXIT_OK


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="reachplan", description="Obstacle-aware reachability for planar arms.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimise the controls and write CSV (and SVG) results")
    p.add_argument("scenario")
    p.add_argument("--out", default="out")
    p.add_argument("--svg", action="store_true", help="also write plot.svg")
    p.add_argument("--verbose", action="store_true", help="per-round progress on stderr")
    p.set_defaults(func=_solve)

    p = sub.add_parser("distfield", help="fast-march the obstacle depth field")
    p.add_argument("scenario")
    p.add_argument("--grid", type=_positive, required=True, help="grid spacing h")
    p.add_argument("--out", default="out")
    p.set_defaults(func=_distfield)

    p = sub.add_parser("check-grad", help="compare the analytic gradient with finite differences")
    p.add_argument("scenario")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_check_grad)
    return ap


def run_cli(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParseError, ReachplanError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main(argv=None) -> None:
    sys.exit(run_cli(argv))
