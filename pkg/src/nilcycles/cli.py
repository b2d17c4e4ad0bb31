"""Command line front end: ``nilcycles analyze|plan|verify|bound``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .analysis import DEFAULT_RATIO, InvalidDegree, UndeterminedAtTruncation, analyze, cycle_upper_bound
from .branch import MalformedSystem
from .cycles import (
    InsufficientReturns,
    count_cycles,
    write_scan_csv,
    write_trajectory_csv,
)
from .families import MissingParameter, Schedule, check_schedule
from .flow import FlowConfig, first_return
from .series import as_rational
from .specfile import SpecError, emit_inline_spec, load_spec

EXIT_ERROR = 2


def _annulus(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError("annulus must look like r_min:r_max") from None
    if not 0 < lo < hi:
        raise argparse.ArgumentTypeError("annulus needs 0 < r_min < r_max")
    return lo, hi


def _ratio(text: str) -> Fraction:
    try:
        return as_rational(text)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilcycles", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, numeric=False):
        sp.add_argument("spec", help="JSON system description")
        sp.add_argument("--order", type=int, help="truncation order of the branch series")
        sp.add_argument("--ratio", type=_ratio, help="separation ratio used for '<<' (rational)")
        sp.add_argument("--out", type=Path, help="directory for report.json and CSV files")
        if numeric:
            sp.add_argument("--annulus", type=_annulus, help="r_min:r_max")
            sp.add_argument("--samples", type=int, help="number of log-spaced radii")
            sp.add_argument("--rel-tol", type=float, dest="rel_tol")
            sp.add_argument("--workers", type=int, help="threads for the radius scan")

    a = sub.add_parser("analyze", help="multiplicity, betas and node/focus classification")
    common(a)
    a.add_argument("--emit-spec", type=Path, help="also write the system as an inline spec file")
    common(sub.add_parser("plan", help="check a stability-reversal schedule"))
    common(sub.add_parser("verify", help="count limit cycles numerically"), numeric=True)
    b = sub.add_parser("bound", help="upper bound n^2+n-1 for degree 2n+1")
    b.add_argument("degree", type=int)
    b.add_argument("--out", type=Path)
    return p


def _option(args, spec, name, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    return spec.options.get(name, default)


def _emit(report: dict, out: Path | None) -> None:
    text = json.dumps(report, indent=2)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(text + "\n")
    print(text)


def cmd_analyze(args) -> dict:
    spec = load_spec(args.spec)
    order = _option(args, spec, "order")
    report = analyze(spec.system, order)
    doc = {"command": "analyze", **report.to_dict()}
    if spec.family is not None:
        doc["family"] = spec.family.name
        doc["point"] = {k: str(v) for k, v in spec.point.items()}
    if args.emit_spec is not None:
        opts = {"order": report.order}
        args.emit_spec.write_text(json.dumps(emit_inline_spec(spec.system, opts), indent=2) + "\n")
    return doc


def cmd_plan(args) -> dict:
    spec = load_spec(args.spec)
    if spec.family is None:
        raise SpecError("plan needs a family spec with a schedule")
    ratio = args.ratio if args.ratio is not None else spec.schedule_ratio or DEFAULT_RATIO
    schedule = Schedule.of([(p, spec.point[p]) for p in spec.family.params], ratio)
    plan = check_schedule(spec.family, schedule, _option(args, spec, "order"))
    return {"command": "plan", **plan.to_dict()}


def _flow_config(args, spec) -> FlowConfig:
    o = spec.options
    cfg = FlowConfig()
    changes = {}
    for key in ("rel_tol", "abs_tol", "max_time", "max_step", "inner_cutoff", "radius_tol", "workers"):
        value = getattr(args, key, None)
        if value is None:
            value = o.get(key)
        if value is not None:
            changes[key] = value
    return cfg.with_(**changes) if changes else cfg


def cmd_verify(args) -> dict:
    spec = load_spec(args.spec)
    annulus = args.annulus or tuple(spec.options.get("annulus", (0.01, 0.5)))
    samples = _option(args, spec, "samples", 64)
    cfg = _flow_config(args, spec)
    try:
        rep = count_cycles(spec.system, annulus, samples, cfg)
    except InsufficientReturns as exc:
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            write_scan_csv(args.out / "scan.csv", exc.samples)
        raise
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_scan_csv(args.out / "scan.csv", rep.samples)
        r0 = rep.refined_radii[0] if rep.refined_radii else annulus[0]
        _, traj = first_return(spec.system, r0, cfg, record=True)
        write_trajectory_csv(args.out / "trajectory.csv", traj)
    return {"command": "verify", **rep.to_dict()}


def cmd_bound(args) -> dict:
    return {"command": "bound", "degree": args.degree, "bound": cycle_upper_bound(args.degree)}


COMMANDS = {"analyze": cmd_analyze, "plan": cmd_plan, "verify": cmd_verify, "bound": cmd_bound}

ERRORS = (
    SpecError, MalformedSystem, UndeterminedAtTruncation, InsufficientReturns,
    InvalidDegree, MissingParameter, OSError,
)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report = COMMANDS[args.command](args)
    except ERRORS as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(json.dumps(err), file=sys.stderr)
        return EXIT_ERROR
    if args.command == "bound" and args.out is None:
        print(report["bound"])
        return 0
    _emit(report, args.out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
