"""``metamorph <transform|verify|beam|invert>``.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O or
numeric error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ReferenceSheet, SampledField
from .exceptions import MetamorphError, ScenarioError
from .helmholtz import reconstruct_physical_field, residual_ratio
from .io import export_field_csv, export_heatmap, format_float, import_field_csv, load_scenario
from .transform import forward_grid, inverse

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_ERROR = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class CommandOutcome:
    exit_code: int = EXIT_OK
    lines: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    def say(self, line):
        self.lines.append(line)
        print(line)


def _common(p):
    p.add_argument("--hbar", type=float, default=None, help="override hbar (default: scenario value, else 1)")
    p.add_argument("--seed", type=int, default=42, help="seed for random probe points (default 42)")
    p.add_argument("--tol-scale", type=float, default=1.0, help="multiply every tolerance by this factor")
    p.add_argument("--json-report", type=Path, default=None, help="write a machine-readable report here")


def build_parser():
    parser = _Parser(prog="metamorph", description="Phase-space transform toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("transform", help="transform a source on a sheet grid and write CSV")
    p.add_argument("scenario", type=Path)
    p.add_argument("output", type=Path)
    _common(p)

    p = sub.add_parser("verify", help="run self-verification suites")
    p.add_argument("suite", nargs="?", default="all", choices=["all", "closed-forms", "annihilators", "roundtrip", "helmholtz"])
    p.add_argument("--debug-swap-br", action="store_true", help="swap the b and r derivative slots (negative control)")
    p.add_argument("--fast", action="store_true", help="smaller beam grids in the helmholtz suite")
    _common(p)

    p = sub.add_parser("beam", help="synthesise a Gaussian beam, write CSV and PGM")
    p.add_argument("scenario", type=Path)
    p.add_argument("prefix", type=Path)
    _common(p)

    p = sub.add_parser("invert", help="recover source values from a sheet field CSV")
    p.add_argument("field", type=Path)
    p.add_argument("output", type=Path)
    p.add_argument("--u", type=float, nargs="*", default=None, help="sample points (default: scenario 'u' or none)")
    p.add_argument("--sheet", type=float, nargs=2, metavar=("B0", "R0"), default=None)
    p.add_argument("--scenario", type=Path, default=None, help="invert scenario supplying sheet, hbar and u")
    _common(p)
    return parser


def _hbar(args, default):
    return default if args.hbar is None else args.hbar


def cmd_transform(args, out: CommandOutcome):
    sc = load_scenario(args.scenario)
    if sc.kind != "transform":
        raise ScenarioError(f"kind: expected 'transform', got {sc.kind!r}")
    hbar = _hbar(args, sc.hbar)
    F = forward_grid(sc.source_function(), sc.grid, sc.sheet, hbar, sc.quadrature)
    export_field_csv(F, args.output)
    mag = np.abs(F.values)
    out.say(f"wrote {F.grid.size} nodes to {args.output}")
    out.say(f"|F| min {mag.min():.6g} max {mag.max():.6g}")


def cmd_verify(args, out: CommandOutcome):
    from .verify import run_suites

    index_map = ("x", "y", "r", "b") if args.debug_swap_br else ("x", "y", "b", "r")
    results = run_suites(
        args.suite, hbar=_hbar(args, 1.0), seed=args.seed, tol_scale=args.tol_scale, index_map=index_map, fast=args.fast
    )
    width = max(len(r.name) for _, r in results) + 2
    out.say(f"{'check'.ljust(width)}{'residual':>12}  {'tolerance':>10}  result")
    for suite, r in results:
        op = ">=" if r.lower_bound else "<="
        out.say(f"{r.name.ljust(width)}{r.residual:12.3e}  {op}{r.tolerance:8.1e}  {'PASS' if r.passed else 'FAIL'}")
        out.checks.append(dict(r.as_dict(), suite=suite))
    failed = sum(not r.passed for _, r in results)
    out.say(f"{len(results) - failed}/{len(results)} checks passed")
    if failed:
        out.exit_code = EXIT_FAIL


def cmd_beam(args, out: CommandOutcome):
    sc = load_scenario(args.scenario)
    if sc.kind != "beam":
        raise ScenarioError(f"kind: expected 'beam', got {sc.kind!r}")
    if len(sc.grid.axes) != 2:
        raise ScenarioError("grid: a beam needs exactly two axes")
    F = reconstruct_physical_field(sc.beam, sc.grid)
    prefix = str(args.prefix)
    export_field_csv(F, prefix + ".csv")
    export_heatmap(F, "magnitude", prefix + ".pgm")
    export_heatmap(F, "phase", prefix + "_phase.pgm")
    ratio = residual_ratio(F, sc.beam.k)
    tol = sc.tolerance * args.tol_scale
    passed = ratio <= tol
    out.say(f"wrote {prefix}.csv, {prefix}.pgm, {prefix}_phase.pgm ({F.meta['nodes']} wave-number nodes)")
    out.say(f"max interior |lap u + k^2 u| / (k^2 max|u|) = {ratio:.3e} (tolerance {tol:.1e}) {'PASS' if passed else 'FAIL'}")
    out.checks.append({"name": "beam Helmholtz residual", "residual": ratio, "tolerance": tol, "passed": passed})
    if not passed:
        out.exit_code = EXIT_FAIL


def cmd_invert(args, out: CommandOutcome):
    sc = load_scenario(args.scenario) if args.scenario else None
    F = import_field_csv(args.field)
    if F.grid.labels != ("x", "y"):
        raise UsageError(f"{args.field}: expected a field over (x, y), got {F.grid.labels}")
    if args.sheet is not None:
        sheet = ReferenceSheet(*args.sheet)
    elif sc is not None and "sheet" in sc.raw and sc.kind == "invert":
        sheet = sc.sheet
    else:
        sheet = F.sheet
    if sheet is None:
        raise UsageError(f"{args.field}: no sheet metadata; pass --sheet B0 R0 or an invert scenario")
    hbar = _hbar(args, F.hbar if sc is None else sc.hbar)
    F = SampledField(F.grid, F.values, kind="phase", hbar=hbar, sheet=sheet)
    u = args.u if args.u is not None else (sc.u if sc is not None else [])
    u = np.asarray(u, dtype=float)
    vals = inverse(F, u, sheet, hbar) if len(u) else np.empty(0, dtype=complex)
    lines = ["u,re,im"] + [f"{format_float(a)},{format_float(v.real)},{format_float(v.imag)}" for a, v in zip(u, vals)]
    with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    out.say(f"wrote {len(u)} samples to {args.output}")


COMMANDS = {"transform": cmd_transform, "verify": cmd_verify, "beam": cmd_beam, "invert": cmd_invert}


def _write_report(path, args, out: CommandOutcome):
    report = {"command": args.command, "exit_code": out.exit_code, "lines": out.lines, "checks": out.checks}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")


def main(argv=None) -> int:
    out = CommandOutcome()
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        if args.tol_scale <= 0:
            raise UsageError("--tol-scale must be positive")
        COMMANDS[args.command](args, out)
    except (UsageError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        out.exit_code = EXIT_USAGE
    except (MetamorphError, OSError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        out.exit_code = EXIT_ERROR
    if args.json_report is not None:
        try:
            _write_report(args.json_report, args, out)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_ERROR
    return out.exit_code


if __name__ == "__main__":
    sys.exit(main())
