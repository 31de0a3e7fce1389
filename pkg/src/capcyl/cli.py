"""Command-line front end.

    capcyl index --scenario dirichlet --r 1 --T 7
    capcyl spectrum --scenario horospheres --r 1 --T 2
    capcyl sweep --scenario dirichlet --r 1 --sweep-param T --start 1 --stop 10 --step 0.5
    capcyl oracle-check --scenario ball --H0 2 --rho 2 --r 0.5
    capcyl bifurcation --r 1 --m-max 3

Exit codes: 0 ok, 1 usage or domain error, 2 disagreement (strict mode or a
failed cross-check), 3 oracle counts not converged under grid doubling.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

import numpy as np

from . import bifurcation, oracle, spectra
from . import geometry as geo
from .errors import DomainError, NoKernelError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DISAGREE = 2
EXIT_NOT_CONVERGED = 3

SCENARIOS = (
    "dirichlet",
    "spheres",
    "horospheres",
    "half-plane",
    "half-horosphere",
    "equidistant",
    "ball",
    "slab-horosphere",
)

_T_SCENARIOS = {
    "dirichlet": geo.Dirichlet,
    "spheres": geo.GeodesicSpheres,
    "horospheres": geo.Horospheres,
    "half-plane": geo.HalfGeodesicPlane,
    "half-horosphere": geo.HalfHorosphere,
}

SPECTRUM_COLUMNS = ("branch", "m", "n", "delta", "lambda")
SWEEP_COLUMNS = (
    "scenario",
    "R",
    "r",
    "T",
    "H0",
    "counted_index",
    "paper_index",
    "lambda_min",
    "threshold_strong",
    "threshold_stable",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --------------------------------------------------------------------------
# Formatting
# --------------------------------------------------------------------------


def fmt6(value) -> str:
    """6 significant digits for CSV cells; blank for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return ""
    text = "%.6g" % value
    return "0" if text == "-0" else text


def _json_number(value):
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return None
    return 0.0 if value == 0.0 else value


def _csv(header, rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt6(cell) if not isinstance(cell, str) else cell for cell in row) for row in rows]
    return "\n".join(lines) + "\n"


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _entry_json(e: spectra.EigenvalueEntry) -> dict:
    return {
        "branch": e.branch,
        "m": e.m,
        "n": e.n,
        "delta": _json_number(e.delta),
        "lambda": _json_number(e.lam),
        "multiplicity": e.multiplicity,
    }


# --------------------------------------------------------------------------
# Config
# --------------------------------------------------------------------------


def _geometry(args) -> Optional[geo.CylinderGeometry]:
    if getattr(args, "scenario", None) == "slab-horosphere":
        if args.R is not None or args.r is not None:
            raise UsageError("slab-horosphere takes no cylinder radius (--R/--r)")
        return None
    if args.R is None and args.r is None:
        raise UsageError("exactly one of --R or --r is required")
    if args.R is not None:
        return geo.cylinder_geometry(args.R)
    return geo.cylinder_geometry_from_r(args.r)


def _require(args, *names):
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name} is required for scenario {args.scenario}")


def _forbid(args, *names):
    for name in names:
        if getattr(args, name) is not None:
            raise UsageError(f"--{name} is not used by scenario {args.scenario}")


def build_scenario(args) -> geo.SupportScenario:
    kind = args.scenario
    angular = args.angular.replace("-", "_")
    if kind in _T_SCENARIOS:
        _require(args, "T")
        _forbid(args, "H0", "rho", "tau")
        return _T_SCENARIOS[kind](args.T, angular_domain=angular)
    if kind == "equidistant":
        _require(args, "T", "H0")
        _forbid(args, "rho", "tau")
        return geo.Equidistant(args.T, H0=args.H0, angular_domain=angular)
    if kind == "ball":
        _require(args, "H0", "rho")
        _forbid(args, "T", "tau")
        return geo.Ball(args.H0, args.rho, angular_domain=angular)
    if kind == "slab-horosphere":
        _require(args, "tau", "T")
        _forbid(args, "H0", "rho")
        if angular != "full":
            raise UsageError("--angular does not apply to slab-horosphere")
        return geo.SlabHorosphere(args.tau, args.T)
    raise UsageError(f"unknown scenario {kind!r}")


def _setup(args):
    geom = _geometry(args)
    scenario = build_scenario(args)
    geo.validate(scenario, geom)
    if args.grid_n is not None and args.grid_n < oracle.MIN_GRID:
        raise UsageError(f"--grid-n must be >= {oracle.MIN_GRID}")
    return scenario, geom


def _length(scenario, geom):
    return geo.scenario_length(scenario, geom)


# --------------------------------------------------------------------------
# index
# --------------------------------------------------------------------------


def cmd_index(args) -> tuple[int, str]:
    scenario, geom = _setup(args)
    report = spectra.index_report(scenario, geom)
    check = None
    code = EXIT_OK
    if args.oracle or args.strict:
        check = oracle.oracle_index(scenario, geom, args.grid_n or oracle.DEFAULT_GRID)
    if args.strict:
        if report.agrees is False or check.count != report.counted_index:
            code = EXIT_DISAGREE
    if check is not None and not check.converged:
        code = EXIT_NOT_CONVERGED
    doc = {
        "scenario": report.scenario,
        "R": _json_number(geom.R) if geom else None,
        "r": _json_number(geom.r) if geom else None,
        "T": _json_number(_length(scenario, geom)),
        "counted_index": report.counted_index,
        "nullity": report.nullity,
        "paper_index": report.paper_index,
        "agrees": report.agrees,
        "weak_index_bounds": list(report.weak_index_bounds),
        "strongly_stable": report.strongly_stable,
        "oracle_index": None if check is None else check.count,
        "oracle_converged": None if check is None else check.converged,
        "negatives": [_entry_json(e) for e in report.negatives],
        "notes": list(report.notes),
    }
    if args.format == "json":
        return code, _dump_json(doc)
    if args.format == "csv":
        rows = [(e.branch, e.m, e.n, e.delta, e.lam) for e in report.negatives]
        return code, _csv(SPECTRUM_COLUMNS, rows)
    lines = [f"scenario: {doc['scenario']}"]
    if geom is not None:
        lines.append(f"R: {fmt6(geom.R)}  r: {fmt6(geom.r)}")
    lines.append(f"T: {fmt6(doc['T'])}")
    lines.append(f"counted_index={report.counted_index}")
    lines.append(f"nullity={report.nullity}")
    lines.append(f"paper_index={fmt6(report.paper_index) or 'n/a'}")
    if report.agrees is not None:
        lines.append("agrees" if report.agrees else "disagrees with closed-form eta formula")
    lines.append(f"weak_index_bounds=[{report.weak_index_bounds[0]}, {report.weak_index_bounds[1]}]")
    if report.strongly_stable:
        lines.append("strongly stable")
    if check is not None:
        lines.append(f"oracle_index={check.count} (grid {check.grid_n}: {check.counts[0]}, grid {2 * check.grid_n}: {check.counts[1]})")
    for e in report.negatives:
        lines.append(f"  {e.branch} m={e.m} n={e.n} delta={fmt6(e.delta)} lambda={fmt6(e.lam)} x{e.multiplicity}")
    return code, "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# spectrum
# --------------------------------------------------------------------------


def cmd_spectrum(args) -> tuple[int, str]:
    scenario, geom = _setup(args)
    if args.m_max < 0 or args.n_max < 0:
        raise UsageError("--m-max and --n-max must be >= 0")
    entries = spectra.spectrum(scenario, geom, args.m_max, args.n_max)
    if args.format == "json":
        return EXIT_OK, _dump_json({"scenario": scenario.kind, "entries": [_entry_json(e) for e in entries]})
    return EXIT_OK, _csv(SPECTRUM_COLUMNS, [(e.branch, e.m, e.n, e.delta, e.lam) for e in entries])


# --------------------------------------------------------------------------
# sweep
# --------------------------------------------------------------------------


def sweep_values(start: float, stop: float, step=None, num=None, spacing: str = "lin") -> list[float]:
    """Inclusive grid from start to stop; empty when the range is empty."""
    if step is not None and num is not None:
        raise UsageError("give either --step or --num, not both")
    if spacing == "log" and (start <= 0.0 or stop <= 0.0):
        raise UsageError("log spacing needs positive --start and --stop")
    if stop < start:
        return []
    if num is not None:
        if num < 0:
            raise UsageError("--num must be >= 0")
        if num == 0:
            return []
        if spacing == "log":
            return [float(v) for v in np.geomspace(start, stop, num)]
        return [float(v) for v in np.linspace(start, stop, num)]
    if step is None:
        raise UsageError("--step or --num is required")
    if spacing == "log":
        if step <= 1.0:
            raise UsageError("log spacing takes a ratio --step > 1")
        count = int(math.floor(math.log(stop / start) / math.log(step) + 1e-9)) + 1
        return [start * step ** k for k in range(count)]
    if step <= 0.0:
        raise UsageError("--step must be > 0")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # start + k*step keeps points reproducible, unlike accumulating sums
    return [start + k * step for k in range(count)]


def thresholds(scenario, geom) -> tuple[Optional[float], Optional[float]]:
    """Lengths at which the index leaves 0 (strong) and leaves {0, 1} (stable)."""
    if geom is None or getattr(scenario, "angular_domain", "full") != "full":
        return None, None
    if isinstance(scenario, geo.Dirichlet):
        return geo.critical_length(geom, "strong"), geo.critical_length(geom, "stable")
    if isinstance(scenario, geo.HalfGeodesicPlane):
        return 0.5 * geo.critical_length(geom, "strong"), geo.critical_length(geom, "half_plane_stable")
    if isinstance(scenario, (geo.GeodesicSpheres, geo.Horospheres)):
        # index >= 1 for every length; it reaches 2 once pi/T < 1/r
        return None, geo.critical_length(geom, "strong")
    return None, None


def _sweep_row(point) -> tuple:
    kind, R, r, T, H0, rho, tau, angular = point
    args = argparse.Namespace(
        scenario=kind, R=None, r=r, T=T, H0=H0, rho=rho, tau=tau, angular=angular, grid_n=None
    )
    geom = _geometry(args)
    scenario = build_scenario(args)
    geo.validate(scenario, geom)
    report = spectra.index_report(scenario, geom)
    strong, stable = thresholds(scenario, geom)
    return (
        kind,
        None if geom is None else geom.R,
        None if geom is None else geom.r,
        _length(scenario, geom),
        H0,
        report.counted_index,
        report.paper_index,
        spectra.lambda_min(scenario, geom),
        strong,
        stable,
    )


def cmd_sweep(args) -> tuple[int, str]:
    values = sweep_values(args.start, args.stop, args.step, args.num, args.spacing)
    base_geom = None
    if args.sweep_param == "T":
        if args.scenario == "ball":
            raise UsageError("the ball length is derived from H0, rho and r; sweep r instead")
        base_geom = _geometry(args)
    else:
        if args.scenario == "slab-horosphere":
            raise UsageError("slab-horosphere has no cylinder radius to sweep")
        if args.R is not None or args.r is not None:
            raise UsageError("--R/--r are set by the sweep")
    points = []
    for v in values:
        if args.sweep_param == "T":
            r = None if base_geom is None else base_geom.r
            points.append((args.scenario, None, r, v, args.H0, args.rho, args.tau, args.angular))
        else:
            points.append((args.scenario, None, v, args.T, args.H0, args.rho, args.tau, args.angular))
    # validate every point before computing anything
    for point in points:
        kind, _, r, T, H0, rho, tau, angular = point
        ns = argparse.Namespace(scenario=kind, R=None, r=r, T=T, H0=H0, rho=rho, tau=tau, angular=angular)
        geom = _geometry(ns)
        geo.validate(build_scenario(ns), geom)
    if args.jobs > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, points))
    else:
        rows = [_sweep_row(p) for p in points]
    if args.format == "json":
        docs = [dict(zip(SWEEP_COLUMNS, (row[0],) + tuple(_json_number(c) for c in row[1:]))) for row in rows]
        return EXIT_OK, _dump_json({"rows": docs})
    return EXIT_OK, _csv(SWEEP_COLUMNS, rows)


# --------------------------------------------------------------------------
# oracle-check
# --------------------------------------------------------------------------


def cmd_oracle_check(args) -> tuple[int, str]:
    scenario, geom = _setup(args)
    grid_n = args.grid_n or 4000
    report = oracle.crosscheck(scenario, geom, args.tol, grid_n)
    count = oracle.oracle_index(scenario, geom, grid_n)
    closed = spectra.index_report(scenario, geom)
    passed = report.passed and count.count == closed.counted_index
    code = EXIT_OK if passed else EXIT_DISAGREE
    if not count.converged:
        code = EXIT_NOT_CONVERGED
    doc = {
        "scenario": report.scenario,
        "grid_n": report.grid_n,
        "compared": report.compared,
        "max_deviation": _json_number(report.max_deviation),
        "worst": None if report.worst is None else list(report.worst),
        "order": _json_number(report.order),
        "tol": _json_number(report.tol),
        "counted_index": closed.counted_index,
        "oracle_index": count.count,
        "oracle_converged": count.converged,
        "mismatches": [
            {"branch": mm.branch, "m": mm.m, "n": mm.n, "closed_form": _json_number(mm.closed_form), "oracle": _json_number(mm.oracle)}
            for mm in report.mismatches
        ],
        "passed": passed,
    }
    if args.format == "json":
        return code, _dump_json(doc)
    lines = [
        f"scenario: {report.scenario}",
        f"compared {report.compared} eigenvalues below {fmt6(oracle.CROSSCHECK_CAP)} at grid_n={grid_n}",
        f"max_deviation={fmt6(report.max_deviation)} (tol {fmt6(args.tol)})",
        f"order={fmt6(report.order) or 'n/a'}",
        f"counted_index={closed.counted_index} oracle_index={count.count} converged={'yes' if count.converged else 'no'}",
    ]
    for mm in report.mismatches:
        lines.append(f"  mismatch {mm.branch} m={mm.m} n={mm.n}: closed form {fmt6(mm.closed_form)}, oracle {fmt6(mm.oracle)}")
    lines.append("PASS" if passed else "FAIL")
    return code, "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# bifurcation
# --------------------------------------------------------------------------


def cmd_bifurcation(args) -> tuple[int, str]:
    if args.T is not None or args.H0 is not None or args.rho is not None or args.tau is not None:
        raise UsageError("bifurcation takes only --R/--r, --m-max and --T0")
    if args.R is None and args.r is None:
        raise UsageError("exactly one of --R or --r is required")
    geom = geo.cylinder_geometry(args.R) if args.R is not None else geo.cylinder_geometry_from_r(args.r)
    if args.m_max < 1:
        raise UsageError("--m-max must be >= 1")
    targets = [args.T0] if args.T0 is not None else [p.T0 for p in bifurcation.find_bifurcation_points(geom, args.m_max)]
    reports = [bifurcation.check_cr_conditions(geom, T0) for T0 in targets]
    docs = [
        {
            "T0": _json_number(rep.T0),
            "kernel_label": list(rep.kernel_label),
            "kernel_dim_full": rep.kernel_dim_full,
            "kernel_dim_even": rep.kernel_dim_even,
            "transversality": _json_number(rep.transversality),
            "slope": _json_number(rep.slope),
            "conditions_hold": rep.conditions_hold,
        }
        for rep in reports
    ]
    if args.format == "json":
        return EXIT_OK, _dump_json({"R": _json_number(geom.R), "r": _json_number(geom.r), "points": docs})
    if args.format == "csv":
        header = ("T0", "m", "n", "kernel_dim_full", "kernel_dim_even", "transversality")
        rows = [(d["T0"], d["kernel_label"][0], d["kernel_label"][1], d["kernel_dim_full"], d["kernel_dim_even"], d["transversality"]) for d in docs]
        return EXIT_OK, _csv(header, rows)
    lines = [f"R: {fmt6(geom.R)}  r: {fmt6(geom.r)}"]
    for d in docs:
        lines.append(
            f"T0={fmt6(d['T0'])} mode=({d['kernel_label'][0]},{d['kernel_label'][1]}) "
            f"kernel full={d['kernel_dim_full']} even={d['kernel_dim_even']} "
            f"transversality={fmt6(d['transversality'])}"
        )
    return EXIT_OK, "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Parser
# --------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, scenario: bool = True) -> None:
    if scenario:
        p.add_argument("--scenario", required=True, choices=SCENARIOS)
    radius = p.add_mutually_exclusive_group()
    radius.add_argument("--R", type=float, help="hyperbolic radius of the cylinder")
    radius.add_argument("--r", type=float, help="model radius sinh R")
    p.add_argument("--T", type=float, help="length of the cylinder piece")
    p.add_argument("--H0", type=float, help="mean curvature of the support")
    p.add_argument("--rho", type=float, help="Euclidean radius of the support sphere")
    p.add_argument("--tau", type=float, help="height of the horosphere z = tau")
    p.add_argument("--angular", choices=("full", "half-dirichlet"), default="full")
    p.add_argument("--output", help="write here instead of standard output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="capcyl", description="Spectra and Morse indices of capillary Killing cylinders.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("index", help="Morse index of one configuration")
    _common(p)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--oracle", action="store_true", help="also count with the finite-difference oracle")
    p.add_argument("--strict", action="store_true", help="exit 2 on any formula or oracle disagreement")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = sub.add_parser("spectrum", help="closed-form eigenvalue table")
    _common(p)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--m-max", type=int, default=10)
    p.add_argument("--n-max", type=int, default=spectra.DEFAULT_N_MAX)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("sweep", help="index over a range of T or r")
    _common(p)
    p.add_argument("--sweep-param", choices=("T", "r"), required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--step", type=float)
    p.add_argument("--num", type=int)
    p.add_argument("--spacing", choices=("lin", "log"), default="lin")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("oracle-check", help="closed forms against the finite-difference oracle")
    _common(p)
    p.add_argument("--grid-n", type=int)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("bifurcation", help="neutral periods and the linearized bifurcation test")
    _common(p, scenario=False)
    p.add_argument("--m-max", type=int, default=3)
    p.add_argument("--T0", type=float, help="check this period only")
    p.add_argument("--format", choices=("text", "json", "csv"), default="text")
    return parser


COMMANDS = {
    "index": cmd_index,
    "spectrum": cmd_spectrum,
    "sweep": cmd_sweep,
    "oracle-check": cmd_oracle_check,
    "bifurcation": cmd_bifurcation,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = COMMANDS[args.command](args)
    except (UsageError, DomainError, NoKernelError) as exc:
        print(f"capcyl {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.output:
        with io.open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
