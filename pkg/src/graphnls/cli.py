"""Command-line front end.

Subcommands::

    graphnls solve      --preset NAME|--config PATH (--mass X | --omega X)
    graphnls scan       --preset NAME|--config PATH --param P --grid a:b:n
    graphnls bracket    --preset NAME|--config PATH --grid lo:hi:steps
    graphnls thresholds [--alpha A --beta B --p P --tau T --v V]
    graphnls stability  --preset NAME|--config PATH --grid a:b:n [--branch B]

Common flags: --out DIR (default .), --seed N, --h SPACING,
--halfline-length L, --max-iter K, --tol T, --workers W.

Outputs are UTF-8 CSV files with a header plus a ``manifest.json`` that fully
determines the run; identical manifests reproduce byte-identical CSVs.  Exit
codes: 0 ok/converged, 1 solver failure or non-convergence, 2 usage or config
error, 3 unbounded-from-below suspected.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import load_problem
from .experiments import SCAN_PARAMETERS, bracket_mass_threshold, scan
from .graphs import ConfigError, ProblemSpec
from .oracle import thresholds
from .presets import PRESETS, get_preset
from .solver import (
    DegenerateQuadraticFormError,
    SolverOptions,
    ThresholdError,
    minimize_action_nehari,
    minimize_energy_mass,
)
from .stability import action_curve, classify, mass_curve_slope

EXIT_OK = 0
EXIT_SOLVER_FAILURE = 1
EXIT_USAGE = 2
EXIT_UNBOUNDED = 3


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _parse_grid(spec: str, count_name: str = "n") -> tuple[float, float, int]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"--grid must be a:b:{count_name}, got {spec!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"bad --grid value {spec!r}") from None
    if n < 1:
        raise ConfigError("--grid count must be >= 1")
    return a, b, n


def _grid_values(spec: str) -> list[float]:
    a, b, n = _parse_grid(spec)
    if n == 1:
        return [a]
    step = (b - a) / (n - 1)
    return [a + k * step for k in range(n)]


def _load(args) -> tuple[ProblemSpec, dict]:
    if bool(args.preset) == bool(args.config):
        raise ConfigError("give exactly one of --preset or --config")
    if args.preset:
        preset = get_preset(args.preset)
        return preset.problem(), {"preset": args.preset}
    return load_problem(args.config), {"config": str(args.config)}


def _solver_options(args) -> SolverOptions:
    kw = {}
    if args.h is not None:
        kw["h"] = args.h
    if args.halfline_length is not None:
        kw["halfline_length"] = args.halfline_length
    if args.max_iter is not None:
        kw["max_iterations"] = args.max_iter
    if args.tol is not None:
        kw["gradient_tolerance"] = args.tol
    if getattr(args, "symmetrize", False):
        kw["symmetrize"] = True
    kw["seed"] = args.seed
    return SolverOptions(**kw)


def _manifest(args, source: dict, extra: dict) -> dict:
    man = {
        "tool": "graphnls",
        "version": __version__,
        "subcommand": args.command,
        "seed": args.seed,
        "out": str(args.out),
    }
    man.update(source)
    man.update(extra)
    return man


def _emit_manifest(out: Path, manifest: dict) -> None:
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    problem, source = _load(args)
    mass_arg, omega_arg = args.mass, args.omega
    if args.preset and mass_arg is None and omega_arg is None:
        preset = get_preset(args.preset)
        mass_arg, omega_arg = preset.mass, preset.omega
    if (mass_arg is None) == (omega_arg is None):
        raise ConfigError("give exactly one of --mass or --omega")
    opts = _solver_options(args)
    if mass_arg is not None:
        report = minimize_energy_mass(problem, mass_arg, opts)
    else:
        report = minimize_action_nehari(problem, omega_arg, opts)

    out = _outdir(args)
    (out / "report.txt").write_text(report.to_text(), encoding="utf-8")
    if report.profile is not None:
        report.profile.to_csv(out / "profile.csv")
    for k, alt in enumerate(report.alternates):
        (out / f"report_alt{k}.txt").write_text(alt.to_text(), encoding="utf-8")
        if alt.profile is not None:
            alt.profile.to_csv(out / f"profile_alt{k}.csv")
    _emit_manifest(out, _manifest(args, source, {
        "mass": mass_arg, "omega": omega_arg, "h": args.h,
        "halfline_length": args.halfline_length,
        "max_iter": args.max_iter, "tol": args.tol}))
    print(f"status: {report.status}  value={report.value:.9g}  "
          f"mass={report.mass:.9g}  omega={report.omega:.9g}")
    if report.status.startswith("unbounded"):
        return EXIT_UNBOUNDED
    return EXIT_OK if report.converged else EXIT_SOLVER_FAILURE


def _cmd_scan(args) -> int:
    problem, source = _load(args)
    grid_spec = args.grid
    param = args.param
    if args.preset and (grid_spec is None or param is None):
        hints = get_preset(args.preset).scan
        param = param or hints.get("param")
        grid_spec = grid_spec or hints.get("grid")
    if param is None or grid_spec is None:
        raise ConfigError("scan needs --param and --grid")
    if param not in SCAN_PARAMETERS:
        raise ConfigError(f"unknown scan parameter {param!r}")
    base_mass, base_omega = args.mass, args.omega
    if args.preset and base_mass is None and base_omega is None:
        preset = get_preset(args.preset)
        base_mass, base_omega = preset.mass, preset.omega
    values = _grid_values(grid_spec)
    rows = scan(problem, param, values, mu=base_mass, omega=base_omega,
                opts=_solver_options(args), workers=args.workers)

    out = _outdir(args)
    _write_csv(out / "scan.csv",
               ["param", "x", "value", "mass", "omega", "residual",
                "asymmetry", "branch", "converged", "status"],
               [[r.param, r.x, r.value, r.mass, r.omega, r.residual,
                 r.asymmetry, r.branch, r.converged, r.status] for r in rows])
    _emit_manifest(out, _manifest(args, source, {
        "param": param, "grid": grid_spec, "mass": base_mass,
        "omega": base_omega, "h": args.h, "workers": args.workers,
        "max_iter": args.max_iter, "tol": args.tol}))
    print(f"scan: {len(rows)} points -> {out / 'scan.csv'}")
    return EXIT_OK


def _cmd_bracket(args) -> int:
    problem, source = _load(args)
    grid_spec = args.grid
    if args.preset and grid_spec is None:
        grid_spec = get_preset(args.preset).scan.get("grid")
    if grid_spec is None:
        raise ConfigError("bracket needs --grid lo:hi:steps")
    lo, hi, steps = _parse_grid(grid_spec, "steps")
    result = bracket_mass_threshold(problem, lo, hi, steps,
                                    opts=_solver_options(args))

    out = _outdir(args)
    lines = [f"orientation = {result.orientation}"]
    if result.interval is not None:
        lines.append(f"interval = [{result.interval[0]:.12g}, {result.interval[1]:.12g}]")
        lines.append(f"width = {result.interval[1] - result.interval[0]:.12g}")
    if result.note:
        lines.append(f"note = {result.note}")
    (out / "bracket.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_csv(out / "probes.csv",
               ["mu", "exists", "value", "level", "converged"],
               [[p.mu, p.exists, p.value, p.level, p.converged]
                for p in result.probes])
    _emit_manifest(out, _manifest(args, source, {
        "grid": grid_spec, "h": args.h, "max_iter": args.max_iter,
        "tol": args.tol}))
    print("\n".join(lines))
    return EXIT_OK


def _cmd_thresholds(args) -> int:
    table = thresholds(alpha=args.alpha, beta=args.beta, p=args.p,
                       tau=args.tau, v=args.v)
    out = _outdir(args)
    _write_csv(out / "thresholds.csv", ["name", "value"],
               [[k, v] for k, v in table.items()])
    _emit_manifest(out, _manifest(args, {}, {
        "alpha": args.alpha, "beta": args.beta, "p": args.p,
        "tau": args.tau, "v": args.v}))
    for k, v in table.items():
        print(f"{k} = {v:.12g}")
    return EXIT_OK


def _cmd_stability(args) -> int:
    problem, source = _load(args)
    grid_spec = args.grid
    if args.preset and grid_spec is None:
        grid_spec = get_preset(args.preset).scan.get("grid")
    if grid_spec is None:
        raise ConfigError("stability needs --grid a:b:n")
    lo, hi, n = _parse_grid(grid_spec)
    curve = action_curve(problem, (lo, hi), n, branch=args.branch,
                         opts=_solver_options(args))
    if len(curve) < 5:
        raise ConfigError("fewer than 5 usable samples on this branch; "
                          "notes: " + "; ".join(curve.notes))
    cls = classify(curve)
    slope = mass_curve_slope(curve)

    out = _outdir(args)
    d2_by_omega = dict(zip(cls.omegas, cls.d2))
    verdict_by_omega = dict(zip(cls.omegas, cls.verdicts))
    rows = []
    for k in range(len(curve)):
        w = curve.omegas[k]
        rows.append([w, curve.d_values[k], curve.masses[k],
                     d2_by_omega.get(w), verdict_by_omega.get(w, "")])
    _write_csv(out / "curve.csv", ["omega", "d", "mass", "d2", "verdict"], rows)

    lines = [f"branch = {curve.label}", f"verdict_kind = {cls.note}"]
    for w, frm, to in cls.transitions:
        lines.append(f"transition {frm}->{to} at omega ~= {w:.6g} (estimate)")
    for w in slope.sign_changes:
        tag = "CONJECTURE " if problem.p > 6 else ""
        lines.append(f"{tag}mass-curve slope changes sign at omega ~= {w:.6g}")
    for note in curve.notes:
        lines.append(f"note: {note}")
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _emit_manifest(out, _manifest(args, source, {
        "grid": grid_spec, "branch": args.branch, "h": args.h,
        "max_iter": args.max_iter, "tol": args.tol}))
    print("\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------

def _add_common(sp, with_problem: bool = True) -> None:
    if with_problem:
        sp.add_argument("--config", type=Path, help="problem description file")
        sp.add_argument("--preset", help="named preset (see --list-presets)")
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--h", type=float, default=None, help="grid spacing")
    sp.add_argument("--halfline-length", type=float, default=None,
                    dest="halfline_length")
    sp.add_argument("--max-iter", type=int, default=None, dest="max_iter")
    sp.add_argument("--tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="graphnls",
        description="ground states of the focusing NLS on metric graphs")
    ap.add_argument("--version", action="version", version=f"graphnls {__version__}")
    ap.add_argument("--list-presets", action="store_true",
                    help="list named presets and exit")
    sub = ap.add_subparsers(dest="command")

    sp = sub.add_parser("solve", help="one ground-state solve")
    _add_common(sp)
    sp.add_argument("--mass", type=float, default=None)
    sp.add_argument("--omega", type=float, default=None)
    sp.add_argument("--symmetrize", action="store_true",
                    help="restrict to the halfline-exchange symmetric subspace")

    sp = sub.add_parser("scan", help="one solve per grid point")
    _add_common(sp)
    sp.add_argument("--param", choices=SCAN_PARAMETERS, default=None)
    sp.add_argument("--grid", default=None, help="a:b:n")
    sp.add_argument("--mass", type=float, default=None, help="base mass")
    sp.add_argument("--omega", type=float, default=None, help="base frequency")
    sp.add_argument("--workers", type=int, default=1)

    sp = sub.add_parser("bracket", help="bisect the existence-threshold mass")
    _add_common(sp)
    sp.add_argument("--grid", default=None, help="mu_lo:mu_hi:steps")

    sp = sub.add_parser("thresholds", help="threshold constants table")
    _add_common(sp, with_problem=False)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--beta", type=float, default=1.0)
    sp.add_argument("--p", type=float, default=4.0)
    sp.add_argument("--tau", type=float, default=2.0)
    sp.add_argument("--v", type=float, default=1.0)

    sp = sub.add_parser("stability", help="action curve and d''-sign verdicts")
    _add_common(sp)
    sp.add_argument("--grid", default=None, help="omega_lo:omega_hi:samples")
    sp.add_argument("--branch", default="auto",
                    choices=("auto", "even", "ntail", "odd", "asymmetric"))

    return ap


_DISPATCH = {
    "solve": _cmd_solve,
    "scan": _cmd_scan,
    "bracket": _cmd_bracket,
    "thresholds": _cmd_thresholds,
    "stability": _cmd_stability,
}


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.list_presets:
        for name in sorted(PRESETS):
            print(f"{name:<24} {PRESETS[name].description}")
        return EXIT_OK
    if args.command is None:
        ap.print_help()
        return EXIT_USAGE
    try:
        return _DISPATCH[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ThresholdError, DegenerateQuadraticFormError) as exc:
        print(f"solver refused: {exc}", file=sys.stderr)
        return EXIT_SOLVER_FAILURE


if __name__ == "__main__":
    sys.exit(main())
