"""Command-line front end: evaluate, solve, figures, analyze, compare.

Exit-code contract: 0 success, 2 domain/precondition error, 3 numerical guard
trip (mass leak, truncation, quadrature), 4 analysis threshold violation.
Data files are deterministic: identical configuration gives byte-identical
CSV output (fixed summation orders, 17 significant digits, no wall-clock
content).
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, config, mellin, series, solver, svg
from .errors import DomainError, GFLabError, NumericsError, ThresholdError
from .model import Dirac, LogGaussian, moment, parse_profile

_METHODS = ("series", "mellin", "asymp-theta", "asymp-poisson")

# figure id -> (profile line, kind); probe figures track the three standard
# rays, profile figures export sqrt(t) n(t, y) at the snapshot ladder
_FIGURES = {
    "1": ("loggaussian mu=0 sigma=0.1 mass=1", "probes"),
    "2": ("loggaussian mu=0 sigma=0.1 mass=1", "profiles"),
    "3": ("loggaussian mu=0 sigma=0.2 mass=1", "probes"),
    "4": ("loggaussian mu=0 sigma=0.2 mass=1", "profiles"),
    "5": ("loggaussian mu=0 sigma=0.5 mass=1", "profiles"),
    "6": ("logheaviside a=-0.2 b=0 height=1", "probes"),
    "7": ("logheaviside a=-0.2 b=0 height=1", "profiles"),
    "8": ("logheaviside a=-1 b=0 height=1", "probes"),
    "9": ("logheaviside a=-1 b=0 height=1", "profiles"),
    "11": ("logheaviside a=-5 b=0 height=1", "profiles"),
}


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _write_csv(path: Path | None, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    text = "\n".join(lines) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
        print(f"wrote {path}")


def _load_config(args) -> config.RunConfig:
    cfg = config.load(args.config) if args.config else config.RunConfig()
    overrides = {}
    if getattr(args, "profile", None):
        overrides["profile"] = parse_profile(args.profile)
    if any(getattr(args, k, None) is not None for k in ("alpha", "b", "g")):
        base = cfg.params
        overrides["params"] = type(base)(
            g=args.g if args.g is not None else base.g,
            b=args.b if args.b is not None else base.b,
            alpha=args.alpha if args.alpha is not None else base.alpha,
        )
    for flag, key in (("m", "m"), ("y_min", "y_min"), ("y_max", "y_max"),
                      ("t_end", "t_end"), ("dt", "dt"), ("record_every", "record_every"),
                      ("out_dir", "directory"), ("period_tol", "period_tol"),
                      ("mass_tol", "mass_tol"), ("weak_tol", "weak_tol"),
                      ("asymp_tol", "asymp_tol"), ("t_min", "t_min")):
        val = getattr(args, flag, None)
        if val is not None:
            overrides[key] = val
    if getattr(args, "snapshots", None):
        overrides["snapshots"] = tuple(float(s) for s in args.snapshots.split(","))
    if getattr(args, "probe_y", None):
        overrides["rays"] = tuple(args.probe_y)
    return config.with_overrides(cfg, **overrides)


def _solve_run(cfg: config.RunConfig, t_end: float | None = None,
               snapshots=None, rays=None) -> solver.Trajectory:
    t_end = cfg.t_end if t_end is None else t_end
    snaps = cfg.resolved_snapshots() if snapshots is None else tuple(snapshots)
    snaps = tuple(t for t in snaps if t <= t_end + 1e-12)
    rays = cfg.resolved_rays() if rays is None else tuple(rays)
    grid = solver.build_grid(cfg.profile, cfg.params.alpha,
                             cfg.resolved_y_min(), cfg.resolved_y_max(), cfg.m)
    return solver.solve_n(grid, t_end, cfg.dt, snapshot_times=snaps,
                          probe_rays=rays, record_every=cfg.record_every)


# --- subcommands ---------------------------------------------------------


def cmd_evaluate(args) -> int:
    cfg = _load_config(args)
    if args.method not in _METHODS:
        raise DomainError(f"unknown method {args.method!r} (choose from {_METHODS})")
    ts = [float(s) for s in args.t.split(",")]
    xs = [float(s) for s in args.x.split(",")]
    p, params = cfg.profile, cfg.params
    rows = []
    for t in ts:
        for x in xs:
            if args.method == "series":
                val = series.eval_u(params, p, t, x)
            elif args.method == "mellin":
                # exact characteristic rescaling of the contour inversion
                val = math.exp(-params.g * t) * mellin.inverse_mellin_v(
                    p, params.alpha, params.b * t, x * math.exp(-params.g * t))
            elif args.method == "asymp-theta":
                val = mellin.asymp_u(params, p, t, x).theta
            else:
                val = mellin.asymp_u(params, p, t, x).poisson
            rows.append((t, x, val, args.method))
    out = Path(args.out) if args.out else None
    _write_csv(out, ["t", "x", "value", "method"], rows)
    return 0


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    traj = _solve_run(cfg)
    out_dir = Path(cfg.directory)
    rows = []
    ys = traj.grid.y_nodes()
    for t, snap in zip(traj.times, traj.snapshots):
        rt = math.sqrt(t)
        for y, n in zip(ys, snap):
            rows.append((float(t), float(y), float(n), rt * float(n)))
    if "csv" in cfg.formats:
        _write_csv(out_dir / "snapshots.csv", ["t", "y", "n", "sqrt_t_n"], rows)
        diag = traj.diagnostics
        header = ["t", "mass", "argmax_y"] + [f"n_ray={y:.6g}" for y in diag.probes]
        drows = []
        for i, t in enumerate(diag.times):
            drows.append((float(t), float(diag.mass[i]), float(diag.argmax_y[i]),
                          *[float(diag.probes[y][i]) for y in diag.probes]))
        _write_csv(out_dir / "diagnostics.csv", header, drows)
    if "svg" in cfg.formats:
        curves = []
        for t, snap in zip(traj.times, traj.snapshots):
            keep = slice(None, None, max(1, ys.size // 2000))
            curves.append((f"t={t:g}", ys[keep], math.sqrt(t) * snap[keep]))
        doc = svg.line_plot(curves, title="rescaled profiles sqrt(t) n(t, y)",
                            xlabel="y = log x", ylabel="sqrt(t) n")
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "snapshots.svg").write_text(doc, encoding="utf-8")
        print(f"wrote {out_dir / 'snapshots.svg'}")
    return 0


def cmd_figures(args) -> int:
    cfg = _load_config(args)
    fig_id = args.id
    if fig_id not in _FIGURES:
        raise DomainError(f"unknown figure id {fig_id!r} (available: {sorted(_FIGURES, key=int)})")
    profile_line, kind = _FIGURES[fig_id]
    cfg = config.with_overrides(cfg, profile=parse_profile(profile_line))
    out_dir = Path(cfg.directory)
    if kind == "probes":
        traj = _solve_run(cfg)
        src = analysis.GridSource(traj)
        rays = cfg.resolved_rays()
        probes = [analysis.line_probe(src, y) for y in rays]
        times = probes[0].times
        header = ["t"] + [f"f_y={p.y:.6g}" for p in probes]
        rows = [(float(t), *[float(p.values[i]) for p in probes])
                for i, t in enumerate(times)]
        curves = [(f"y={p.y:.4g}", p.times, p.values) for p in probes]
        title = "line values sqrt(t) exp(-Psi(y) t) n(t, y t)"
        xlabel = "t"
        ylabel = "f_y(t)"
    else:
        traj = _solve_run(cfg)
        ys = traj.grid.y_nodes()
        header = ["t", "y", "n", "sqrt_t_n"]
        rows = []
        for t, snap in zip(traj.times, traj.snapshots):
            rt = math.sqrt(t)
            for y, n in zip(ys, snap):
                rows.append((float(t), float(y), float(n), rt * float(n)))
        keep = slice(None, None, max(1, ys.size // 2000))
        curves = [(f"t={t:g}", ys[keep], math.sqrt(t) * snap[keep])
                  for t, snap in zip(traj.times, traj.snapshots)]
        title = "rescaled profiles sqrt(t) n(t, y)"
        xlabel = "y = log x"
        ylabel = "sqrt(t) n"
    if "csv" in cfg.formats:
        _write_csv(out_dir / f"figure{fig_id}.csv", header, rows)
    if "svg" in cfg.formats:
        doc = svg.line_plot(curves, title=title, xlabel=xlabel, ylabel=ylabel)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / f"figure{fig_id}.svg").write_text(doc, encoding="utf-8")
        print(f"wrote {out_dir / f'figure{fig_id}.svg'}")
    return 0


def cmd_analyze(args) -> int:
    cfg = _load_config(args)
    p, params = cfg.profile, cfg.params
    if isinstance(p, Dirac):
        raise DomainError("analysis runs need a density profile, not a dirac atom")
    la = params.log_alpha
    violations: list[str] = []
    report: list[str] = []
    traj = _solve_run(cfg)
    src = analysis.GridSource(traj)
    u0_mass = moment(p, 1.0)

    # period law along each tracked ray
    period_rows = []
    for y in cfg.resolved_rays():
        expected = -la / y
        probe = analysis.line_probe(src, y, t_min=cfg.t_min, t_max=cfg.t_end)
        est = analysis.estimate_period(probe, expected_period=expected,
                                       amp_threshold=cfg.amp_threshold)
        period_rows.append((y, expected, est.period, est.amplitude,
                            est.confidence, est.n_cycles, est.oscillating))
        if est.oscillating:
            err = abs(est.period - expected) / expected
            report.append(f"ray y={y:.6g}: period {est.period:.4f} "
                          f"(law {expected:.4f}, rel err {err:.2e}, amp {est.amplitude:.3e})")
            if err > cfg.period_tol:
                violations.append(
                    f"period law violated on ray y={y:.6g}: measured {est.period:.4f}, "
                    f"law {expected:.4f}, tolerance {cfg.period_tol}")
        else:
            report.append(f"ray y={y:.6g}: no oscillation (amplitude {est.amplitude:.3e})")

    # mass functional; absolute for smooth data, drift for sampled jumps
    diag = traj.diagnostics
    if isinstance(p, LogGaussian):
        mass_err = float(np.max(np.abs(diag.mass - u0_mass))) / u0_mass
    else:
        mass_err = float(np.max(np.abs(diag.mass - diag.mass[0]))) / u0_mass
    report.append(f"mass functional: max relative deviation {mass_err:.3e}")
    if mass_err > cfg.mass_tol:
        violations.append(f"mass conservation violated: {mass_err:.3e} > {cfg.mass_tol}")

    # weak limit against cos (smooth data only)
    weak_rows = []
    if isinstance(p, LogGaussian):
        t_w = float(traj.times[-1])
        val = analysis.weak_test(src, math.cos, t_w)
        target = u0_mass * math.cos(la)
        weak_err = abs(val - target) / abs(target)
        weak_rows.append((t_w, val, target, weak_err))
        report.append(f"weak cos functional at t={t_w:g}: {val:.6f} "
                      f"(limit {target:.6f}, rel err {weak_err:.2e})")
        if weak_err > cfg.weak_tol:
            violations.append(
                f"weak limit violated: cos functional off by {weak_err:.3e} > {cfg.weak_tol}")

    # route agreement: solver vs series on the grid nodes themselves (no
    # interpolation in the comparison), contour inversion pointwise
    t_cmp = [float(t) for t in traj.times if 0.5 <= t <= 10.0] or [float(traj.times[-1])]
    ys = traj.grid.y_nodes()
    pde_err = 0.0
    for t in t_cmp:
        exact = series.eval_n_series(p, params.alpha, float(t), ys)
        snap = traj.snapshots[traj.snapshot_index(float(t))]
        pde_err = max(pde_err, float(np.max(np.abs(snap - exact)) / np.max(np.abs(exact))))
    report.append(f"solver vs series on nodes at t in {t_cmp}: max scaled error {pde_err:.3e}")
    if pde_err > cfg.pde_tol:
        violations.append(f"series vs solver mismatch {pde_err:.3e} > {cfg.pde_tol}")
    cmp_tbl = analysis.compare_methods(
        p, params, t_cmp, (0.25, 0.5, 0.75), traj=traj,
        tol={frozenset({"series", "mellin"}): cfg.mellin_tol})
    report.append(cmp_tbl.summary())
    err = cmp_tbl.max_rel_err("series", "mellin")
    if not math.isnan(err) and err > cfg.mellin_tol:
        violations.append(f"series vs contour inversion mismatch {err:.3e} > {cfg.mellin_tol}")

    # asymptotics on the concentration line (smooth data only)
    if isinstance(p, LogGaussian):
        errs = []
        for t in (10.0, 15.0, 20.0, 25.0, 30.0):
            x = params.alpha ** (-t)
            exact = series.eval_v(p, params.alpha, t, x)
            approx = mellin.asymp_v_poisson(p, params.alpha, t, x)
            errs.append(abs(approx - exact) / abs(exact))
        report.append("asymptotic relative error on x = alpha^-t at t = 10..30: "
                      + ", ".join(f"{e:.3e}" for e in errs))
        if errs[3] > cfg.asymp_tol:
            violations.append(
                f"asymptotics violated: relative error {errs[3]:.3e} at t=25 > {cfg.asymp_tol}")
        if any(errs[i + 1] > errs[i] * (1.0 + 1e-9) for i in range(len(errs) - 1)):
            violations.append("asymptotics violated: error not monotone non-increasing")

    out_dir = Path(cfg.directory)
    if "csv" in cfg.formats:
        _write_csv(out_dir / "periods.csv",
                   ["y", "expected", "period", "amplitude", "confidence",
                    "n_cycles", "oscillating"],
                   period_rows)
        if weak_rows:
            _write_csv(out_dir / "weak.csv", ["t", "value", "limit", "rel_err"], weak_rows)
        _write_csv(out_dir / "compare.csv",
                   ["method_a", "method_b", "t", "x", "val_a", "val_b", "rel_err"],
                   [(r.method_a, r.method_b, r.t, r.x, r.val_a, r.val_b, r.rel_err)
                    for r in cmp_tbl.rows])
    print("\n".join(report))
    if violations:
        raise ThresholdError("; ".join(violations))
    print("all checks passed")
    return 0


def cmd_compare(args) -> int:
    cfg = _load_config(args)
    ts = [float(s) for s in args.t.split(",")] if args.t else [1.0, 5.0]
    xs = [float(s) for s in args.x.split(",")] if args.x else [0.25, 0.5, 0.75]
    cfg = config.with_overrides(cfg, t_end=max(ts))  # sizes the grid for the run
    traj = _solve_run(cfg, snapshots=ts)
    tbl = analysis.compare_methods(cfg.profile, cfg.params, ts, xs, traj=traj)
    out = Path(cfg.directory) / "compare.csv" if "csv" in cfg.formats else None
    _write_csv(out, ["method_a", "method_b", "t", "x", "val_a", "val_b", "rel_err"],
               [(r.method_a, r.method_b, r.t, r.x, r.val_a, r.val_b, r.rel_err)
                for r in tbl.rows])
    print(tbl.summary())
    return 0


# --- argument parsing -----------------------------------------------------


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="config file; flags override its values")
    sp.add_argument("--profile", help='e.g. "loggaussian mu=0 sigma=0.1 mass=1"')
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--b", type=float)
    sp.add_argument("--g", type=float)
    sp.add_argument("--m", type=int, help="grid cells per log(alpha)")
    sp.add_argument("--y-min", dest="y_min", type=float)
    sp.add_argument("--y-max", dest="y_max", type=float)
    sp.add_argument("--t-end", dest="t_end", type=float)
    sp.add_argument("--dt", type=float)
    sp.add_argument("--snapshots", help="comma-separated times")
    sp.add_argument("--record-every", dest="record_every", type=int)
    sp.add_argument("--probe-y", dest="probe_y", type=float, action="append",
                    help="ray slope y < 0; repeatable")
    sp.add_argument("--out-dir", dest="out_dir")
    sp.add_argument("--period-tol", dest="period_tol", type=float)
    sp.add_argument("--mass-tol", dest="mass_tol", type=float)
    sp.add_argument("--weak-tol", dest="weak_tol", type=float)
    sp.add_argument("--asymp-tol", dest="asymp_tol", type=float)
    sp.add_argument("--t-min", dest="t_min", type=float,
                    help="start of the probe analysis window")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gflab",
                                 description="growth-fragmentation equation laboratory")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("evaluate", help="evaluate u(t, x) by one route, emit CSV")
    _add_common(sp)
    sp.add_argument("--method", required=True, choices=_METHODS)
    sp.add_argument("--t", required=True, help="comma-separated times")
    sp.add_argument("--x", required=True, help="comma-separated sizes")
    sp.add_argument("--out", help="CSV path (default: stdout)")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("solve", help="run the log-grid solver, write snapshots and diagnostics")
    _add_common(sp)
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("figures", help="reproduce a figure analog as CSV plus SVG")
    _add_common(sp)
    sp.add_argument("--id", required=True, help=f"one of {sorted(_FIGURES, key=int)}")
    sp.set_defaults(func=cmd_figures)

    sp = sub.add_parser("analyze", help="period, weak-limit and cross-route checks; "
                                        "nonzero exit on violation")
    _add_common(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("compare", help="cross-route value table at chosen (t, x) points")
    _add_common(sp)
    sp.add_argument("--t", help="comma-separated times")
    sp.add_argument("--x", help="comma-separated sizes")
    sp.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ThresholdError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 4
    except NumericsError as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GFLabError as exc:  # pragma: no cover - safety net
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
