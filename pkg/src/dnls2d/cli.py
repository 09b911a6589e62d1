"""Command-line front end.

Subcommands:

    stationary   solve the configured profile equation, write a snapshot
    evolve       run a configured time evolution, write series + snapshots
    explicit-1d  tabulate the closed-form 1D profile over a range
    preset       list the catalog or run one entry and grade it
    verify       run a quick built-in invariant battery

Exit codes: 0 success (or verdict match), 1 failure (or verdict mismatch),
2 configuration errors (bad flags, bad config text, unknown names).
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig, parse_config, serialize_config
from .evolution import IntegratorConfig, MonitorConfig, evolve
from .presets import (
    get_preset,
    list_presets,
    run_preset,
    stationary_state_for,
    gaussian_data,
    perturbed_state_data,
)
from .profiles import amplitude_1d, phase_1d
from .recordio import SnapshotMeta, read_snapshot, write_snapshot, write_time_series
from .spectral import Field, Grid
from .stationary import StationaryProblem, initial_iterate, newton_solve

__all__ = ["cli_main", "main"]


def _read_config(path: str) -> RunConfig:
    return parse_config(Path(path).read_text())


def _load_initial(cfg: RunConfig, cache: bool) -> Field:
    init = cfg.initial
    if init.kind == "gaussian":
        return gaussian_data(cfg.grid, amplitude=init.amplitude)
    if init.kind == "file":
        field, _ = read_snapshot(init.path)
        if field.values.shape != (cfg.grid.N1, cfg.grid.N2):
            raise ConfigError(
                f"initial snapshot is {field.values.shape}, grid wants "
                f"({cfg.grid.N1}, {cfg.grid.N2})"
            )
        return field
    if init.path:
        Q, _ = read_snapshot(init.path)
    else:
        Q = stationary_state_for(cfg.grid, cfg.params, cache=cache)
    return perturbed_state_data(Q, cfg.grid, init.sign, init.amplitude)


def _cmd_stationary(args) -> int:
    cfg = _read_config(args.config)
    if max(abs(d) for d in cfg.params.delta) == 0.0:
        state = newton_solve(
            initial_iterate(cfg.grid),
            StationaryProblem(cfg.grid, cfg.params),
            tol=args.tol,
        )
        Q = state.Q
        print(
            f"converged in {state.iterations} iterations, "
            f"residual {state.residual_norm:.3e}"
        )
    else:
        Q = stationary_state_for(cfg.grid, cfg.params, tol=args.tol, cache=not args.no_cache)
        print(f"profile via continuation; grid {cfg.grid.N1}x{cfg.grid.N2}")
    write_snapshot(Q, SnapshotMeta(cfg.grid.L1, cfg.grid.L2, 0.0), args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_evolve(args) -> int:
    cfg = _read_config(args.config)
    u0 = _load_initial(cfg, cache=not args.no_cache)
    start = time.time()
    record = evolve(
        u0, cfg.integrator, cfg.grid, cfg.params, monitors=cfg.monitors, frame=cfg.frame
    )
    elapsed = time.time() - start
    series_path = cfg.output.series or "series.csv"
    write_time_series(record, series_path)
    written = [series_path]
    if record.snapshots:
        snap_dir = Path(cfg.output.snapshot_dir or ".")
        snap_dir.mkdir(parents=True, exist_ok=True)
        for t, field in record.snapshots:
            path = snap_dir / f"snapshot_t{t:.6g}.dnls"
            write_snapshot(field, SnapshotMeta(cfg.grid.L1, cfg.grid.L2, t), path)
            written.append(str(path))
    print(f"status: {record.status}")
    print(f"samples: {len(record.samples)}, elapsed {elapsed:.1f}s")
    for w in record.warnings:
        print(f"warning at t={w[0]:.6g}: {w[1]}", file=sys.stderr)
    for path in written:
        print(f"wrote {path}")
    if cfg.output.summary:
        Path(cfg.output.summary).write_text(
            f"status: {record.status}\nsamples: {len(record.samples)}\n"
            + serialize_config(cfg)
        )
        print(f"wrote {cfg.output.summary}")
    return 0


def _cmd_explicit_1d(args) -> int:
    kw = dict(sigma=args.sigma, epsilon=args.eps, delta=args.delta)
    if args.x is not None:
        print(f"{amplitude_1d(args.x, **kw):.17g}")
        return 0
    xs = np.linspace(args.xmin, args.xmax, args.num)
    lines = ["x,amplitude,phase"]
    for x in xs:
        lines.append(
            f"{x:.17g},{amplitude_1d(float(x), **kw):.17g},{phase_1d(float(x), **kw):.17g}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_preset(args) -> int:
    if args.action == "list":
        for name in list_presets():
            p = get_preset(name)
            print(f"{name}: {', '.join(p.expected.verdicts)}")
        return 0
    try:
        result = run_preset(args.name, reduced=args.reduced, cache=not args.no_cache)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(result.summary())
    if args.series:
        write_time_series(result.record, args.series)
        print(f"wrote {args.series}")
    return 0 if result.verdict == "match" else 1


def _cmd_verify(args) -> int:
    failures = 0

    def check(name: str, ok: bool, detail: str = "") -> None:
        nonlocal failures
        print(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
        failures += 0 if ok else 1

    from .profiles import profile_residual_1d

    worst = 0.0
    for sigma in (1.0, 2.0, 3.0):
        for eps in (0.0, 0.5, 1.0):
            for delta in (0.0, 1.0):
                worst = max(worst, profile_residual_1d(sigma=sigma, epsilon=eps, delta=delta))
    check("closed-form 1D profile solves its stationary ODE", worst <= 1e-8, f"max residual {worst:.2e}")

    from .spectral import ModelParams

    grid = Grid(5.0, 5.0, 128, 128)
    params = ModelParams()
    state = newton_solve(initial_iterate(grid), StationaryProblem(grid, params), tol=1e-10)
    check(
        "Newton reaches a nonzero profile at tol 1e-10",
        state.residual_norm <= 1e-10 and state.iterations <= 12,
        f"{state.iterations} iterations, residual {state.residual_norm:.2e}",
    )

    cfgs = IntegratorConfig(dt=1e-3, t_end=0.05)
    rec1 = evolve(state.Q, cfgs, grid, params)
    rec2 = evolve(state.Q, cfgs, grid, params)
    same = all(
        a == b for a, b in zip(rec1.samples, rec2.samples)
    ) and len(rec1.samples) == len(rec2.samples)
    check("identical configurations give bitwise-identical samples", same)
    drift = abs(rec1.samples[-1].mass_rel_drift)
    check("short soliton orbit conserves the weighted mass", drift <= 1e-11, f"drift {drift:.2e}")

    import tempfile

    from .recordio import read_time_series

    with tempfile.TemporaryDirectory() as tmp:
        series = Path(tmp) / "series.csv"
        write_time_series(rec1, series)
        back = read_time_series(series)
        check(
            "time-series round trip is exact",
            list(back.samples) == list(rec1.samples) and back.status == rec1.status,
        )
        snap = Path(tmp) / "state.dnls"
        write_snapshot(state.Q, SnapshotMeta(grid.L1, grid.L2, 0.0), snap)
        field, meta = read_snapshot(snap)
        check(
            "snapshot round trip is bitwise exact",
            np.array_equal(field.values, state.Q.values) and meta.t == 0.0,
        )

    print(f"{failures} failure(s)" if failures else "all checks passed")
    return 1 if failures else 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnls2d",
        description="Spectral simulations of a 2D derivative NLS with off-axis dispersion",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stationary", help="solve the configured profile equation")
    p.add_argument("--config", required=True, help="path to a run configuration file")
    p.add_argument("--out", required=True, help="snapshot path for the profile")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(fn=_cmd_stationary)

    p = sub.add_parser("evolve", help="run a configured time evolution")
    p.add_argument("--config", required=True)
    p.add_argument("--no-cache", action="store_true")
    p.set_defaults(fn=_cmd_evolve)

    p = sub.add_parser("explicit-1d", help="evaluate the closed-form 1D profile")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--x", type=float, default=None, help="single point: print the amplitude")
    p.add_argument("--xmin", type=float, default=-10.0)
    p.add_argument("--xmax", type=float, default=10.0)
    p.add_argument("--num", type=int, default=201)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(fn=_cmd_explicit_1d)

    p = sub.add_parser("preset", help="list or run catalog presets")
    psub = p.add_subparsers(dest="action", required=True)
    pl = psub.add_parser("list", help="print the catalog")
    pl.set_defaults(fn=_cmd_preset, action="list")
    pr = psub.add_parser("run", help="run one preset and grade the outcome")
    pr.add_argument("name")
    pr.add_argument("--reduced", action="store_true", help="halved grid, retuned stepping")
    pr.add_argument("--no-cache", action="store_true")
    pr.add_argument("--series", default=None, help="also write the sampled series here")
    pr.set_defaults(fn=_cmd_preset, action="run")

    p = sub.add_parser("verify", help="run the built-in invariant battery")
    p.set_defaults(fn=_cmd_verify)
    return parser


def cli_main(argv: Optional[list] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version.
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
