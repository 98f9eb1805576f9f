"""Command-line front end: simulate, sweep, analyze, report."""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from . import artifacts
from .artifacts import ArtifactError
from .config import (
    ConfigError,
    RunConfig,
    build_report,
    derive_seed,
    load_run_config,
    run_config_from_dict,
)
from .povm import ParameterError, StateError
from .spectral import (
    AnalysisError,
    main_peak,
    power_spectrum,
    synthesize,
    truncate_series,
    wiener_filter,
)
from .trajectory import simulate_trajectory

THREADS_ENV = "UNSHARP_MONITOR_THREADS"


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.std() == 0.0 or y.std() == 0.0 or np.isnan(x).any() or np.isnan(y).any():
        return math.nan
    return float(np.corrcoef(x, y)[0, 1])


def _analysis(g2: np.ndarray, dt: float, wiener: bool, truncation: bool):
    """Spectrum of the readout, filter weights, and the processed sequence."""
    raw = power_spectrum(g2, dt)
    filtered = wiener_filter(raw) if wiener else raw
    truncated = truncate_series(filtered) if truncation else filtered
    processed = synthesize(truncated)
    record = replace(raw, wiener_weights=filtered.wiener_weights)
    return record, processed


def _run_simulation(config: RunConfig):
    record = simulate_trajectory(config.trajectory, engine=config.engine)
    spectrum, processed = _analysis(
        record.g2, config.trajectory.delta_t, config.wiener, config.truncation
    )
    return record, spectrum, processed


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = load_run_config(
        args.config, args.preset, {"seed": args.seed, "engine": args.engine}
    )
    out_dir = Path(args.out_dir if args.out_dir is not None else config.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    record, spectrum, processed = _run_simulation(config)
    echo = config.resolved()
    omega_r = config.trajectory.spec.omega_r

    csv_path = out_dir / "trajectory.csv"
    artifacts.write_trajectory_csv(
        csv_path, record.m, record.t, record.c2_sq, record.g2, processed, echo
    )
    artifacts.write_json(
        out_dir / "spectrum.json",
        artifacts.spectrum_payload(spectrum, processed, echo, omega_r),
    )
    report = build_report(config)
    artifacts.write_report_json(out_dir / "report.json", report, echo)
    if args.gnuplot:
        artifacts.write_gnuplot_script(out_dir / "plot.gp", csv_path.name)
    print(
        f"wrote {csv_path} ({len(record.m)} series), spectrum.json, report.json"
        f" [f={report['f']:.4g}, regime={report['regime']}]"
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    config = load_run_config(args.config, args.preset, {"seed": args.seed})
    report = build_report(config)
    payload = {"schema": artifacts.SCHEMA_VERSION, "config": config.resolved()}
    payload.update(report)
    target = args.out_dir if args.out_dir is not None else config.out_dir
    if target is not None:
        out_dir = Path(target)
        out_dir.mkdir(parents=True, exist_ok=True)
        artifacts.write_report_json(out_dir / "report.json", report, config.resolved())
    json.dump(artifacts.json_safe(payload), sys.stdout, indent=2)
    print()
    return 0


def _cmd_analyze(args: argparse.Namespace) -> int:
    echo, columns = artifacts.read_trajectory_csv(args.csv)
    if echo is not None and "n_per_series" in echo and "tau" in echo:
        dt = echo["n_per_series"] * echo["tau"]
        wiener = bool(echo.get("wiener", True))
        truncation = bool(echo.get("truncation", True))
        t_r = float(echo.get("t_r", 1.0))
    else:
        dt = float(columns["t_over_TR"][0] / columns["m"][0])
        wiener = True
        truncation = True
        t_r = 1.0
    spectrum, processed = _analysis(columns["g2"], dt, wiener, truncation)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = artifacts.spectrum_payload(
        spectrum, processed, echo if echo is not None else {}, 2.0 * math.pi / t_r
    )
    artifacts.write_json(out_dir / "spectrum.json", payload)
    artifacts.write_trajectory_csv(
        out_dir / "processed.csv",
        columns["m"],
        columns["t_over_TR"],
        columns["c2_sq"],
        columns["g2"],
        processed,
        echo if echo is not None else {},
    )
    peak = payload["main_peak"]
    status = (
        f"main peak at bin {peak['index']}"
        if peak["significant"]
        else "no significant peak"
    )
    print(f"wrote spectrum.json, processed.csv [{status}]")
    return 0


def _sweep_axes(args: argparse.Namespace, spec: dict[str, Any]) -> dict[str, list]:
    grid = dict(spec.get("grid", {}))
    if args.p0:
        grid["p0"] = _parse_floats(args.p0, "p0")
    if args.dp:
        grid["dp"] = _parse_floats(args.dp, "dp")
    if args.tau:
        grid["tau"] = _parse_floats(args.tau, "tau")
    if args.n:
        grid["n_per_series"] = [int(v) for v in _parse_floats(args.n, "n")]
    missing = [axis for axis in ("p0", "dp", "tau", "n_per_series") if not grid.get(axis)]
    if missing:
        raise ConfigError(missing[0], "sweep axis missing (flag or grid entry required)")
    return grid


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(what, f"expected comma-separated numbers, got {text!r}") from exc


def _sweep_point(
    base: dict[str, Any],
    point: dict[str, Any],
    index: int,
    base_seed: int,
    replicates: int,
) -> dict[str, Any]:
    data = dict(base)
    data.pop("p1", None)
    data.pop("p2", None)
    data.update(point)
    config = run_config_from_dict(data)
    report = build_report(config)
    omega_r = config.trajectory.spec.omega_r

    errors, significances, corr_raw, corr_processed = [], [], [], []
    seed = base_seed
    for replicate in range(replicates):
        seed = derive_seed(base_seed, index, replicate)
        run = replace(config, trajectory=replace(config.trajectory, seed=seed))
        record, spectrum, processed = _run_simulation(run)
        peak = main_peak(spectrum)
        errors.append(
            math.nan if peak.index is None else abs(peak.frequency / omega_r - 1.0)
        )
        significances.append(peak.significant)
        corr_raw.append(_pearson(record.g2, record.c2_sq))
        corr_processed.append(_pearson(processed, record.c2_sq))

    return {
        "p0": config.trajectory.params.p0,
        "dp": config.trajectory.params.dp,
        "tau": config.trajectory.tau,
        "n_per_series": config.trajectory.n_per_series,
        "m_series": config.trajectory.m_series,
        "seed": seed if replicates == 1 else base_seed,
        "f": report["f"],
        "regime": report["regime"],
        "peak_freq_error": float(np.median(errors)),
        "peak_significant": sum(significances) * 2 >= len(significances),
        "corr_raw": float(np.median(corr_raw)),
        "corr_processed": float(np.median(corr_processed)),
    }


def _max_workers(n_points: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        cap = min(8, os.cpu_count() or 1)
    else:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ConfigError(THREADS_ENV, f"must be an integer, got {raw!r}") from exc
        if cap < 1:
            raise ConfigError(THREADS_ENV, f"must be >= 1, got {cap}")
    return max(1, min(cap, n_points))


def _cmd_sweep(args: argparse.Namespace) -> int:
    spec: dict[str, Any] = {}
    if args.config is not None:
        try:
            spec = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError("config", f"file not found: {args.config}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
    grid = _sweep_axes(args, spec)
    base = dict(spec.get("base", {}))
    if args.m is not None:
        base["m_series"] = args.m
    base.setdefault("m_series", 200)
    base_seed = args.seed if args.seed is not None else int(base.get("seed", 1))
    base.pop("seed", None)
    if args.engine is not None:
        base["engine"] = args.engine
    replicates = args.seeds_per_point or int(spec.get("seeds_per_point", 1))

    axes = [grid["p0"], grid["dp"], grid["tau"], grid["n_per_series"]]
    points = [
        {"p0": p0, "dp": dp, "tau": tau, "n_per_series": n}
        for p0, dp, tau, n in itertools.product(*axes)
    ]

    def run_point(item: tuple[int, dict[str, Any]]):
        index, point = item
        try:
            return _sweep_point(base, point, index, base_seed, replicates)
        except (ConfigError, ParameterError, StateError) as exc:
            print(f"warning: skipping grid point {index} {point}: {exc}", file=sys.stderr)
            return None

    workers = _max_workers(len(points))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_point, enumerate(points)))
    else:
        results = [run_point(item) for item in enumerate(points)]

    rows = [row for row in results if row is not None]
    skipped = len(results) - len(rows)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    echo = {"grid": grid, "base": base, "seed": base_seed, "seeds_per_point": replicates}
    artifacts.write_sweep_csv(out_dir / "sweep.csv", rows, skipped, echo)
    print(f"wrote sweep.csv ({len(rows)} rows, {skipped} skipped)")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="unsharp-monitor",
        description=(
            "Monitor Rabi oscillations of a single two-level system through "
            "sequences of unsharp measurements."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p: argparse.ArgumentParser, with_engine: bool = True) -> None:
        p.add_argument("--config", help="JSON run configuration file")
        p.add_argument("--preset", help="built-in preset: fig1, fig2 or fig3")
        p.add_argument("--seed", type=int, default=None, help="override the RNG seed")
        if with_engine:
            p.add_argument(
                "--engine",
                choices=("povm", "dilation"),
                default=None,
                help="measurement implementation route (identical output)",
            )
        p.add_argument("--out-dir", default=None, help="directory for emitted files")

    simulate = sub.add_parser("simulate", help="run one trajectory and emit artifacts")
    add_config_flags(simulate)
    simulate.add_argument(
        "--gnuplot", action="store_true", help="also write a ready-made gnuplot script"
    )
    simulate.set_defaults(func=_cmd_simulate)

    report = sub.add_parser("report", help="derived quantities without simulating")
    report.add_argument("--config", help="JSON run configuration file")
    report.add_argument("--preset", help="built-in preset: fig1, fig2 or fig3")
    report.add_argument("--seed", type=int, default=None)
    report.add_argument("--out-dir", default=None)
    report.set_defaults(func=_cmd_report)

    analyze = sub.add_parser("analyze", help="re-run noise reduction on a trajectory CSV")
    analyze.add_argument("csv", help="trajectory CSV emitted by simulate")
    analyze.add_argument("--out-dir", default=".")
    analyze.set_defaults(func=_cmd_analyze)

    sweep = sub.add_parser("sweep", help="map regime metrics over a parameter grid")
    sweep.add_argument("--config", help="JSON sweep spec: {grid, base, seeds_per_point}")
    sweep.add_argument("--p0", help="comma-separated p0 values")
    sweep.add_argument("--dp", help="comma-separated dp values")
    sweep.add_argument("--tau", help="comma-separated tau values (units of T_R)")
    sweep.add_argument("--n", help="comma-separated measurements per series")
    sweep.add_argument("--m", type=int, default=None, help="series per trajectory (default 200)")
    sweep.add_argument("--seeds-per-point", type=int, default=None)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--engine", choices=("povm", "dilation"), default=None)
    sweep.add_argument("--out-dir", default=".")
    sweep.set_defaults(func=_cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ArtifactError, AnalysisError, ParameterError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
