"""Run configuration: file schema, presets, validation, seed derivation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .povm import ParameterError, PovmParams, StateError, StateVector
from .rabi import HamiltonianSpec
from .spectral import classify_regime
from .trajectory import ENGINES, TrajectoryConfig

SCHEMA_VERSION = "unsharp-monitor/1"
DEFAULT_SEED = 1


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"config field '{field_name}': {message}")
        self.field = field_name


# The three regime presets share the published parameter point
# (p0 = 0.5, tau = 0.002 Rabi periods, 25 measurements per series) and
# differ in the split dp.  Run lengths are implementation choices; fig2 is
# short because even its weak measurements diffuse the oscillation phase by
# order one within a few tens of Rabi periods, after which the recorded
# populations no longer follow a single phase-aligned sinusoid.
PRESETS: dict[str, dict[str, Any]] = {
    "fig1": {"p0": 0.5, "dp": -0.3, "tau": 0.002, "n_per_series": 25, "m_series": 2000},
    "fig2": {"p0": 0.5, "dp": 0.01, "tau": 0.002, "n_per_series": 25, "m_series": 60},
    "fig3": {"p0": 0.5, "dp": 0.08, "tau": 0.002, "n_per_series": 25, "m_series": 2000},
}

_ALLOWED_KEYS = {
    "p0", "dp", "p1", "p2", "tau", "n_per_series", "m_series", "initial_state",
    "seed", "engine", "wiener", "truncation", "f_lo", "f_hi", "t_r",
    "a1", "a2", "drive_omega", "out_dir",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of a trajectory config plus analysis settings."""

    trajectory: TrajectoryConfig
    engine: str = "povm"
    wiener: bool = True
    truncation: bool = True
    f_lo: float = 0.3
    f_hi: float = 5.0
    out_dir: str | None = None

    def __post_init__(self) -> None:
        if self.engine not in ENGINES:
            raise ConfigError("engine", f"must be one of {ENGINES}, got {self.engine!r}")
        if not 0.0 <= self.f_lo <= self.f_hi:
            raise ConfigError("f_lo", f"need 0 <= f_lo <= f_hi, got ({self.f_lo}, {self.f_hi})")

    def resolved(self) -> dict[str, Any]:
        """Full configuration echo embedded in every emitted artifact.

        The engine and output directory are deliberately excluded: the
        engine selects an implementation route with contractually identical
        output, and paths are volatile, so artifacts from both engines and
        any directory compare byte-identical.
        """
        t = self.trajectory
        state = t.initial_state
        resolved = {
            "p1": t.params.p1,
            "p2": t.params.p2,
            "p0": t.params.p0,
            "dp": t.params.dp,
            "tau": t.tau,
            "n_per_series": t.n_per_series,
            "m_series": t.m_series,
            "t_r": t.spec.t_r,
            "initial_state": [
                [state.c1.real, state.c1.imag],
                [state.c2.real, state.c2.imag],
            ],
            "seed": t.seed,
            "wiener": self.wiener,
            "truncation": self.truncation,
            "f_lo": self.f_lo,
            "f_hi": self.f_hi,
        }
        # canonical (sorted) key order so artifacts compare byte for byte
        # against re-analysis runs that read the echo back from a file
        return dict(sorted(resolved.items()))


def _parse_amplitude(value: Any, field_name: str) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(field_name, f"expected a number or [re, im] pair, got {value!r}")


def _parse_params(data: dict[str, Any]) -> PovmParams:
    has_p12 = "p1" in data or "p2" in data
    has_p0dp = "p0" in data or "dp" in data
    if has_p12 and has_p0dp:
        raise ConfigError("p0", "give either (p1, p2) or (p0, dp), not both")
    try:
        if has_p12:
            return PovmParams(float(data["p1"]), float(data["p2"]))
        return PovmParams.from_p0_dp(float(data["p0"]), float(data["dp"]))
    except KeyError as exc:
        raise ConfigError(exc.args[0], "missing") from exc
    except ParameterError as exc:
        raise ConfigError("p1/p2" if has_p12 else "p0/dp", str(exc)) from exc


def run_config_from_dict(data: dict[str, Any]) -> RunConfig:
    """Build and validate a RunConfig from a plain dict (the file schema)."""
    unknown = set(data) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown key")
    params = _parse_params(data)
    if params.dp == 0.0:
        raise ConfigError("dp", "dp = 0 carries no information; the readout is undefined")

    try:
        spec = HamiltonianSpec(
            t_r=float(data.get("t_r", 1.0)),
            a1=data.get("a1"),
            a2=data.get("a2"),
            drive_omega=data.get("drive_omega"),
        )
    except ParameterError as exc:
        raise ConfigError("drive_omega", str(exc)) from exc

    state_raw = data.get("initial_state")
    if state_raw is None:
        initial_state = StateVector(1.0, 0.0)
    else:
        if not isinstance(state_raw, dict) or set(state_raw) != {"c1", "c2"}:
            raise ConfigError("initial_state", 'expected {"c1": ..., "c2": ...}')
        initial_state = StateVector(
            _parse_amplitude(state_raw["c1"], "initial_state.c1"),
            _parse_amplitude(state_raw["c2"], "initial_state.c2"),
        )

    tau = float(data.get("tau", math.nan))
    if not tau > 0.0:
        raise ConfigError("tau", f"must be > 0, got {data.get('tau')!r}")
    m_series = int(data.get("m_series", 0))
    if m_series < 4:
        raise ConfigError("m_series", f"must be >= 4 (spectral analysis needs it), got {m_series}")

    try:
        trajectory = TrajectoryConfig(
            params=params,
            tau=tau,
            n_per_series=int(data.get("n_per_series", 0)),
            m_series=m_series,
            initial_state=initial_state,
            spec=spec,
            seed=int(data.get("seed", DEFAULT_SEED)),
        )
    except (ParameterError, StateError) as exc:
        raise ConfigError("n_per_series/initial_state/seed", str(exc)) from exc

    out_dir = data.get("out_dir")
    return RunConfig(
        trajectory=trajectory,
        engine=str(data.get("engine", "povm")),
        wiener=bool(data.get("wiener", True)),
        truncation=bool(data.get("truncation", True)),
        f_lo=float(data.get("f_lo", 0.3)),
        f_hi=float(data.get("f_hi", 5.0)),
        out_dir=None if out_dir is None else str(out_dir),
    )


def load_run_config(
    path: str | Path | None = None,
    preset: str | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Load a config file or preset and apply flag overrides (flags win)."""
    if (path is None) == (preset is None):
        raise ConfigError("config", "give exactly one of a config file or a preset")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        data = dict(PRESETS[preset])
    else:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError("config", f"file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config", "top-level JSON value must be an object")
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value
    return run_config_from_dict(data)


def build_report(config: RunConfig) -> dict[str, Any]:
    """Derived quantities of a run: parameters, time scales, bound, regime."""
    t = config.trajectory
    regime = t.regime
    return {
        "p1": t.params.p1,
        "p2": t.params.p2,
        "p0": t.params.p0,
        "dp": t.params.dp,
        "T_lr": regime.t_lr,
        "f": regime.f,
        "n_min": regime.n_min,
        "nbound_rhs": regime.nbound_rhs,
        "nbound_ratio": regime.nbound_ratio,
        "regime": classify_regime(regime.f, config.f_lo, config.f_hi),
        "seed": t.seed,
    }


_MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(base_seed: int, index: int, replicate: int = 0) -> int:
    """Per-point seed for sweeps: base_seed XOR a 64-bit hash of the index.

    Distinct (index, replicate) pairs give independent, reproducible
    streams regardless of execution order.
    """
    if replicate < 0 or replicate >= (1 << 20):
        raise ParameterError(f"replicate = {replicate} must lie in [0, 2^20)")
    return (base_seed ^ _splitmix64(((index << 20) | replicate) & _MASK64)) & _MASK64
