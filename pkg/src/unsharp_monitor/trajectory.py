"""Monte Carlo trajectories: driving interleaved with random unsharp measurements.

One simulation step evolves the state for a time tau and then draws one
measurement outcome; n_per_series steps form an N-series, after which the
upper-level population and the best guess are recorded at t_m = m * n * tau.
A trajectory chains m_series such series, always continuing from the state
the previous series left behind.

RNG contract: a trajectory consumes a single stream seeded from
``config.seed`` (numpy default generator).  Evolution consumes nothing;
every measurement consumes exactly one uniform variate u, compared against
the "+" probability (u < p_plus reads "+", ties read "-").  Identical seeds
therefore reproduce identical records bit for bit, for both engines.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import meter
from .povm import (
    DegenerateOutcomeError,
    ParameterError,
    PovmParams,
    StateVector,
    LEVEL_ONE,
    _abs2,
    _clamp_probability,
    ensure_normalized,
)
from .rabi import HamiltonianSpec, rotation_half_angles, rotate_amplitudes
from .series import MAX_SERIES_LENGTH, NSeriesOutcome, RegimeParams, evaluate_regime

ENGINES = ("povm", "dilation")


class TimeResolutionWarning(UserWarning):
    """The series spacing is too coarse to resolve the Rabi oscillation."""


class SeriesBoundWarning(UserWarning):
    """The series length strains or violates the best-guess validity bound."""


@dataclass(frozen=True)
class TrajectoryConfig:
    """Immutable description of one trajectory run.

    ``tau`` may be zero (an immediate succession of measurements with no
    driving in between); the CLI layer additionally requires tau > 0 for
    full runs.  Construction validates all invariants and emits warnings
    when the series spacing n * tau reaches a tenth of the Rabi period or
    when the series-length bound is strained.
    """

    params: PovmParams
    tau: float
    n_per_series: int
    m_series: int
    initial_state: StateVector = LEVEL_ONE
    spec: HamiltonianSpec = field(default_factory=HamiltonianSpec)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tau < 0.0:
            raise ParameterError(f"tau = {self.tau!r} must be >= 0")
        if not 1 <= self.n_per_series <= MAX_SERIES_LENGTH:
            raise ParameterError(
                f"n_per_series = {self.n_per_series} must lie in [1, {MAX_SERIES_LENGTH}]"
            )
        if self.m_series < 1:
            raise ParameterError(f"m_series = {self.m_series} must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError(f"seed = {self.seed!r} must be a 64-bit unsigned integer")
        ensure_normalized(self.initial_state, "initial state")
        if self.delta_t >= self.spec.t_r / 10.0:
            warnings.warn(
                f"series spacing delta_t = {self.delta_t:g} is not small against "
                f"the Rabi period {self.spec.t_r:g}; readout samples will undersample "
                "the oscillation",
                TimeResolutionWarning,
                stacklevel=2,
            )
        if self.params.dp != 0.0:
            regime = self.regime
            if regime.nbound_tier == "violated":
                warnings.warn(
                    f"series-length bound violated: ratio = {regime.nbound_ratio:.3g} >= 1; "
                    "the best guess is not a controlled approximation of the "
                    "upper-level population",
                    SeriesBoundWarning,
                    stacklevel=2,
                )
            elif regime.nbound_tier == "loose":
                warnings.warn(
                    f"series-length bound only loosely satisfied: "
                    f"ratio = {regime.nbound_ratio:.3g} > 0.25",
                    SeriesBoundWarning,
                    stacklevel=2,
                )

    @property
    def delta_t(self) -> float:
        """Series spacing n_per_series * tau between recorded samples."""
        return self.n_per_series * self.tau

    @property
    def regime(self) -> RegimeParams:
        """Derived time scales and bound diagnostics (requires dp != 0)."""
        return evaluate_regime(self.params, self.tau, self.n_per_series, self.spec.t_r)


@dataclass(frozen=True)
class TrajectoryRecord:
    """Recorded samples of one trajectory, one row per N-series.

    ``t`` holds t_m = m * delta_t with m = 1..m_series; ``c2_sq`` the
    upper-level population right after each series; ``g2`` the best guess
    formed from that series' counts.
    """

    config: TrajectoryConfig
    m: np.ndarray
    t: np.ndarray
    c2_sq: np.ndarray
    g2: np.ndarray

    @property
    def rng_seed(self) -> int:
        return self.config.seed


def _draw_step(
    c1: complex,
    c2: complex,
    cos_half: float,
    sin_half: float,
    params: PovmParams,
    uniform,
    dilation: bool,
) -> tuple[complex, complex, bool]:
    """One evolve-and-measure step on raw amplitudes; shared hot path.

    The povm engine computes p_plus from the effect expectation, the
    dilation engine from the meter branch amplitudes; post-measurement
    amplitudes are formed identically so both engines yield bit-identical
    states for the same draws.
    """
    if sin_half != 0.0:
        c1, c2 = rotate_amplitudes(c1, c2, cos_half, sin_half)
    u1p = params.u1_plus
    u2p = params.u2_plus
    if dilation:
        b1 = u1p * c1
        b2 = u2p * c2
        p_plus = _clamp_probability(_abs2(b1) + _abs2(b2), "p_plus")
    else:
        p_plus = _clamp_probability(
            params.p1 * _abs2(c1) + params.p2 * _abs2(c2), "p_plus"
        )
    plus = uniform() < p_plus
    if plus:
        n1 = u1p * c1
        n2 = u2p * c2
    else:
        n1 = params.u1_minus * c1
        n2 = params.u2_minus * c2
    norm_sq = _abs2(n1) + _abs2(n2)
    if norm_sq == 0.0:
        raise DegenerateOutcomeError(
            "measurement produced the zero vector (zero-probability branch)"
        )
    norm = math.sqrt(norm_sq)
    return n1 / norm, n2 / norm, plus


def _check_engine(engine: str) -> bool:
    if engine not in ENGINES:
        raise ParameterError(f"engine = {engine!r} must be one of {ENGINES}")
    return engine == "dilation"


def simulate_step(
    state: StateVector,
    config: TrajectoryConfig,
    rng: np.random.Generator,
    engine: str = "povm",
) -> tuple[StateVector, meter.Outcome]:
    """Evolve for tau, then measure once; returns the new state and outcome."""
    ensure_normalized(state)
    dilation = _check_engine(engine)
    cos_half, sin_half = rotation_half_angles(config.tau, config.spec)
    c1, c2, plus = _draw_step(
        state.c1, state.c2, cos_half, sin_half, config.params, rng.random, dilation
    )
    return StateVector(c1, c2), ("+" if plus else "-")


def simulate_nseries(
    state: StateVector,
    config: TrajectoryConfig,
    rng: np.random.Generator,
    engine: str = "povm",
) -> tuple[StateVector, NSeriesOutcome]:
    """Run one N-series from ``state``; the count is accumulated over n steps.

    The best guess is NaN when dp = 0 (uninformative measurement); the
    post-series state is what callers should sample populations from.
    """
    ensure_normalized(state)
    dilation = _check_engine(engine)
    cos_half, sin_half = rotation_half_angles(config.tau, config.spec)
    params = config.params
    uniform = rng.random
    c1, c2 = state.c1, state.c2
    n = config.n_per_series
    n_plus = 0
    for _ in range(n):
        c1, c2, plus = _draw_step(c1, c2, cos_half, sin_half, params, uniform, dilation)
        if plus:
            n_plus += 1
    r = n_plus / n
    g2 = (r - params.p1) / params.dp if params.dp != 0.0 else math.nan
    return StateVector(c1, c2), NSeriesOutcome(n_total=n, n_plus=n_plus, r=r, g2=g2)


def simulate_trajectory(config: TrajectoryConfig, engine: str = "povm") -> TrajectoryRecord:
    """Run the full chain of m_series N-series and record the samples.

    Deterministic for a given config and seed.  The state is renormalized
    after every measurement, so recorded populations stay in [0, 1] to
    float precision.
    """
    dilation = _check_engine(engine)
    params = config.params
    cos_half, sin_half = rotation_half_angles(config.tau, config.spec)
    rng = np.random.default_rng(config.seed)
    uniform = rng.random
    n = config.n_per_series
    m_total = config.m_series
    delta_t = config.delta_t
    dp = params.dp
    p1 = params.p1

    c1, c2 = config.initial_state.c1, config.initial_state.c2
    c2_sq = np.empty(m_total, dtype=float)
    g2 = np.empty(m_total, dtype=float)
    for m in range(m_total):
        n_plus = 0
        for _ in range(n):
            c1, c2, plus = _draw_step(
                c1, c2, cos_half, sin_half, params, uniform, dilation
            )
            if plus:
                n_plus += 1
        c2_sq[m] = _abs2(c2)
        g2[m] = (n_plus / n - p1) / dp if dp != 0.0 else math.nan

    m_index = np.arange(1, m_total + 1)
    return TrajectoryRecord(
        config=config,
        m=m_index,
        t=m_index * delta_t,
        c2_sq=c2_sq,
        g2=g2,
    )
