"""Monte Carlo trajectory machinery: determinism, distributions, regimes."""

import math
import warnings

import numpy as np
import pytest
from scipy import stats

from unsharp_monitor import (
    HamiltonianSpec,
    LEVEL_ONE,
    ParameterError,
    PovmParams,
    SeriesBoundWarning,
    StateError,
    StateVector,
    TimeResolutionWarning,
    TrajectoryConfig,
    best_guess,
    evolve,
    main_peak,
    nseries_probability,
    power_spectrum,
    simulate_nseries,
    simulate_step,
    simulate_trajectory,
)


def quiet_config(**kwargs) -> TrajectoryConfig:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return TrajectoryConfig(**kwargs)


FIG3_PARAMS = PovmParams.from_p0_dp(0.5, 0.08)


class TestConfigValidation:
    def test_rejects_bad_fields(self):
        good = dict(params=FIG3_PARAMS, tau=0.002, n_per_series=25, m_series=10)
        with pytest.raises(ParameterError):
            quiet_config(**{**good, "tau": -0.1})
        with pytest.raises(ParameterError):
            quiet_config(**{**good, "n_per_series": 0})
        with pytest.raises(ParameterError):
            quiet_config(**{**good, "n_per_series": 65})
        with pytest.raises(ParameterError):
            quiet_config(**{**good, "m_series": 0})
        with pytest.raises(ParameterError):
            quiet_config(**{**good, "seed": -1})
        with pytest.raises(StateError):
            quiet_config(**{**good, "initial_state": StateVector(1.0, 1.0)})

    @pytest.mark.filterwarnings("ignore::unsharp_monitor.SeriesBoundWarning")
    def test_coarse_spacing_warns(self):
        with pytest.warns(TimeResolutionWarning):
            TrajectoryConfig(
                params=PovmParams.from_p0_dp(0.5, 0.01),
                tau=0.01,
                n_per_series=25,
                m_series=10,
            )

    def test_violated_bound_warns(self):
        with pytest.warns(SeriesBoundWarning, match="violated"):
            TrajectoryConfig(
                params=PovmParams.from_p0_dp(0.5, -0.3),
                tau=0.002,
                n_per_series=25,
                m_series=10,
            )

    def test_loose_bound_warns(self):
        with pytest.warns(SeriesBoundWarning, match="loosely"):
            TrajectoryConfig(params=FIG3_PARAMS, tau=0.002, n_per_series=25, m_series=10)

    def test_comfortable_bound_is_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            TrajectoryConfig(
                params=PovmParams.from_p0_dp(0.5, 0.01),
                tau=0.002,
                n_per_series=25,
                m_series=10,
            )

    def test_delta_t_and_regime_attached(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=25, m_series=10)
        assert cfg.delta_t == pytest.approx(0.05, abs=1e-15)
        assert cfg.regime.nbound_ratio == pytest.approx(0.604, abs=1e-3)


class TestSimulateStep:
    def test_symmetric_params_reduce_to_pure_evolution(self):
        cfg = quiet_config(
            params=PovmParams(0.3, 0.3), tau=0.01, n_per_series=1, m_series=1
        )
        rng = np.random.default_rng(51)
        state = StateVector(0.6, 0.8j)
        outcomes = []
        for _ in range(2000):
            after, outcome = simulate_step(state, cfg, rng)
            expected = evolve(state, 0.01, HamiltonianSpec())
            assert abs(after.c1 - expected.c1) < 1e-12
            assert abs(after.c2 - expected.c2) < 1e-12
            outcomes.append(outcome)
        share = outcomes.count("+") / len(outcomes)
        assert abs(share - 0.3) < 4 * math.sqrt(0.3 * 0.7 / 2000)

    def test_sharp_eigenstate_is_pinned(self):
        cfg = quiet_config(
            params=PovmParams(1.0, 0.0), tau=0.0, n_per_series=1, m_series=1
        )
        rng = np.random.default_rng(52)
        state = LEVEL_ONE
        for _ in range(100):
            state, outcome = simulate_step(state, cfg, rng)
            assert outcome == "+"
            assert state.c1 == 1.0 and state.c2 == 0.0

    def test_fixed_seed_reproduces_bitwise(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=1, m_series=1)
        results = []
        for _ in range(2):
            rng = np.random.default_rng(53)
            state, outcome = simulate_step(StateVector(0.6, 0.8), cfg, rng)
            results.append((state.c1, state.c2, outcome))
        assert results[0] == results[1]

    def test_engines_agree(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=1, m_series=1)
        state = StateVector(0.6, 0.8)
        a = simulate_step(state, cfg, np.random.default_rng(54), engine="povm")
        b = simulate_step(state, cfg, np.random.default_rng(54), engine="dilation")
        assert a == b

    def test_unknown_engine_rejected(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=1, m_series=1)
        with pytest.raises(ParameterError):
            simulate_step(LEVEL_ONE, cfg, np.random.default_rng(0), engine="exact")

    def test_dilation_engine_is_bitwise_the_meter_module(self):
        # the trajectory hot path inlines the dilation arithmetic; pin it
        # to the meter module exactly so the two cannot drift apart
        from unsharp_monitor import dilate, measure_meter

        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=1, m_series=1)
        rng = np.random.default_rng(58)
        state = StateVector(0.6, 0.8)
        for _ in range(200):
            draws = rng.bit_generator.state
            inline_state, inline_outcome = simulate_step(
                state, cfg, rng, engine="dilation"
            )
            replay = np.random.default_rng()
            replay.bit_generator.state = draws
            evolved = evolve(state, cfg.tau, cfg.spec)
            module_outcome, module_state = measure_meter(
                dilate(evolved, cfg.params), replay
            )
            assert inline_outcome == module_outcome
            assert inline_state.c1 == module_state.c1
            assert inline_state.c2 == module_state.c2
            state = inline_state


class TestSimulateNSeries:
    def test_single_step_reduction(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=1, m_series=1)
        state = StateVector(0.6, 0.8)
        direct_state, outcome = simulate_step(state, cfg, np.random.default_rng(55))
        series_state, series = simulate_nseries(state, cfg, np.random.default_rng(55))
        assert (series_state.c1, series_state.c2) == (direct_state.c1, direct_state.c2)
        assert series.n_plus == (1 if outcome == "+" else 0)
        assert series.g2 == best_guess(series.r, FIG3_PARAMS)

    def test_symmetric_params_keep_exact_rabi_law(self):
        cfg = quiet_config(
            params=PovmParams(0.5, 0.5), tau=0.002, n_per_series=25, m_series=1
        )
        rng = np.random.default_rng(56)
        state, series = simulate_nseries(LEVEL_ONE, cfg, rng)
        assert state.c2_sq == pytest.approx(math.sin(math.pi * 0.05) ** 2, abs=1e-12)
        assert math.isnan(series.g2)

    def test_plus_counts_follow_closed_form(self):
        # immediate succession (tau = 0) from a fixed state: the count
        # distribution must match the exact expression
        params = PovmParams(0.46, 0.54)
        state = StateVector(0.6, 0.8)
        n = 6
        cfg = quiet_config(params=params, tau=0.0, n_per_series=n, m_series=1)
        rng = np.random.default_rng(57)
        reps = 20_000
        counts = np.zeros(n + 1, dtype=int)
        for _ in range(reps):
            _, series = simulate_nseries(state, cfg, rng)
            counts[series.n_plus] += 1
        expected = np.array(
            [nseries_probability(state, params, n, k) for k in range(n + 1)]
        )
        result = stats.chisquare(counts, expected * reps)
        assert result.pvalue > 0.01


class TestSimulateTrajectory:
    def test_records_are_deterministic(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=25, m_series=50, seed=99)
        a = simulate_trajectory(cfg)
        b = simulate_trajectory(cfg)
        assert np.array_equal(a.c2_sq, b.c2_sq)
        assert np.array_equal(a.g2, b.g2)
        assert np.array_equal(a.t, b.t)
        assert a.rng_seed == 99

    def test_sample_grid(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=25, m_series=40)
        record = simulate_trajectory(cfg)
        assert list(record.m) == list(range(1, 41))
        assert record.t[0] == pytest.approx(cfg.delta_t, abs=1e-15)
        steps = np.diff(record.t)
        assert np.max(np.abs(steps - cfg.delta_t)) < 1e-12

    def test_engines_emit_identical_records(self):
        cfg = quiet_config(params=FIG3_PARAMS, tau=0.002, n_per_series=25, m_series=80, seed=5)
        a = simulate_trajectory(cfg, engine="povm")
        b = simulate_trajectory(cfg, engine="dilation")
        assert np.array_equal(a.c2_sq, b.c2_sq)
        assert np.array_equal(a.g2, b.g2)

    def test_populations_stay_physical_over_long_runs(self):
        # 1e5 measurements with renormalization after each one
        cfg = quiet_config(
            params=PovmParams.from_p0_dp(0.5, 0.01),
            tau=0.002,
            n_per_series=50,
            m_series=2000,
            seed=3,
        )
        record = simulate_trajectory(cfg)
        assert np.all(record.c2_sq >= -1e-12)
        assert np.all(record.c2_sq <= 1.0 + 1e-12)

    def test_norm_maintained_through_long_series_chain(self):
        cfg = quiet_config(
            params=FIG3_PARAMS, tau=0.002, n_per_series=50, m_series=1, seed=0
        )
        rng = np.random.default_rng(12)
        state = LEVEL_ONE
        for _ in range(2000):  # 1e5 measurements in total
            state, _ = simulate_nseries(state, cfg, rng)
            assert abs(state.norm_sq - 1.0) <= 1e-9

    def test_zeno_pinning_with_projective_measurements(self):
        # sharp measurements at tau = 0.002 freeze the ground state: the
        # chance of leaving the lower level within one Rabi period is small
        params = PovmParams.from_p0_dp(0.5, 1.0)
        left = 0
        runs = 200
        for seed in range(runs):
            cfg = quiet_config(
                params=params, tau=0.002, n_per_series=25, m_series=20, seed=seed
            )
            record = simulate_trajectory(cfg)
            left += bool(np.any(record.c2_sq >= 0.1))
        assert left / runs < 0.2

    def test_rabi_regime_peak_matches_drive_frequency(self):
        # fuzziness 62.8: the population curve oscillates at the Rabi
        # frequency; its spectral peak must sit within 5 percent
        cfg = quiet_config(
            params=PovmParams.from_p0_dp(0.5, 0.01),
            tau=0.002,
            n_per_series=25,
            m_series=60,
            seed=8,
        )
        record = simulate_trajectory(cfg)
        peak = main_peak(power_spectrum(record.c2_sq, cfg.delta_t))
        omega_r = 2 * math.pi
        assert abs(peak.frequency / omega_r - 1.0) < 0.05

    def test_rabi_regime_follows_undisturbed_law(self):
        # weak measurements (fuzziness 62.8) leave the oscillation nearly
        # untouched over a few periods; representative fixed realization
        cfg = quiet_config(
            params=PovmParams.from_p0_dp(0.5, 0.01),
            tau=0.002,
            n_per_series=25,
            m_series=60,
            seed=7,
        )
        record = simulate_trajectory(cfg)
        undisturbed = np.sin(np.pi * record.t) ** 2
        assert np.max(np.abs(record.c2_sq - undisturbed)) < 0.15

    def test_jump_regime_dwells_at_poles(self):
        cfg = quiet_config(
            params=PovmParams.from_p0_dp(0.5, -0.3),
            tau=0.002,
            n_per_series=25,
            m_series=500,
            seed=4,
        )
        record = simulate_trajectory(cfg)
        dwell = np.mean((record.c2_sq <= 0.1) | (record.c2_sq >= 0.9))
        assert dwell >= 0.8
