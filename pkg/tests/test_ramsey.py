import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qngcoh.channels import TruncationError
from qngcoh.fock import FockPair
from qngcoh.ramsey import (ConditioningError, FitError, MappingConditionError,
                           NoiseConfig, PulseKind, PulseSpec,
                           SpinOscState, apply_pulse, build_sequence_0n,
                           build_sequence_mn, decay_scan, find_mapping_pulse,
                           fit_fringe, fit_populations, motional_populations,
                           prepared_state, pulse_unitary, run_ramsey)
from qngcoh.thresholds import ThresholdKind, threshold

PHASES = np.linspace(0.0, 2.0 * math.pi, 16, endpoint=False)

# the spectroscopy constants used throughout the population-fit tests
CARRIER_RABI = 2 * math.pi * 34.8e3
ETA = 0.063
GAMMA0 = 2 * math.pi * 0.042e3
X_EXP = 0.7


def rabi_signal(populations, times, n_max):
    """Ground-state Rabi trace generated from the same decay model."""
    ns = np.arange(n_max + 1)
    omega = CARRIER_RABI * ETA * np.sqrt(ns + 1.0)
    gamma = GAMMA0 * (ns + 1.0) ** X_EXP
    comps = np.cos(np.outer(times, omega)) * np.exp(-np.outer(times, gamma))
    pg = 0.5 * (1.0 + comps @ np.asarray(populations))
    return np.column_stack([times, pg])


class TestPulses:
    def test_bsb_pi_full_flop(self):
        state = SpinOscState.ground(8)
        out = apply_pulse(state, PulseSpec(PulseKind.BSB, math.pi))
        assert abs(out.amplitudes[1, 1]) == pytest.approx(1.0, abs=1e-12)

    def test_bsb_half_pulse_superposition(self):
        state = SpinOscState.ground(8)
        out = apply_pulse(state, PulseSpec(PulseKind.BSB, math.pi / 2))
        assert out.amplitudes[0, 0] == pytest.approx(1 / math.sqrt(2))
        assert out.amplitudes[1, 1] == pytest.approx(-1j / math.sqrt(2))

    def test_rsb_on_ground_is_identity(self):
        state = SpinOscState.ground(8)
        out = apply_pulse(state, PulseSpec(PulseKind.RSB, 2.345, 0.6))
        assert np.array_equal(out.amplitudes, state.amplitudes)

    def test_shelve_round_trip(self):
        state = SpinOscState.ground(6)
        shelved = apply_pulse(state, PulseSpec(PulseKind.SHELVE, math.pi))
        assert abs(shelved.amplitudes[2, 0]) == pytest.approx(1.0)
        back = apply_pulse(shelved, PulseSpec(PulseKind.UNSHELVE, math.pi))
        assert back.amplitudes[0, 0] == pytest.approx(1.0, abs=1e-12)

    @given(kind=st.sampled_from(list(PulseKind)),
           area=st.floats(0.0, 4 * math.pi), phase=st.floats(0, 2 * math.pi),
           seed=st.integers(0, 2**31))
    def test_norm_preserved(self, kind, area, phase, seed):
        rng = np.random.default_rng(seed)
        amps = rng.normal(size=(3, 10)) + 1j * rng.normal(size=(3, 10))
        amps[:, -1] = 0.0  # stay clear of the truncation edge
        amps /= np.linalg.norm(amps)
        out = apply_pulse(SpinOscState(amps), PulseSpec(kind, area, phase))
        assert out.norm() == pytest.approx(1.0, abs=1e-9)

    def test_truncation_edge_raises(self):
        amps = np.zeros((3, 4), dtype=complex)
        amps[0, 3] = 1.0
        with pytest.raises(TruncationError):
            apply_pulse(SpinOscState(amps), PulseSpec(PulseKind.BSB, math.pi))

    def test_pulse_detuning_reserved(self):
        with pytest.raises(ValueError):
            apply_pulse(SpinOscState.ground(4),
                        PulseSpec(PulseKind.BSB, 1.0, detuning=100.0))

    def test_unitary_matches_pure_application(self):
        pulse = PulseSpec(PulseKind.RSB, 1.7, 0.9)
        u = pulse_unitary(pulse, 6)
        assert np.max(np.abs(u @ u.conj().T - np.eye(18))) < 1e-12
        state = apply_pulse(apply_pulse(SpinOscState.ground(6),
                                        PulseSpec(PulseKind.BSB, math.pi)),
                            pulse)
        vec = u @ apply_pulse(SpinOscState.ground(6),
                              PulseSpec(PulseKind.BSB, math.pi)
                              ).amplitudes.reshape(-1)
        assert np.max(np.abs(vec - state.amplitudes.reshape(-1))) < 1e-12


class TestSequences:
    def test_0n_structures(self):
        assert [p.kind for p in build_sequence_0n(1).prep] == [PulseKind.BSB]
        seq2 = build_sequence_0n(2)
        assert len(seq2.prep) == 2
        assert [p.kind for p in seq2.prep] == [PulseKind.BSB, PulseKind.RSB]
        seq4 = build_sequence_0n(4)
        kinds4 = [p.kind for p in seq4.prep]
        assert kinds4[1] == PulseKind.SHELVE and kinds4[-1] == PulseKind.UNSHELVE
        assert PulseKind.SHELVE not in [p.kind for p in seq2.prep]

    def test_0n_analysis_mirrors_prep(self):
        seq = build_sequence_0n(3, phase_offset=0.4)
        assert len(seq.analysis) == len(seq.prep)
        assert seq.analysis[-1].kind == PulseKind.BSB
        assert seq.analysis[-1].phase == pytest.approx(math.pi + 0.4)

    def test_0n_range(self):
        with pytest.raises(ValueError):
            build_sequence_0n(0)
        with pytest.raises(ValueError):
            build_sequence_0n(9)

    def test_mn_variant_selection(self):
        assert build_sequence_mn(1, 2).meta["variant"] == "carrier"
        assert build_sequence_mn(1, 3).meta["variant"] == "bsb"

    def test_mn_delta_guard(self):
        with pytest.raises(ValueError):
            build_sequence_mn(1, 5)

    def test_mapping_scan_matches_bruteforce(self):
        for (m, n) in [(1, 2), (2, 3), (1, 3), (2, 4)]:
            found = find_mapping_pulse(m, n)
            # independent brute-force scan of the near-integer condition
            expected = next(j for j in range(200)
                            if abs((2 * j + 1) * math.sqrt(m / n) / 2
                                   - round((2 * j + 1) * math.sqrt(m / n) / 2))
                            <= 0.02)
            assert found["j"] == expected
            assert abs(found["l"] - round(found["l"])) <= 0.02

    def test_mapping_condition_error(self):
        with pytest.raises(MappingConditionError):
            find_mapping_pulse(2, 3, j_max=2, tol=1e-4)


class TestRunRamsey:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_ideal_contrast(self, n):
        fringe = run_ramsey(build_sequence_0n(n), 0.0, NoiseConfig(), PHASES)
        assert fringe.contrast >= 1.0 - 1e-6

    def test_ideal_fringe_shape(self):
        fringe = run_ramsey(build_sequence_0n(2), 0.0, NoiseConfig(), PHASES)
        pes = np.array([p for _, p, _ in fringe.points])
        model = 0.5 * (1 + fringe.contrast
                       * np.cos(PHASES - fringe.fit_phase_offset))
        assert np.max(np.abs(pes - model)) < 1e-9

    def test_mixed_pair_ideal_contrast(self):
        for (m, n) in [(1, 2), (1, 3), (2, 3)]:
            fringe = run_ramsey(build_sequence_mn(m, n), 0.0, NoiseConfig(),
                                PHASES)
            assert fringe.contrast >= 0.99

    def test_dephasing_contrast_ratio(self):
        seq = build_sequence_0n(2)
        gamma_rate, delay = 20.0, 0.01
        base = run_ramsey(seq, 0.0, NoiseConfig(), PHASES).contrast
        noisy = run_ramsey(seq, delay, NoiseConfig(dephasing_rate=gamma_rate),
                           PHASES).contrast
        expected = math.exp(-gamma_rate * delay * 4 / 2)
        assert noisy / base == pytest.approx(expected, abs=1e-6)

    def test_detuning_shifts_fringe_by_n_dw_tau(self):
        for n in (1, 3):
            seq = build_sequence_0n(n)
            dw, tau = 250.0, 0.004
            base = run_ramsey(seq, tau, NoiseConfig(), PHASES)
            shifted = run_ramsey(seq, tau,
                                 NoiseConfig(delay_detuning=dw), PHASES)
            delta = (shifted.fit_phase_offset - base.fit_phase_offset) \
                % (2 * math.pi)
            assert delta == pytest.approx((n * dw * tau) % (2 * math.pi),
                                          abs=1e-6)

    def test_thermal_contrast_decomposition(self):
        # at zero delay every thermal rung contributes its own in-phase
        # fringe through the closing half pulse: C = sum_k p_k sin^2 theta_k
        nbar = 0.07
        fringe = run_ramsey(build_sequence_0n(2), 0.0,
                            NoiseConfig(initial_thermal_nbar=nbar), PHASES)
        ks = np.arange(24)
        pk = (nbar / (1 + nbar)) ** ks / (1 + nbar)
        predicted = float(np.sum(pk * np.sin((math.pi / 2)
                                             * np.sqrt(ks + 1)) ** 2))
        assert fringe.contrast == pytest.approx(predicted, abs=1e-3)

    def test_shot_noise_and_seed_determinism(self):
        seq = build_sequence_0n(1)
        f1 = run_ramsey(seq, 0.0, NoiseConfig(), PHASES, shots=200, seed=5)
        f2 = run_ramsey(seq, 0.0, NoiseConfig(), PHASES, shots=200, seed=5)
        f3 = run_ramsey(seq, 0.0, NoiseConfig(), PHASES, shots=200, seed=6)
        assert f1.points == f2.points
        assert f1.points != f3.points
        assert all(p * 200 == round(p * 200) for _, p, _ in f1.points)

    def test_pulse_jitter_lowers_contrast(self):
        seq = build_sequence_0n(4)
        noisy = run_ramsey(seq, 0.0, NoiseConfig(pulse_error=0.05), PHASES,
                           seed=2)
        assert 0.5 < noisy.contrast < 1.0 - 1e-4

    def test_config_driven_contrast_penalties(self):
        seq = build_sequence_0n(4)
        base = run_ramsey(seq, 0.0, NoiseConfig(), PHASES).contrast
        shel = run_ramsey(seq, 0.0,
                          NoiseConfig(shelving_contrast_loss=0.025), PHASES)
        # one shelve/unshelve pair in prep and one in analysis
        assert shel.contrast == pytest.approx(base * 0.975 ** 2, abs=1e-9)
        elec = run_ramsey(seq, 0.0,
                          NoiseConfig(electronic_coherence_time=8e-3,
                                      pulse_duration=20e-6), PHASES)
        n_pulses = len(seq.prep) + len(seq.analysis)
        assert elec.contrast == pytest.approx(
            base * math.exp(-n_pulses * 20e-6 / 8e-3), abs=1e-9)

    def test_degenerate_scan_raises(self):
        with pytest.raises(FitError):
            run_ramsey(build_sequence_0n(1), 0.0, NoiseConfig(), [0.0, 0.0])
        with pytest.raises(ValueError):
            run_ramsey(build_sequence_0n(1), 0.0, NoiseConfig(), [])


class TestFringeFit:
    def test_round_trip_within_two_sigma(self):
        # >= 95% of seeded trials recover the true contrast within 2 SE
        rng_master = np.random.SeedSequence(77)
        hits, trials = 0, 200
        for child in rng_master.spawn(trials):
            rng = np.random.default_rng(child)
            c_true = rng.uniform(0.2, 0.95)
            phi0 = rng.uniform(0, 2 * math.pi)
            shots = 10_000
            pe = 0.5 * (1 + c_true * np.cos(PHASES - phi0))
            observed = rng.binomial(shots, pe) / shots
            c_fit, err, _ = fit_fringe(PHASES, observed, shots=shots)
            if abs(c_fit - c_true) <= 2 * err:
                hits += 1
        assert hits / trials >= 0.95


class TestFitPopulations:
    def test_ground_state_recovered(self):
        times = np.linspace(0, 2.0e-3, 160)
        pops = np.zeros(9)
        pops[0] = 1.0
        fit = fit_populations(rabi_signal(pops, times, 8), CARRIER_RABI, ETA,
                              GAMMA0, X_EXP, 8)
        assert fit.populations[0] >= 0.99
        assert not fit.degenerate

    def test_even_mixture_recovered(self):
        times = np.linspace(0, 2.5e-3, 220)
        pops = np.zeros(9)
        pops[0] = 0.5
        pops[2] = 0.5
        fit = fit_populations(rabi_signal(pops, times, 8), CARRIER_RABI, ETA,
                              GAMMA0, X_EXP, 8)
        assert np.max(np.abs(fit.populations - pops)) < 0.02

    def test_flat_signal_flagged_degenerate(self):
        times = np.linspace(0, 2.0e-3, 120)
        signal = np.column_stack([times, np.full_like(times, 0.5)])
        fit = fit_populations(signal, CARRIER_RABI, ETA, GAMMA0, X_EXP, 6)
        assert fit.degenerate

    def test_short_signal_rejected(self):
        times = np.linspace(0, 0.3e-3, 60)  # < 2 Rabi periods
        pops = np.zeros(7)
        pops[0] = 1.0
        with pytest.raises(ConditioningError):
            fit_populations(rabi_signal(pops, times, 6), CARRIER_RABI, ETA,
                            GAMMA0, X_EXP, 6)
        with pytest.raises(ConditioningError):
            fit_populations(rabi_signal(pops, np.linspace(0, 2e-3, 10), 6),
                            CARRIER_RABI, ETA, GAMMA0, X_EXP, 6)


class TestDecayScan:
    def test_zero_noise_gives_ideal_depth(self):
        pair = FockPair(0, 1)
        scan = decay_scan(pair, [0.0], NoiseConfig(), ThresholdKind.GENUINE_N,
                          max_fock=6)
        thr = threshold(ThresholdKind.GENUINE_N, pair).value
        _, contrast, depth_val = scan[0]
        assert contrast >= 1 - 1e-6
        assert depth_val == pytest.approx(2 * math.log(1 / thr), abs=1e-5)

    def test_heating_only_matches_channel_oracle(self):
        # valid in the weak-heating regime; beyond rate*t ~ 0.02 phonon the
        # closing pulse reads back heating-induced neighbour coherences
        from qngcoh.channels import thermalize_matrix
        from qngcoh.fock import coherence_quantifier, ideal_superposition
        pair = FockPair(0, 2)
        delays = [0.0, 0.001, 0.002, 0.003]
        scan = decay_scan(pair, delays, NoiseConfig(heating_rate=3.2),
                          ThresholdKind.GENUINE_N, max_fock=6)
        for delay, contrast, _ in scan:
            mat = ideal_superposition(pair, 24).density_matrix().matrix
            c_channel = coherence_quantifier(
                thermalize_matrix(mat, 3.2, delay), pair)
            assert contrast == pytest.approx(c_channel, rel=0.01)

    def test_delta_ordering_under_experiment_noise(self):
        # (1,2) starts deeper but (0,2) stays certified longer
        noise = NoiseConfig(heating_rate=3.2, dephasing_rate=1.0)
        delays = [0.0, 0.004, 0.008, 0.012, 0.016, 0.020]
        scan_02 = decay_scan(FockPair(0, 2), delays, noise,
                             ThresholdKind.GENUINE_N, max_fock=6)
        scan_12 = decay_scan(FockPair(1, 2), delays, noise,
                             ThresholdKind.GENUINE_N, max_fock=6)
        d02 = [d for _, _, d in scan_02]
        d12 = [d for _, _, d in scan_12]
        assert d12[0] > d02[0] > 0
        last_certified_02 = max(t for (t, _, d) in scan_02 if d > 0)
        last_certified_12 = max((t for (t, _, d) in scan_12 if d > 0),
                                default=-1.0)
        assert last_certified_02 > last_certified_12

    def test_unsorted_delays_rejected(self):
        with pytest.raises(ValueError):
            decay_scan(FockPair(0, 1), [0.01, 0.0], NoiseConfig(),
                       ThresholdKind.CLASSICAL)


def test_prepared_state_populations_norm():
    seq = build_sequence_0n(2)
    rho = prepared_state(seq, NoiseConfig(initial_thermal_nbar=0.07))
    pops = motional_populations(rho, seq.top_level + 12)
    assert pops.sum() == pytest.approx(1.0, abs=1e-9)
    assert pops[0] == pytest.approx(0.467, abs=0.02)


def test_noise_config_validation():
    with pytest.raises(ValueError):
        NoiseConfig(heating_rate=-1.0)
