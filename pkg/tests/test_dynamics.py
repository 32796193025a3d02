import math
from dataclasses import replace

import numpy as np
import pytest

from odfprobe.crystal import LatticeDrive
from odfprobe.dynamics import (SimulationConfig, linearized_prediction,
                               mode_amplitude, simulate_odf, simulate_symplectic,
                               sweep_beat_frequency, total_energy)
from odfprobe.quantities import ATOMIC_MASS, PLANCK

from oracles import resonant_oscillator_amplitude


def make_config(crystal, shift1=-50.0, shift2=0.0, duration=None, beat=None,
                extra_distance=0.0, rtol=1e-10, initial=(0.0, 0.0, 0.0, 0.0)):
    drive = LatticeDrive.for_crystal(
        crystal, 789.0, shift1, shift2,
        extra_distance_m=extra_distance, beat_frequency_hz=beat,
        duration_s=3e-3 if duration is None else duration)
    return SimulationConfig(crystal, drive, initial_state=initial, rtol=rtol,
                            duration_s=duration)


class TestSimulateOdf:
    def test_lattice_off_stays_at_rest(self, crystal):
        config = make_config(crystal, shift1=0.0, shift2=0.0, duration=0.2e-3)
        trajectory = simulate_odf(config)
        assert np.max(np.abs(trajectory.q1)) < 1e-15
        assert np.max(np.abs(trajectory.q2)) < 1e-15

    def test_resonant_amplitude_grows_linearly(self, crystal):
        amplitudes = []
        for duration in (0.2e-3, 0.4e-3):
            config = make_config(crystal, shift1=-20.0, duration=duration)
            amplitudes.append(abs(mode_amplitude(simulate_odf(config)).amplitude_minus))
        assert amplitudes[1] / amplitudes[0] == pytest.approx(2.0, rel=1e-2)

    def test_detuned_drive_stays_bounded(self, crystal):
        # 40 kHz off resonance with a 0.5 ms pulse: far outside the Fourier width
        resonant = make_config(crystal, shift1=-50.0, duration=0.5e-3)
        detuned = make_config(crystal, shift1=-50.0, duration=0.5e-3,
                              beat=crystal.f_ip + 40e3)
        amp_res = abs(mode_amplitude(simulate_odf(resonant)).amplitude_minus)
        amp_det = abs(mode_amplitude(simulate_odf(detuned)).amplitude_minus)
        assert amp_det < 0.05 * amp_res

    def test_determinism(self, crystal):
        config = make_config(crystal, shift1=-100.0, duration=0.2e-3)
        t1 = simulate_odf(config)
        t2 = simulate_odf(config)
        assert np.array_equal(t1.q1, t2.q1)
        assert np.array_equal(t1.v2, t2.v2)

    def test_rtol_validation(self, crystal):
        with pytest.raises(ValueError):
            make_config(crystal, rtol=1e-3)

    def test_export_csv(self, crystal, tmp_path):
        config = make_config(crystal, shift1=-50.0, duration=0.05e-3)
        trajectory = simulate_odf(config)
        path = tmp_path / "trajectory.csv"
        trajectory.export_csv(path)
        data = np.genfromtxt(path, delimiter=",", names=True)
        assert set(data.dtype.names) == {"t_s", "q1_m", "q2_m", "v1_m_s", "v2_m_s"}
        assert len(data) == len(trajectory.t)


class TestModeAmplitude:
    def test_pure_minus_mode_stays_pure(self, crystal):
        # keep the displacement small: the real Coulomb anharmonicity mixes
        # the modes at order beta/d
        beta_minus = 0.1e-9
        q1, q2 = crystal.from_modes(0.0, beta_minus)
        config = make_config(crystal, shift1=0.0, duration=0.3e-3,
                             initial=(q1, q2, 0.0, 0.0))
        excitation = mode_amplitude(simulate_odf(config))
        assert abs(excitation.amplitude_minus) == pytest.approx(beta_minus, rel=1e-6)
        assert abs(excitation.amplitude_plus) < 1e-6 * beta_minus

    def test_undersampled_trajectory_rejected(self, crystal):
        config = make_config(crystal, shift1=-50.0, duration=0.2e-3)
        config = replace(config, samples_per_period=4)
        trajectory = simulate_odf(config)
        with pytest.raises(ValueError, match="undersampled"):
            mode_amplitude(trajectory)

    def test_force_projection_matches_mode_weights(self, crystal):
        # a homogeneous-force lattice drives the in-phase mode with the
        # per-ion projection weights; compare the two-ion drive against a
        # molecule-only drive rescaled by them
        w1, w2 = crystal.mode_weights()
        both = linearized_prediction(make_config(crystal, shift1=-40.0, shift2=-40.0,
                                                 duration=0.5e-3))
        solo = linearized_prediction(make_config(crystal, shift1=-40.0, shift2=0.0,
                                                 duration=0.5e-3))
        ratio = abs(both.amplitude_minus) / abs(solo.amplitude_minus)
        assert ratio == pytest.approx((w1 + w2) / w1, rel=0.01)

    def test_phonon_number_and_energy_consistent(self, crystal):
        config = make_config(crystal, shift1=-500.0, duration=0.5e-3)
        excitation = mode_amplitude(simulate_odf(config))
        m2 = crystal.m2_u * ATOMIC_MASS
        energy = 0.5 * m2 * crystal.omega_minus**2 * abs(excitation.amplitude_minus)**2
        assert excitation.energy_minus_j == pytest.approx(energy, rel=1e-9)
        assert excitation.n_minus >= 0.0


class TestLinearizedPrediction:
    def test_doubling_shift_doubles_amplitude(self, crystal):
        one = linearized_prediction(make_config(crystal, shift1=-100.0))
        two = linearized_prediction(make_config(crystal, shift1=-200.0))
        assert abs(two.amplitude_minus) == pytest.approx(
            2.0 * abs(one.amplitude_minus), rel=1e-12)

    def test_resonant_closed_form(self, crystal):
        shift = -100.0
        duration = 1e-3
        config = make_config(crystal, shift1=shift, duration=duration)
        prediction = linearized_prediction(config)
        w1, _ = crystal.mode_weights()
        force = 4.0 * config.drive.k * PLANCK * abs(shift) * w1
        oracle = resonant_oscillator_amplitude(
            force, crystal.m2_u * ATOMIC_MASS, crystal.omega_minus, duration)
        assert abs(prediction.amplitude_minus) == pytest.approx(oracle, rel=1e-3)

    def test_sp_op_amplitude_ratio(self, crystal):
        mu, theta = crystal.mu, crystal.theta
        a = math.sqrt(mu) * math.sin(theta) * 1000.0
        b = math.cos(theta) * 300.0
        sp = linearized_prediction(make_config(crystal, shift1=-1000.0, shift2=-300.0))
        op = linearized_prediction(make_config(crystal, shift1=-1000.0, shift2=-300.0,
                                               extra_distance=789.0e-9 / 4.0))
        ratio = abs(sp.amplitude_minus) / abs(op.amplitude_minus)
        assert ratio == pytest.approx((a + b) / (a - b), rel=1e-3)

    def test_agreement_with_simulator_small_amplitude(self, crystal):
        # 2 k max|q| ~ 0.07 here: well inside the linear regime
        config = make_config(crystal, shift1=-50.0, duration=1.5e-3, rtol=1e-10)
        linear = linearized_prediction(config)
        simulated = mode_amplitude(simulate_odf(config))
        assert abs(simulated.amplitude_minus) == pytest.approx(
            abs(linear.amplitude_minus), rel=0.01)

    def test_nonlinearity_at_large_drive(self, crystal):
        # beyond 2 k max|q| ~ 1 the full lattice saturates below the linear model
        config = make_config(crystal, shift1=-2000.0, duration=3e-3, rtol=1e-9)
        linear = linearized_prediction(config)
        simulated = mode_amplitude(simulate_odf(config))
        ratio = abs(simulated.amplitude_minus) / abs(linear.amplitude_minus)
        assert ratio < 0.97
        excursion = 2.0 * config.drive.k * math.sqrt(crystal.mu) \
            * abs(linear.amplitude_minus)
        assert excursion > 1.0

    def test_interference_contract_all_quadrants(self, crystal):
        for sign1 in (-1.0, 1.0):
            for sign2 in (-1.0, 1.0):
                for extra, phi_cos in ((0.0, 1.0), (789.0e-9 / 4.0, -1.0)):
                    config = make_config(crystal, shift1=sign1 * 500.0,
                                         shift2=sign2 * 200.0, duration=0.5e-3,
                                         extra_distance=extra)
                    both = abs(linearized_prediction(config).amplitude_minus)
                    solo = abs(linearized_prediction(
                        make_config(crystal, shift1=sign1 * 500.0, shift2=0.0,
                                    duration=0.5e-3, extra_distance=extra)
                    ).amplitude_minus)
                    constructive = sign1 * sign2 * phi_cos > 0.0
                    assert (both > solo) == constructive


class TestEnergyAudit:
    def test_symplectic_energy_conservation_3ms(self, crystal):
        config = make_config(crystal, shift1=0.0, duration=3e-3,
                             initial=(20e-9, -10e-9, 0.0, 0.0))
        trajectory = simulate_symplectic(config)
        energy = total_energy(trajectory)
        rest = make_config(crystal, shift1=0.0, duration=1e-5)
        static = total_energy(simulate_symplectic(rest))[0]
        oscillation = energy[0] - static
        drift = np.max(np.abs(energy - energy[0]))
        assert drift / abs(oscillation) < 1e-9

    def test_symplectic_matches_adaptive(self, crystal):
        config = make_config(crystal, shift1=-50.0, duration=0.5e-3)
        adaptive = mode_amplitude(simulate_odf(config))
        symplectic = mode_amplitude(simulate_symplectic(config))
        assert abs(symplectic.amplitude_minus) == pytest.approx(
            abs(adaptive.amplitude_minus), rel=1e-4)


class TestSweep:
    def test_linearized_sweep_peaks_on_resonance(self, crystal):
        freqs = np.linspace(crystal.f_ip - 1500.0, crystal.f_ip + 1500.0, 13)
        rows = sweep_beat_frequency(make_config(crystal, shift1=-50.0, duration=1e-3),
                                    freqs, use_simulator=False)
        best = max(rows, key=lambda r: r[1])[0]
        assert abs(best - crystal.f_ip) <= 250.0  # one grid step
