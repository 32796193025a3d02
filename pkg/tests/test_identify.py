import math

import pytest

from odfprobe.angular import HalfInt
from odfprobe.identify import (Measurement, apply_partial_readout,
                               background_shift_hz, classify_event, combined_sigma,
                               exclusion_window, format_report_text,
                               identification_report, match_candidates,
                               predict_catalog_shifts, read_measurements,
                               write_report_json)
from odfprobe.states import MolecularState, enumerate_states

F_IP = 695.86e3


def make_measurement(shift_hz, sign, wavelength=789.0, intensity=1.15e7,
                     sigma=None, f_ip=F_IP):
    return Measurement(wavelength, intensity, abs(shift_hz),
                       sigma or combined_sigma(shift_hz, 10.0), sign, f_ip)


@pytest.fixture(scope="module")
def predictions(catalog_module, anchor_module):
    return predict_catalog_shifts(789.0, anchor_module, enumerate_states(8),
                                  catalog_module)


@pytest.fixture(scope="module")
def catalog_module():
    from odfprobe.catalog import load_shipped_catalog
    return load_shipped_catalog()


@pytest.fixture(scope="module")
def anchor_module():
    from odfprobe.quantities import intensity_from_core_anchor
    return intensity_from_core_anchor()


class TestMeasurement:
    def test_validation(self):
        with pytest.raises(ValueError):
            Measurement(789.0, 1e7, -1.0, 10.0, "red", F_IP)
        with pytest.raises(ValueError):
            Measurement(789.0, 1e7, 1.0, 0.0, "red", F_IP)
        with pytest.raises(ValueError):
            Measurement(789.0, 1e7, 1.0, 10.0, "violet", F_IP)

    def test_combined_sigma_quadrature(self):
        assert combined_sigma(1000.0, 30.0) == pytest.approx(math.hypot(30.0, 100.0))

    def test_sign_matching(self):
        red = make_measurement(500.0, "red")
        assert red.sign_matches(-500.0) and not red.sign_matches(500.0)
        anything = make_measurement(500.0, "indeterminate")
        assert anything.sign_matches(-500.0) and anything.sign_matches(500.0)


class TestPredictions:
    def test_deterministic_order_and_m_parity(self, predictions):
        keys = [p.state.sort_key() for p in predictions]
        assert keys == sorted(keys)
        by_state = {p.state: p for p in predictions}
        for state, pred in by_state.items():
            if pred.shift_hz is None:
                continue
            mirrored = MolecularState(state.n, state.j, state.i_nuc, state.f,
                                      HalfInt(-state.m.twice))
            twin = by_state[mirrored]
            assert twin.shift_hz == pytest.approx(pred.shift_hz, rel=1e-12)

    def test_near_resonant_states_flagged_not_dropped(self, catalog_module,
                                                      anchor_module):
        # right on the anchor line every J'' = 11/2 state is guarded
        preds = predict_catalog_shifts(789.1872, anchor_module,
                                       enumerate_states(8), catalog_module)
        flagged = [p for p in preds if p.shift_hz is None]
        assert flagged
        assert all(p.state.j == HalfInt(11) and p.state.n == 6 for p in flagged)
        assert len(preds) == 540

    def test_empty_states_rejected(self, catalog_module, anchor_module):
        with pytest.raises(ValueError):
            predict_catalog_shifts(789.0, anchor_module, [], catalog_module)


class TestMatching:
    def test_huge_sigma_keeps_all_sign_consistent(self, predictions):
        meas = make_measurement(1000.0, "red", sigma=1e9)
        result = match_candidates(meas, predictions, k=1.0)
        reds = [p for p in predictions
                if p.shift_hz is not None and p.shift_hz < 0.0]
        assert len(result.candidates) == len(reds)

    def test_tiny_sigma_selects_m_pair(self, predictions):
        target = MolecularState(4, HalfInt(7), 0, None, HalfInt(7))
        shift = next(p.shift_hz for p in predictions if p.state == target)
        meas = make_measurement(shift, "red", sigma=1e-6)
        result = match_candidates(meas, predictions, k=1.0)
        labels = {(p.state.n, p.state.j.twice, p.state.i_nuc, abs(p.state.m.twice))
                  for p in result.candidates}
        assert (4, 7, 0, 7) in labels
        assert all(entry[:2] == (4, 7) or entry[2] == 2 for entry in labels)

    def test_k_growth_never_shrinks(self, predictions):
        meas = make_measurement(1200.0, "red")
        sizes = [len(match_candidates(meas, predictions, k=k).candidates)
                 for k in (0.5, 1.0, 2.0, 4.0)]
        assert all(b >= a for a, b in zip(sizes, sizes[1:]))

    def test_counts_balance(self, predictions):
        meas = make_measurement(1200.0, "red")
        result = match_candidates(meas, predictions, k=1.0)
        assert result.excluded_states + len(result.candidates) == result.total_states
        assert result.total_states == 540

    def test_no_false_exclusion_noiseless(self, catalog_module, anchor_module):
        # every state's own synthetic measurement keeps it in the candidate set
        for wavelength in (788.5, 789.0, 789.71):
            preds = predict_catalog_shifts(wavelength, anchor_module,
                                           enumerate_states(8), catalog_module)
            for p in preds:
                if p.shift_hz is None:
                    continue
                meas = make_measurement(p.shift_hz, p.sign, wavelength=wavelength)
                result = match_candidates(meas, preds, k=1.0)
                assert any(c.state == p.state for c in result.candidates)

    def test_empty_predictions_rejected(self):
        with pytest.raises(ValueError):
            match_candidates(make_measurement(1.0, "red"), [])


class TestExclusionWindows:
    def test_published_thresholds(self, catalog_module):
        expected = {0: (787.5, 782.6), 2: (788.2, 782.1), 4: (789.4, 781.6)}
        for n, (red, blue) in expected.items():
            red_min, blue_max = exclusion_window(n, catalog_module)
            assert red_min == pytest.approx(red, abs=0.3)
            assert blue_max == pytest.approx(blue, abs=0.3)

    def test_windows_nest_monotonically(self, catalog_module):
        reds, blues = [], []
        for n in (0, 2, 4):
            red_min, blue_max = exclusion_window(n, catalog_module)
            reds.append(red_min)
            blues.append(blue_max)
        assert reds == sorted(reds)
        assert blues == sorted(blues, reverse=True)

    def test_validation(self, catalog_module):
        with pytest.raises(ValueError):
            exclusion_window(3, catalog_module)
        with pytest.raises(ValueError):
            exclusion_window(12, catalog_module)  # beyond the shipped catalog


class TestPartialReadout:
    def test_blue_beyond_red_threshold_excludes(self, catalog_module):
        meas = make_measurement(500.0, "blue", wavelength=789.71)
        assert apply_partial_readout(meas, 4, catalog_module) == "excluded"

    def test_red_beyond_red_threshold_consistent(self, catalog_module):
        meas = make_measurement(900.0, "red", wavelength=789.71)
        assert apply_partial_readout(meas, 4, catalog_module) == "not-excluded"

    def test_inside_band_inapplicable(self, catalog_module):
        meas = make_measurement(500.0, "blue", wavelength=788.0)
        assert apply_partial_readout(meas, 4, catalog_module) == "inapplicable"

    def test_blue_side_rule(self, catalog_module):
        meas = make_measurement(500.0, "red", wavelength=781.0)
        assert apply_partial_readout(meas, 4, catalog_module) == "excluded"
        meas = make_measurement(500.0, "blue", wavelength=781.0)
        assert apply_partial_readout(meas, 4, catalog_module) == "not-excluded"

    def test_indeterminate_sign_rejected(self, catalog_module):
        meas = make_measurement(500.0, "indeterminate", wavelength=789.71)
        with pytest.raises(ValueError, match="determined"):
            apply_partial_readout(meas, 4, catalog_module)

    def test_exclusion_soundness(self, catalog_module, anchor_module):
        # synthetic measurements from states inside the manifold are never
        # excluded when probed beyond the red threshold
        preds = predict_catalog_shifts(789.71, anchor_module,
                                       enumerate_states(4), catalog_module)
        for p in preds:
            if p.shift_hz is None:
                continue
            meas = make_measurement(p.shift_hz, p.sign, wavelength=789.71)
            assert apply_partial_readout(meas, 4, catalog_module) == "not-excluded"


class TestClassifyEvent:
    def test_reaction_from_frequency_change(self):
        before = make_measurement(900.0, "red", f_ip=695e3)
        after = make_measurement(400.0, "red", f_ip=690e3)
        assert classify_event(before, after) == "reaction"

    def test_quantum_jump_from_sign_flip(self):
        before = make_measurement(900.0, "blue", wavelength=789.71, f_ip=695e3)
        after = make_measurement(700.0, "red", wavelength=789.71, f_ip=695e3)
        assert classify_event(before, after) == "quantum_jump"

    def test_quantum_jump_from_magnitude_change(self):
        before = make_measurement(2000.0, "red", sigma=50.0)
        after = make_measurement(500.0, "red", sigma=50.0)
        assert classify_event(before, after) == "quantum_jump"

    def test_no_change(self):
        meas = make_measurement(900.0, "red")
        assert classify_event(meas, meas) == "no_change"

    def test_threshold_is_half_mass_signature(self):
        before = make_measurement(900.0, "red", f_ip=695e3)
        barely = make_measurement(900.0, "red", f_ip=695e3 * (1.0 - 2.9e-3))
        assert classify_event(before, barely) == "no_change"


class TestReports:
    def test_report_structure_and_text(self, predictions, tmp_path):
        meas = make_measurement(1477.0, "red")
        report = identification_report(meas, predictions)
        assert report["total_states"] == 540
        assert "k=1" in report["tiers"] and "k=2" in report["tiers"]
        k1 = report["tiers"]["k=1"]
        assert k1["candidate_count"] + k1["excluded_count"] == 540
        text = format_report_text(report)
        assert "candidate" in text and "excluded" in text
        out = tmp_path / "report.json"
        write_report_json(report, out)
        assert out.exists()
        import json
        loaded = json.loads(out.read_text())
        assert loaded["tiers"]["k=1"]["candidate_count"] == k1["candidate_count"]

    def test_background_shift(self, catalog_module, anchor_module):
        background = background_shift_hz(789.0, anchor_module, catalog_module)
        # core 7.23 au alone gives 390 Hz; far bands add to it
        assert background > 390.0
        assert background < 1000.0


class TestMeasurementFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "meas.csv"
        path.write_text(
            "wavelength_nm,intensity_W_m2,shift_Hz,sigma_Hz,sign,f_ip_Hz\n"
            "789.0,1.15e7,1477.0,150.0,red,695858.0\n"
            "789.71,1.15e7,500.0,60.0,blue,695858.0\n"
        )
        measurements = read_measurements(path)
        assert len(measurements) == 2
        assert measurements[0].sign == "red"
        assert measurements[1].wavelength_nm == 789.71

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("wavelength_nm,shift_Hz\n789.0,1.0\n")
        with pytest.raises(ValueError, match="missing column"):
            read_measurements(path)

    def test_bad_row_reports_line(self, tmp_path):
        path = tmp_path / "bad2.csv"
        path.write_text(
            "wavelength_nm,intensity_W_m2,shift_Hz,sigma_Hz,sign,f_ip_Hz\n"
            "789.0,1.15e7,1477.0,150.0,purple,695858.0\n"
        )
        with pytest.raises(ValueError, match="bad2.csv:2"):
            read_measurements(path)
