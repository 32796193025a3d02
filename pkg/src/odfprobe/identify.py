"""Turning shift measurements into candidate state sets, partial-readout
exclusion windows, and reaction / quantum-jump event classification.

A measurement carries the extracted molecular shift magnitude, its combined
uncertainty, the inferred detuning sign and the in-phase mode frequency.
Candidates are all enumerated states whose predicted shift agrees in sign
and magnitude within k sigma; identification reports the k = 1 and k = 2
tiers rather than a single best state.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .angular import HalfInt
from .catalog import LineCatalog
from .quantities import polarizability_to_shift
from .stark import NearResonanceError, polarizability_breakdown
from .states import MolecularState

# Fractional intensity (lattice power) uncertainty folded into measurement
# sigmas in quadrature.
POWER_FRACTIONAL_UNCERTAINTY = 0.10

# Relative in-phase frequency change marking a chemical-composition change:
# half the one-mass-unit signature, well above the 1e-3 frequency uncertainty.
REACTION_RELATIVE_THRESHOLD = 3e-3

SIGNS = ("red", "blue", "indeterminate")


def combined_sigma(shift_hz: float, fit_sigma_hz: float,
                   power_fraction: float = POWER_FRACTIONAL_UNCERTAINTY) -> float:
    """Fit uncertainty and fractional power uncertainty in quadrature."""
    return math.hypot(fit_sigma_hz, power_fraction * abs(shift_hz))


@dataclass(frozen=True)
class Measurement:
    """One SP/OP-derived molecular shift measurement."""

    wavelength_nm: float
    intensity_w_m2: float
    shift_hz: float            # |dE_m|, magnitude
    sigma_hz: float            # combined 1-sigma uncertainty
    sign: str                  # red | blue | indeterminate
    f_ip_hz: float

    def __post_init__(self):
        if self.shift_hz < 0.0:
            raise ValueError("measured shift magnitude must be >= 0")
        if self.sigma_hz <= 0.0:
            raise ValueError("sigma must be > 0")
        if self.sign not in SIGNS:
            raise ValueError(f"sign must be one of {SIGNS}, got {self.sign!r}")

    def sign_matches(self, predicted_shift_hz: float) -> bool:
        if self.sign == "indeterminate":
            return True
        return (predicted_shift_hz < 0.0) == (self.sign == "red")


@dataclass(frozen=True)
class ShiftPrediction:
    state: MolecularState
    shift_hz: float | None        # None when the state sits inside the guard
    flagged_line: str | None = None

    @property
    def sign(self) -> str:
        if self.shift_hz is None:
            return "indeterminate"
        return "red" if self.shift_hz < 0.0 else "blue"


def predict_catalog_shifts(wavelength_nm: float, intensity_w_m2: float,
                           states, catalog: LineCatalog,
                           guard_hz: float | None = None) -> list[ShiftPrediction]:
    """Signed shift predictions for every state, in deterministic order.

    States whose polarizability cannot be evaluated (a catalog line inside
    the near-resonance guard) are flagged, not dropped.
    """
    kwargs = {} if guard_hz is None else {"guard_hz": guard_hz}
    predictions = []
    for state in sorted(states, key=MolecularState.sort_key):
        try:
            alpha = polarizability_breakdown(state, wavelength_nm, catalog,
                                             **kwargs).total_au
        except NearResonanceError as exc:
            predictions.append(ShiftPrediction(state, None, flagged_line=str(exc)))
            continue
        shift = polarizability_to_shift(alpha, intensity_w_m2)
        predictions.append(ShiftPrediction(state, shift))
    if not predictions:
        raise ValueError("no states supplied")
    return predictions


def background_shift_hz(wavelength_nm: float, intensity_w_m2: float,
                        catalog: LineCatalog) -> float:
    """Shift magnitude a state far from every resolved line would show
    (far-band plus core polarizability only)."""
    state = MolecularState(0, j=HalfInt(1), i_nuc=0, f=None, m=HalfInt(1))
    breakdown = polarizability_breakdown(state, wavelength_nm, catalog)
    alpha = breakdown.far_band_au + breakdown.core_au
    return abs(polarizability_to_shift(alpha, intensity_w_m2))


@dataclass(frozen=True)
class CandidateSet:
    """States consistent with a measurement at one sigma multiplier."""

    k: float
    measurement: Measurement
    candidates: tuple[ShiftPrediction, ...]
    flagged: tuple[ShiftPrediction, ...]
    total_states: int

    @property
    def excluded_states(self) -> int:
        return self.total_states - len(self.candidates)

    @property
    def exclusion_fraction(self) -> float:
        return self.excluded_states / self.total_states


def match_candidates(measurement: Measurement, predictions, k: float = 1.0,
                     ) -> CandidateSet:
    """States whose predicted shift agrees with the measurement within
    k sigma and whose sign matches (indeterminate measurements match both)."""
    predictions = list(predictions)
    if not predictions:
        raise ValueError("empty prediction table")
    candidates, flagged = [], []
    for pred in predictions:
        if pred.shift_hz is None:
            flagged.append(pred)
            continue
        if not measurement.sign_matches(pred.shift_hz):
            continue
        if abs(abs(pred.shift_hz) - measurement.shift_hz) <= k * measurement.sigma_hz:
            candidates.append(pred)
    return CandidateSet(
        k=k,
        measurement=measurement,
        candidates=tuple(candidates),
        flagged=tuple(flagged),
        total_states=len(predictions),
    )


def exclusion_window(n_max_excl: int, catalog: LineCatalog) -> tuple[float, float]:
    """(lambda_red_min, lambda_blue_max) bounding all lines with N'' <= n_max_excl.

    A lattice wavelength above lambda_red_min is red detuned from every line
    of the manifold; one below lambda_blue_max is blue detuned from all.
    """
    if n_max_excl < 0 or n_max_excl % 2 != 0:
        raise ValueError(f"N_max must be even and >= 0, got {n_max_excl}")
    if catalog.max_n_lower < n_max_excl:
        raise ValueError(
            f"catalog only covers N'' <= {catalog.max_n_lower}, "
            f"cannot bound the N'' <= {n_max_excl} manifold"
        )
    manifold = catalog.lines_up_to(n_max_excl)
    if not manifold:
        raise ValueError(f"no catalog lines with N'' <= {n_max_excl}")
    wavelengths = [line.wavelength_nm for line in manifold]
    return max(wavelengths), min(wavelengths)


def apply_partial_readout(measurement: Measurement, n_max_excl: int,
                          catalog: LineCatalog) -> str:
    """'excluded' | 'not-excluded' | 'inapplicable' for the N'' <= n_max_excl
    manifold.

    Outside the manifold's band, every state of the manifold has a definite
    detuning sign; measuring the opposite sign excludes the whole manifold
    regardless of its substructure.  Inside the band the test is inapplicable.
    """
    if measurement.sign == "indeterminate":
        raise ValueError("partial readout needs a determined detuning sign")
    red_min, blue_max = exclusion_window(n_max_excl, catalog)
    wavelength = measurement.wavelength_nm
    if wavelength > red_min:
        return "excluded" if measurement.sign == "blue" else "not-excluded"
    if wavelength < blue_max:
        return "excluded" if measurement.sign == "red" else "not-excluded"
    return "inapplicable"


def classify_event(before: Measurement, after: Measurement,
                   reaction_threshold: float = REACTION_RELATIVE_THRESHOLD,
                   k: float = 2.0) -> str:
    """'reaction' | 'quantum_jump' | 'no_change' between two measurements.

    A relative in-phase-frequency change above the threshold marks a
    chemical-composition change; with the frequency unchanged, a sign flip
    or a k-sigma shift-magnitude change marks an internal-state jump.
    """
    rel_df = abs(after.f_ip_hz - before.f_ip_hz) / before.f_ip_hz
    if rel_df > reaction_threshold:
        return "reaction"
    if before.sign != "indeterminate" and after.sign != "indeterminate" \
            and before.sign != after.sign:
        return "quantum_jump"
    sigma = math.hypot(before.sigma_hz, after.sigma_hz)
    if abs(after.shift_hz - before.shift_hz) > k * sigma:
        return "quantum_jump"
    return "no_change"


# ---------------------------------------------------------------------------
# Reports and measurement files
# ---------------------------------------------------------------------------

MEASUREMENT_COLUMNS = ("wavelength_nm", "intensity_W_m2", "shift_Hz", "sigma_Hz",
                       "sign", "f_ip_Hz")


def read_measurements(path) -> list[Measurement]:
    """Measurement CSV: wavelength_nm, intensity_W_m2, shift_Hz, sigma_Hz,
    sign, f_ip_Hz."""
    path = Path(path)
    measurements = []
    with path.open(encoding="utf-8") as fh:
        reader = csv.DictReader(ln for ln in fh if not ln.startswith("#"))
        missing = [c for c in MEASUREMENT_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ValueError(f"{path}: missing column(s) {', '.join(missing)}")
        for idx, row in enumerate(reader, start=2):
            try:
                measurements.append(Measurement(
                    wavelength_nm=float(row["wavelength_nm"]),
                    intensity_w_m2=float(row["intensity_W_m2"]),
                    shift_hz=float(row["shift_Hz"]),
                    sigma_hz=float(row["sigma_Hz"]),
                    sign=row["sign"].strip(),
                    f_ip_hz=float(row["f_ip_Hz"]),
                ))
            except ValueError as exc:
                raise ValueError(f"{path}:{idx}: {exc}") from exc
    return measurements


def _prediction_entry(pred: ShiftPrediction) -> dict:
    state = pred.state
    return {
        "N": state.n,
        "J": str(state.j),
        "I": state.i_nuc,
        "F": None if state.f is None else str(state.f),
        "m": str(state.m),
        "predicted_shift_hz": pred.shift_hz,
    }


def identification_report(measurement: Measurement, predictions,
                          ks=(1.0, 2.0)) -> dict:
    """Table-style identification document with one candidate tier per k."""
    tiers = {}
    sets = {}
    for k in ks:
        candidate_set = match_candidates(measurement, predictions, k=k)
        sets[k] = candidate_set
        tiers[f"k={k:g}"] = {
            "candidates": [_prediction_entry(p) for p in candidate_set.candidates],
            "candidate_count": len(candidate_set.candidates),
            "excluded_count": candidate_set.excluded_states,
            "exclusion_fraction": candidate_set.exclusion_fraction,
        }
    return {
        "measurement": {
            "wavelength_nm": measurement.wavelength_nm,
            "intensity_w_m2": measurement.intensity_w_m2,
            "shift_hz": measurement.shift_hz,
            "sigma_hz": measurement.sigma_hz,
            "sign": measurement.sign,
            "f_ip_hz": measurement.f_ip_hz,
        },
        "total_states": sets[ks[0]].total_states,
        "flagged_states": len(sets[ks[0]].flagged),
        "tiers": tiers,
    }


def format_report_text(report: dict) -> str:
    meas = report["measurement"]
    lines = [
        f"measurement: |shift| = {meas['shift_hz']:.1f} Hz "
        f"(sigma {meas['sigma_hz']:.1f} Hz), sign {meas['sign']}, "
        f"lattice {meas['wavelength_nm']:.4g} nm",
        f"states considered: {report['total_states']} "
        f"({report['flagged_states']} flagged near-resonant)",
    ]
    for tier, data in report["tiers"].items():
        lines.append(
            f"[{tier}] {data['candidate_count']} candidate(s), "
            f"{data['excluded_count']} excluded "
            f"({100.0 * data['exclusion_fraction']:.1f}%)"
        )
        for entry in data["candidates"]:
            shift = entry["predicted_shift_hz"]
            hf = "" if entry["F"] is None else f" F={entry['F']}"
            lines.append(
                f"    N={entry['N']} J={entry['J']} I={entry['I']}{hf} "
                f"m={entry['m']}  predicted {shift:+.1f} Hz"
            )
    return "\n".join(lines)


def write_report_json(report: dict, path) -> None:
    Path(path).write_text(json.dumps(report, indent=2), encoding="utf-8")
