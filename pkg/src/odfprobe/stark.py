"""State-resolved transition strengths, dynamic polarizabilities and
ac-Stark shifts for the molecular ion and its atomic reference ion.

The molecular polarizability is the sum-over-transitions form

    alpha(omega) = sum_k (2/hbar) omega_k / (omega_k^2 - omega^2) |<k|mu|j>|^2

over the rotationally resolved lines of the catalog, plus the rotationless
far-band terms and the constant core polarizability.  The formula has no
linewidth, so evaluation inside a configurable detuning guard refuses with
:class:`NearResonanceError` instead of returning divergent values.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .angular import HalfInt, wigner_3j, wigner_6j
from .catalog import LineCatalog, TransitionLine, shipped_data_path
from .quantities import (
    HBAR,
    AU_DIPOLE_SQUARED,
    AU_POLARIZABILITY,
    polarizability_to_shift,
    wavelength_to_angular_frequency,
)
from .states import MolecularState

DEFAULT_RESONANCE_GUARD_HZ = 1e9


class NearResonanceError(ValueError):
    """The lattice is too close to a catalog line for the non-resonant formula."""

    def __init__(self, line: TransitionLine, detuning_hz: float, guard_hz: float):
        self.line = line
        self.detuning_hz = detuning_hz
        self.guard_hz = guard_hz
        super().__init__(
            f"lattice within {abs(detuning_hz):.3g} Hz of {line.branch}({line.j_lower}) "
            f"at {line.wavelength_nm:.4f} nm (guard {guard_hz:.3g} Hz)"
        )


def transition_strength(state: MolecularState, line: TransitionLine,
                        polarization: str = "pi") -> float:
    """Squared dipole moment (au) of one line for a specific initial state.

    Multiplies the line's reduced strength by the hyperfine recoupling factor
    (summed over the degenerate upper F' levels when I = 2) and the q = 0
    Zeeman 3j factor; only pi polarization is supported because the lattice
    beams are polarized parallel to the magnetic field.
    """
    if polarization != "pi":
        raise ValueError(f"unsupported polarization {polarization!r}; only 'pi'")
    if line.n_lower != state.n or line.j_lower != state.j:
        raise ValueError(
            f"line {line.branch}({line.j_lower}) does not start from state {state.label()}"
        )
    j_low = state.j
    j_up = line.j_upper
    if state.i_nuc == 0:
        if abs(state.m.twice) > j_up.twice:
            return 0.0  # q = 0 light cannot reach the upper level from this m
        zeeman = wigner_3j(j_up, 1, j_low, -state.m, 0, state.m)
        return line.strength_au * zeeman * zeeman

    i_nuc = state.i_nuc
    f_low = state.f
    total = 0.0
    for two_fp in range(abs(j_up.twice - 2 * i_nuc), j_up.twice + 2 * i_nuc + 1, 2):
        f_up = HalfInt(two_fp)
        if not abs(f_low.twice - 2) <= two_fp <= f_low.twice + 2:
            continue
        if abs(state.m.twice) > two_fp:
            continue
        six = wigner_6j(j_up, f_up, i_nuc, f_low, j_low, 1)
        zeeman = wigner_3j(f_up, 1, f_low, -state.m, 0, state.m)
        total += (two_fp + 1.0) * (f_low.twice + 1.0) * six * six * zeeman * zeeman
    return line.strength_au * total


@dataclass(frozen=True)
class PolarizabilityBreakdown:
    """Signed contributions (au) of one state's polarizability."""

    resonant_au: float
    far_band_au: float
    core_au: float

    @property
    def total_au(self) -> float:
        return self.resonant_au + self.far_band_au + self.core_au


def _sum_term_au(omega_k: float, omega: float, strength_au: float) -> float:
    # One term of the sum-over-transitions, with |mu|^2 in au and the result
    # in au of polarizability.
    mu2_si = strength_au * AU_DIPOLE_SQUARED
    alpha_si = 2.0 / HBAR * omega_k / (omega_k**2 - omega**2) * mu2_si
    return alpha_si / AU_POLARIZABILITY


def _check_guard(line, omega: float, guard_hz: float) -> None:
    detuning_hz = (line.angular_frequency - omega) / (2.0 * math.pi)
    if abs(detuning_hz) < guard_hz:
        raise NearResonanceError(line, detuning_hz, guard_hz)


def polarizability_breakdown(state: MolecularState, wavelength_nm: float,
                             catalog: LineCatalog,
                             guard_hz: float = DEFAULT_RESONANCE_GUARD_HZ,
                             ) -> PolarizabilityBreakdown:
    """Resonant-band, far-band and core parts of the state's polarizability."""
    omega = wavelength_to_angular_frequency(wavelength_nm)
    resonant = 0.0
    for line in catalog.lines_from(state.n, state.j):
        _check_guard(line, omega, guard_hz)
        strength = transition_strength(state, line)
        resonant += _sum_term_au(line.angular_frequency, omega, strength)
    far = 0.0
    for band in catalog.far_bands:
        _check_guard(band, omega, guard_hz)
        # Rotationless isotropic term: one third of the band strength per
        # polarization component.
        far += _sum_term_au(band.angular_frequency, omega, band.strength_au / 3.0)
    return PolarizabilityBreakdown(
        resonant_au=resonant,
        far_band_au=far,
        core_au=catalog.core_polarizability_au,
    )


def dynamic_polarizability(state: MolecularState, wavelength_nm: float,
                           catalog: LineCatalog,
                           guard_hz: float = DEFAULT_RESONANCE_GUARD_HZ) -> float:
    """Signed dynamic polarizability (au) of a molecular state."""
    return polarizability_breakdown(state, wavelength_nm, catalog, guard_hz).total_au


def molecular_stark_shift(state: MolecularState, wavelength_nm: float,
                          intensity: float, catalog: LineCatalog,
                          guard_hz: float = DEFAULT_RESONANCE_GUARD_HZ) -> float:
    """Single-beam ac-Stark shift (Hz, signed) of a molecular state."""
    alpha = dynamic_polarizability(state, wavelength_nm, catalog, guard_hz)
    return polarizability_to_shift(alpha, intensity)


# ---------------------------------------------------------------------------
# Atomic reference ion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomicLevelModel:
    """Scalar/tensor polarizability tables of one level of the atomic ion.

    The tables cover the lattice wavelength window and are interpolated
    linearly; ``theta`` is the angle between the linear polarization and the
    quantization axis (0 for pi-polarized light).
    """

    level: str
    j: HalfInt
    m: HalfInt
    wavelengths_nm: tuple[float, ...]
    alpha_scalar_au: tuple[float, ...]
    alpha_tensor_au: tuple[float, ...]
    core_au: float
    theta: float = 0.0

    def __post_init__(self):
        if abs(self.m.twice) > self.j.twice:
            raise ValueError(f"|m| = {abs(self.m)} exceeds J = {self.j}")
        if len(self.wavelengths_nm) < 2:
            raise ValueError("need at least two wavelength samples to interpolate")
        if not (len(self.wavelengths_nm) == len(self.alpha_scalar_au)
                == len(self.alpha_tensor_au)):
            raise ValueError("polarizability tables must have equal lengths")

    def _interp(self, table, wavelength_nm: float) -> float:
        lo, hi = self.wavelengths_nm[0], self.wavelengths_nm[-1]
        if not lo <= wavelength_nm <= hi:
            raise ValueError(
                f"wavelength {wavelength_nm} nm outside the shipped table "
                f"[{lo}, {hi}] nm for level {self.level}"
            )
        return float(np.interp(wavelength_nm, self.wavelengths_nm, table))

    def tensor_prefactor(self) -> float:
        """((3cos^2 Theta - 1)/2) (3m^2 - J(J+1)) / (J(2J-1)); 0 by convention
        at the magic angle, undefined (ValueError) for J = 1/2."""
        j = self.j.value
        if self.j.twice == 1:
            raise ValueError("tensor contribution undefined for J = 1/2")
        m = self.m.value
        angle = (3.0 * math.cos(self.theta) ** 2 - 1.0) / 2.0
        return angle * (3.0 * m * m - j * (j + 1.0)) / (j * (2.0 * j - 1.0))


def atomic_polarizability(model: AtomicLevelModel, wavelength_nm: float,
                          use: str = "lattice") -> float:
    """Polarizability (au) of the atomic level at the given wavelength.

    ``use='lattice'`` adds the core term (the lattice couples to core and
    valence electrons alike); ``use='spectroscopy'`` returns the valence-only
    value entering differential shifts between two levels with nearly equal
    cores.  For J = 1/2 the tensor term is undefined and the scalar value is
    returned with a warning.
    """
    if use not in ("lattice", "spectroscopy"):
        raise ValueError(f"use must be 'lattice' or 'spectroscopy', got {use!r}")
    alpha = model._interp(model.alpha_scalar_au, wavelength_nm)
    if model.j.twice > 1:
        alpha += model.tensor_prefactor() * model._interp(
            model.alpha_tensor_au, wavelength_nm)
    elif any(model.alpha_tensor_au):
        warnings.warn(
            f"level {model.level}: tensor polarizability undefined for J = 1/2; "
            "returning the scalar part only",
            stacklevel=2,
        )
    if use == "lattice":
        alpha += model.core_au
    return alpha


def atomic_stark_shift(model: AtomicLevelModel, wavelength_nm: float,
                       intensity: float) -> float:
    """Single-beam lattice shift (Hz, signed) of the atomic level."""
    alpha = atomic_polarizability(model, wavelength_nm, use="lattice")
    return polarizability_to_shift(alpha, intensity)


SHIPPED_ATOMIC_FILE = "ca_polarizabilities.csv"
_ATOMIC_CORES_AU = {"S1/2": 3.134, "D5/2": 3.03}
_ATOMIC_J = {"S1/2": HalfInt(1), "D5/2": HalfInt(5)}


def load_shipped_atomic_model(level: str = "D5/2", m=None,
                              theta: float = 0.0) -> AtomicLevelModel:
    """Atomic-level model from the shipped polarizability table.

    Defaults to the metastable D5/2(m = -5/2) level the reference ion is
    shelved in during lattice pulses.
    """
    path = Path(shipped_data_path(SHIPPED_ATOMIC_FILE))
    if level not in _ATOMIC_J:
        raise ValueError(f"unknown level {level!r}; shipped: {sorted(_ATOMIC_J)}")
    rows = []
    with path.open(encoding="utf-8") as fh:
        reader = csv.DictReader(ln for ln in fh if not ln.startswith("#"))
        for row in reader:
            if row["level"].strip() == level:
                rows.append((
                    float(row["wavelength_nm"]),
                    float(row["alpha_scalar_au"]),
                    float(row["alpha_tensor_au"]),
                ))
    rows.sort()
    if m is None:
        m = HalfInt(-1) if level == "S1/2" else HalfInt(-5)
    return AtomicLevelModel(
        level=level,
        j=_ATOMIC_J[level],
        m=HalfInt.of(m),
        wavelengths_nm=tuple(r[0] for r in rows),
        alpha_scalar_au=tuple(r[1] for r in rows),
        alpha_tensor_au=tuple(r[2] for r in rows),
        core_au=_ATOMIC_CORES_AU[level],
        theta=theta,
    )
