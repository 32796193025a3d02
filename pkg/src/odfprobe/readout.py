"""Blue-sideband Rabi thermometry: signal synthesis, fitting, the calibrated
shift-extraction templates, and the iterative partner-molecule correction.

The readout chain maps an effective in-phase-mode shift to a motional
coherent state (resonant drive on a ground-state-cooled mode), synthesizes
the sideband Rabi signal probed on the atomic ion, and extracts unknown
shifts by a one-parameter least-squares fit against a family of calibrated
template signals interpolated continuously in the shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import curve_fit, minimize_scalar
from scipy.special import eval_genlaguerre, gammaln

from .crystal import TwoIonCrystal
from .quantities import ATOMIC_MASS, HBAR, PLANCK


class FitError(RuntimeError):
    pass


class ConvergenceError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Motional distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MotionalDistribution:
    """Population over Fock levels n = 0..n_cut with a provenance tag."""

    p_n: np.ndarray
    provenance: str = "explicit"

    def __post_init__(self):
        p = np.asarray(self.p_n, dtype=float)
        if np.any(p < 0.0):
            raise ValueError("Fock populations must be >= 0")
        total = float(p.sum())
        if not 1.0 - 1e-6 <= total <= 1.0 + 1e-9:
            raise ValueError(f"populations must sum to 1 within 1e-6, got {total}")
        object.__setattr__(self, "p_n", p)

    @classmethod
    def coherent(cls, n_mean: float, n_cut: int | None = None) -> "MotionalDistribution":
        """Poissonian distribution of a coherent state with mean phonon number."""
        if n_mean < 0.0:
            raise ValueError("mean phonon number must be >= 0")
        if n_cut is None:
            n_cut = int(n_mean + 10.0 * math.sqrt(n_mean + 1.0) + 25.0)
        n = np.arange(n_cut + 1)
        if n_mean == 0.0:
            p = np.zeros(n_cut + 1)
            p[0] = 1.0
        else:
            log_p = -n_mean + n * math.log(n_mean) - gammaln(n + 1.0)
            p = np.exp(log_p)
        return cls(p, provenance=f"coherent(n_mean={n_mean:.6g})")

    @classmethod
    def thermal(cls, n_mean: float, n_cut: int | None = None) -> "MotionalDistribution":
        if n_mean < 0.0:
            raise ValueError("mean phonon number must be >= 0")
        if n_cut is None:
            n_cut = int(25.0 * (n_mean + 1.0))
        n = np.arange(n_cut + 1)
        if n_mean == 0.0:
            p = np.zeros(n_cut + 1)
            p[0] = 1.0
        else:
            ratio = n_mean / (n_mean + 1.0)
            p = ratio**n / (n_mean + 1.0)
            p /= p.sum()  # absorb the truncated tail
        return cls(p, provenance=f"thermal(n_mean={n_mean:.6g})")

    @property
    def n_mean(self) -> float:
        return float(np.arange(len(self.p_n)) @ self.p_n)


@dataclass(frozen=True)
class RabiSignal:
    """Excitation probabilities sampled over the sideband-pulse duration."""

    times_s: np.ndarray
    p: np.ndarray
    shots: int | None = None     # None marks a noiseless analytic curve

    def __post_init__(self):
        t = np.asarray(self.times_s, dtype=float)
        p = np.asarray(self.p, dtype=float)
        if t.shape != p.shape:
            raise ValueError("times and probabilities must have equal shapes")
        if np.any((p < 0.0) | (p > 1.0)):
            raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "times_s", t)
        object.__setattr__(self, "p", p)

    @property
    def sigma(self) -> np.ndarray:
        """Per-point 1-sigma binomial uncertainties (zeros when noiseless)."""
        if self.shots is None:
            return np.zeros_like(self.p)
        return np.sqrt(self.p * (1.0 - self.p) / self.shots)

    def export_rows(self):
        shots = "" if self.shots is None else self.shots
        return [(f"{t:.9e}", f"{p:.9f}", shots) for t, p in zip(self.times_s, self.p)]


def sideband_rabi_frequencies(n_levels: int, eta: float, omega0: float,
                              exact_lamb_dicke: bool = False) -> np.ndarray:
    """Blue-sideband flopping rates Omega_{n,n+1} for n = 0..n_levels-1.

    First-order Lamb-Dicke form Omega0 eta sqrt(n+1) by default; the exact
    generalized-Laguerre matrix element behind the ``exact_lamb_dicke``
    switch.
    """
    if not 0.0 < eta <= 0.5:
        raise ValueError(f"Lamb-Dicke parameter must be in (0, 0.5], got {eta}")
    if omega0 <= 0.0:
        raise ValueError("carrier Rabi frequency must be > 0")
    n = np.arange(n_levels)
    if not exact_lamb_dicke:
        return omega0 * eta * np.sqrt(n + 1.0)
    eta2 = eta * eta
    laguerre = eval_genlaguerre(n, 1, eta2)
    return omega0 * eta * math.exp(-eta2 / 2.0) * laguerre / np.sqrt(n + 1.0)


def synthesize_bsb_signal(dist: MotionalDistribution, eta: float, omega0: float,
                          times_s, decoherence_tau_s: float = math.inf,
                          shots: int | None = None, seed: int | None = None,
                          exact_lamb_dicke: bool = False) -> RabiSignal:
    """Blue-sideband Rabi signal of a motional distribution.

    P(t) = sum_n p_n sin^2(Omega_{n,n+1} t / 2) e^(-t/tau) + (1 - e^(-t/tau))/2.
    With ``shots`` set, each point is resampled binomially (fixed ``seed``
    for reproducibility); otherwise the analytic curve is returned.
    """
    times = np.asarray(times_s, dtype=float)
    rates = sideband_rabi_frequencies(len(dist.p_n), eta, omega0, exact_lamb_dicke)
    phases = 0.5 * np.outer(times, rates)
    coherent_part = np.sin(phases) ** 2 @ dist.p_n
    if math.isinf(decoherence_tau_s):
        p = coherent_part
    else:
        damping = np.exp(-times / decoherence_tau_s)
        p = coherent_part * damping + 0.5 * (1.0 - damping)
    p = np.clip(p, 0.0, 1.0)
    if shots is None:
        return RabiSignal(times, p, shots=None)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = np.random.default_rng(seed)
    counts = rng.binomial(shots, p)
    return RabiSignal(times, counts / shots, shots=shots)


# ---------------------------------------------------------------------------
# Phenomenological fit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RabiFit:
    frequency_hz: float
    contrast: float
    offset: float
    decay_tau_s: float
    covariance: np.ndarray

    @property
    def frequency_sigma_hz(self) -> float:
        return math.sqrt(max(self.covariance[1, 1], 0.0))

    @property
    def contrast_sigma(self) -> float:
        return math.sqrt(max(self.covariance[2, 2], 0.0))


def _rabi_model(t, y0, f, c, tau):
    return y0 + 0.5 * c * (1.0 - np.cos(2.0 * math.pi * f * t)) * np.exp(-t / tau)


def fit_rabi(signal: RabiSignal) -> RabiFit:
    """Least-squares fit of the damped-cosine form
    P(t) = y0 + (C/2)(1 - cos(2 pi f t)) e^(-t/tau)."""
    t, p = signal.times_s, signal.p
    if len(t) < 10:
        raise ValueError(f"need >= 10 points, got {len(t)}")
    span = t[-1] - t[0]
    if span <= 0.0:
        raise ValueError("times must span a positive interval")
    # FFT-based frequency seed over the sampled band
    detrended = p - p.mean()
    spectrum = np.abs(np.fft.rfft(detrended))
    freqs = np.fft.rfftfreq(len(t), d=span / (len(t) - 1))
    f0 = freqs[np.argmax(spectrum[1:]) + 1] if len(spectrum) > 1 else 1.0 / span
    f0 = max(f0, 0.25 / span)
    p0 = (float(p.min()), float(f0), float(np.clip(p.max() - p.min(), 0.05, 1.0)),
          span * 2.0)
    sigma = None
    if signal.shots is not None:
        sigma = np.sqrt(np.maximum(p * (1.0 - p), 0.25 / signal.shots) / signal.shots)
    try:
        popt, pcov = curve_fit(
            _rabi_model, t, p, p0=p0, sigma=sigma, absolute_sigma=sigma is not None,
            bounds=([-0.25, 0.0, 0.0, span / 100.0],
                    [1.0, 0.75 * (len(t) - 1) / span, 1.5, np.inf]),
            maxfev=20000,
        )
    except RuntimeError as exc:
        residual = float(np.sqrt(np.mean((p - _rabi_model(t, *p0)) ** 2)))
        raise FitError(
            f"damped-cosine fit did not converge (seed rms residual {residual:.3g})"
        ) from exc
    y0, f, c, tau = popt
    order = (0, 1, 2, 3)
    return RabiFit(frequency_hz=f, contrast=c, offset=y0, decay_tau_s=tau,
                   covariance=pcov[np.ix_(order, order)])


# ---------------------------------------------------------------------------
# Calibration templates and shift extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ReadoutPipeline:
    """Everything mapping an in-phase-mode shift magnitude to a Rabi signal."""

    crystal: TwoIonCrystal
    wavelength_nm: float = 789.0
    pulse_s: float = 3e-3
    eta: float = 0.1
    carrier_rabi_hz: float = 50e3
    probe_times_s: np.ndarray = field(
        default_factory=lambda: np.linspace(0.0, 120e-6, 61))
    decoherence_tau_s: float = 1.5e-3
    exact_lamb_dicke: bool = False
    max_fock: int = 1600

    def mode_n_mean(self, mode_shift_hz: float) -> float:
        """Mean phonon number after a resonant pulse with the given effective
        single-beam shift of the in-phase mode (linearized drive)."""
        k = 2.0 * math.pi / (self.wavelength_nm * 1e-9)
        force = 4.0 * k * PLANCK * abs(mode_shift_hz)
        m2 = self.crystal.m2_u * ATOMIC_MASS
        omega = self.crystal.omega_minus
        beta = force * self.pulse_s / (2.0 * m2 * omega)
        return m2 * omega * beta * beta / (2.0 * HBAR)

    def distribution(self, mode_shift_hz: float) -> MotionalDistribution:
        n_mean = self.mode_n_mean(mode_shift_hz)
        n_cut = min(self.max_fock,
                    int(n_mean + 10.0 * math.sqrt(n_mean + 1.0) + 25.0))
        return MotionalDistribution.coherent(n_mean, n_cut)

    def signal(self, mode_shift_hz: float, shots: int | None = None,
               seed: int | None = None) -> RabiSignal:
        return synthesize_bsb_signal(
            self.distribution(mode_shift_hz), self.eta, self.carrier_rabi_hz * 2.0 * math.pi,
            self.probe_times_s, self.decoherence_tau_s, shots=shots, seed=seed,
            exact_lamb_dicke=self.exact_lamb_dicke,
        )


@dataclass(frozen=True)
class CalibrationSet:
    """Reference signals at known shifts, plus the partner-fraction belief.

    ``shifts_hz`` are the nominal (applied, known) shift magnitudes, strictly
    increasing.  ``partner_fraction`` is the current model of the additional
    fractional shift contributed by the co-trapped partner molecule during
    calibration: template k is interpreted as shift_k * (1 + r).

    ``zero_template`` is the model-known zero-excitation anchor (the
    ground-state sideband flop); it is not calibration data but pins the
    family below the lowest calibrated shift.
    """

    shifts_hz: tuple[float, ...]
    templates: tuple[RabiSignal, ...]
    pipeline: ReadoutPipeline
    partner_fraction: float = 0.0
    zero_template: RabiSignal | None = None
    zero_frequency_hz: float | None = None

    def __post_init__(self):
        if len(self.shifts_hz) < 3:
            raise ValueError("a calibration needs at least 3 distinct shifts")
        if len(self.shifts_hz) != len(self.templates):
            raise ValueError("one template per shift required")
        if self.shifts_hz[0] <= 0.0:
            raise ValueError("calibration shifts must be positive magnitudes")
        if any(b <= a for a, b in zip(self.shifts_hz, self.shifts_hz[1:])):
            raise ValueError("calibration shifts must be strictly increasing")
        if not -1.0 < self.partner_fraction < 1.0:
            raise ValueError("partner fraction must lie in (-1, 1)")

    @property
    def model_shifts_hz(self) -> np.ndarray:
        """Effective shifts the templates are attributed to."""
        return np.asarray(self.shifts_hz) * (1.0 + self.partner_fraction)

    def template_matrix(self) -> np.ndarray:
        return np.vstack([tpl.p for tpl in self.templates])

    @cached_property
    def template_frequencies_hz(self) -> np.ndarray:
        """Fitted flopping frequency of each template (phase reference for
        the frequency-aligned interpolation)."""
        return np.array([fit_rabi(tpl).frequency_hz for tpl in self.templates])

    def _family(self):
        """(shifts, frequencies, curves) including the zero anchor if present."""
        s = self.model_shifts_hz
        f = self.template_frequencies_hz
        curves = self.template_matrix()
        if self.zero_template is not None:
            s = np.concatenate(([0.0], s))
            f = np.concatenate(([self.zero_frequency_hz], f))
            curves = np.vstack([self.zero_template.p, curves])
        return s, f, curves

    def _frequency_at(self, shift_hz: float, s, f) -> float:
        interp = PchipInterpolator(s, f, extrapolate=False)
        if s[0] <= shift_hz <= s[-1]:
            return float(interp(shift_hz))
        derivative = interp.derivative()
        edge = s[0] if shift_hz < s[0] else s[-1]
        value = float(interp(edge)) + float(derivative(edge)) * (shift_hz - edge)
        return max(value, 0.02 * min(fk for fk in f if fk > 0.0))

    def interpolate(self, shift_hz: float) -> np.ndarray:
        """Template curve at an arbitrary shift.

        The signal family is oscillatory with a flopping frequency that grows
        with the shift, so curves are blended after rescaling time to align
        their fitted frequencies; pointwise blending of dephased curves would
        wash the oscillation out.  Beyond the anchored range the alignment
        extrapolates linearly (the extraction flags that case).
        """
        s, f, curves = self._family()
        hi = int(np.clip(np.searchsorted(s, shift_hz), 1, len(s) - 1))
        lo = hi - 1
        f_target = self._frequency_at(shift_hz, s, f)
        t = self.pipeline.probe_times_s
        aligned = []
        for k in (lo, hi):
            aligned.append(np.interp(t * f_target / f[k], t, curves[k]))
        w = (shift_hz - s[lo]) / (s[hi] - s[lo])
        blended = (1.0 - w) * aligned[0] + w * aligned[1]
        return np.clip(blended, 0.0, 1.0)


def build_calibration(shifts_hz, pipeline: ReadoutPipeline,
                      true_partner_fraction: float = 0.0,
                      shots: int | None = None, seed: int | None = None,
                      ) -> CalibrationSet:
    """Synthesize the calibration templates for the given known shifts.

    ``true_partner_fraction`` bakes a partner-molecule contribution into the
    synthetic template data (the reference signals then correspond to
    shift_k * (1 + r_true) while remaining labeled shift_k), which is the
    situation the iterative correction is designed to undo.  The returned
    set starts with a partner-fraction belief of 0.
    """
    shifts = tuple(float(s) for s in shifts_hz)
    if len(shifts) < 3:
        raise ValueError("a calibration needs at least 3 distinct shifts")
    templates = []
    rng = np.random.default_rng(seed)
    for s in shifts:
        child_seed = None if shots is None else int(rng.integers(2**31))
        templates.append(pipeline.signal(s * (1.0 + true_partner_fraction),
                                         shots=shots, seed=child_seed))
    zero_frequency = pipeline.carrier_rabi_hz * pipeline.eta
    if pipeline.exact_lamb_dicke:
        zero_frequency *= math.exp(-pipeline.eta**2 / 2.0)
    return CalibrationSet(shifts_hz=shifts, templates=tuple(templates),
                          pipeline=pipeline, partner_fraction=0.0,
                          zero_template=pipeline.signal(0.0),
                          zero_frequency_hz=zero_frequency)


@dataclass(frozen=True)
class ShiftEstimate:
    shift_hz: float
    sigma_hz: float
    extrapolated: bool = False
    uninformative: bool = False


def extract_shift(signal: RabiSignal, cal: CalibrationSet) -> ShiftEstimate:
    """One-parameter least-squares fit of a signal against the template family.

    The only fit parameter is the shift indexing the interpolated template
    family; the uncertainty follows from the chi-square curvature at the
    minimum.  Estimates outside the calibrated range are flagged as
    extrapolated; a flat chi-square landscape is flagged uninformative.
    """
    if not np.array_equal(signal.times_s, cal.pipeline.probe_times_s):
        raise ValueError("signal must be sampled on the calibration time grid")
    s_model = cal.model_shifts_hz
    if signal.shots is not None:
        var = float(np.mean(np.maximum(signal.p * (1.0 - signal.p), 0.25 / signal.shots))
                    / signal.shots)
    else:
        var = None  # rescaled from the residuals at the minimum below

    def sse(shift):
        residual = signal.p - cal.interpolate(shift)
        return float(residual @ residual)

    lo = 0.0 if cal.zero_template is not None else 0.25 * s_model[0]
    hi = 1.5 * s_model[-1]
    grid = np.linspace(lo, hi, 600)
    values = np.array([sse(s) for s in grid])
    spread = values.max() - values.min()
    if not math.isfinite(spread) or spread <= 0.0:
        raise FitError("degenerate template fit: flat chi-square landscape")
    i_best = int(np.argmin(values))
    bracket_lo = grid[max(i_best - 1, 0)]
    bracket_hi = grid[min(i_best + 1, len(grid) - 1)]
    result = minimize_scalar(sse, bounds=(bracket_lo, bracket_hi), method="bounded",
                             options={"xatol": (hi - lo) * 1e-7})
    best = float(result.x)
    dof = max(len(signal.p) - 1, 1)
    reduced_chi2 = 1.0
    if var is None:
        # noiseless input: scale the uncertainty to the residual scatter
        var = max(sse(best), 1e-30) / dof
    else:
        reduced_chi2 = sse(best) / (var * dof)
    # curvature from a symmetric second difference
    h = max((hi - lo) * 1e-4, 1e-9)
    curvature = (sse(best + h) - 2.0 * sse(best) + sse(best - h)) / (h * h * var)
    span = s_model[-1] - s_model[0]
    if curvature > 0.0:
        sigma = math.sqrt(2.0 / curvature)
        # inflate conservatively when the best template fits the data poorly
        sigma *= math.sqrt(max(reduced_chi2, 1.0))
    else:
        sigma = span
    # a fit the model cannot describe carries no shift information
    uninformative = sigma >= span or reduced_chi2 > 5.0
    extrapolated = not s_model[0] <= best <= s_model[-1]
    return ShiftEstimate(shift_hz=best, sigma_hz=sigma,
                         extrapolated=extrapolated, uninformative=uninformative)


@dataclass(frozen=True)
class PartnerIteration:
    partner_shift_hz: float          # signed, shares the atomic-shift sign
    fraction: float                  # partner / atomic shift ratio
    trace_hz: tuple[float, ...]      # successive signed estimates
    calibration: CalibrationSet      # with the converged fraction applied
    converged: bool


def iterate_partner_correction(cal: CalibrationSet, measured: RabiSignal,
                               atomic_shift_hz: float,
                               rel_tolerance: float = 1e-3,
                               max_iterations: int = 10) -> PartnerIteration:
    """Fixed-point iteration for the partner-molecule shift.

    Extracts the partner shift from ``measured`` with the current template
    attribution, folds the estimate back into the calibration model (template
    k -> shift_k * (1 + r)), and repeats until the estimate changes by less
    than ``rel_tolerance`` or ``max_iterations`` is hit.  The measured signal
    is the partner-only excitation recorded at the power where the atomic
    reference shift is ``atomic_shift_hz``.
    """
    if atomic_shift_hz == 0.0:
        raise ValueError("atomic reference shift must be nonzero")
    sign = math.copysign(1.0, atomic_shift_hz)
    r_hat = cal.partner_fraction
    trace = []
    previous_step = None
    for _ in range(max_iterations):
        estimate = extract_shift(measured, replace(cal, partner_fraction=r_hat))
        r_new = estimate.shift_hz / abs(atomic_shift_hz)
        if not -1.0 < r_new < 1.0:
            raise ConvergenceError(
                f"partner fraction estimate {r_new:.3f} left the model range (-1, 1)"
            )
        trace.append(sign * estimate.shift_hz)
        step = abs(r_new - r_hat)
        if previous_step is not None and step > previous_step * (1.0 + 1e-9) \
                and step > rel_tolerance * max(abs(r_new), 1e-12):
            raise ConvergenceError(
                "partner-fraction iteration is not contracting "
                f"(steps {previous_step:.3g} -> {step:.3g})"
            )
        converged = step <= rel_tolerance * max(abs(r_new), 1e-12)
        r_hat = r_new
        if converged:
            return PartnerIteration(
                partner_shift_hz=sign * abs(r_hat) * abs(atomic_shift_hz),
                fraction=r_hat,
                trace_hz=tuple(trace),
                calibration=replace(cal, partner_fraction=r_hat),
                converged=True,
            )
        previous_step = step
    return PartnerIteration(
        partner_shift_hz=sign * abs(r_hat) * abs(atomic_shift_hz),
        fraction=r_hat,
        trace_hz=tuple(trace),
        calibration=replace(cal, partner_fraction=r_hat),
        converged=False,
    )
