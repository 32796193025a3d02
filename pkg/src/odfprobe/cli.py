"""Command-line front end.

Subcommands: enumerate | spectrum | simulate | calibrate | identify |
windows | classify.  Outputs are plot-ready CSVs plus a manifest carrying
the config hash and seed; exit codes are 0 (ok), 2 (validation error),
3 (numeric failure).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .catalog import CatalogError
from .config import ConfigError, RunConfig, load_config
from .crystal import LatticeDrive, TwoIonCrystal
from .dynamics import (IntegrationError, SimulationConfig, linearized_prediction,
                       mode_amplitude, simulate_odf, sweep_beat_frequency)
from .identify import (apply_partial_readout, background_shift_hz,
                       classify_event, exclusion_window, format_report_text,
                       identification_report, predict_catalog_shifts,
                       read_measurements, write_report_json)
from .quantities import polarizability_to_shift
from .readout import (ConvergenceError, FitError, ReadoutPipeline, build_calibration)
from .states import enumerate_states
from .stark import NearResonanceError, atomic_polarizability, polarizability_breakdown

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _write_manifest(outdir: Path, command: str, config: RunConfig, extra=None):
    manifest = {
        "tool": f"odfprobe {__version__}",
        "command": command,
        "config_hash": config.hash(),
        "seed": config.seed,
    }
    manifest.update(extra or {})
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2),
                                          encoding="utf-8")


def _outdir(args) -> Path:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir


def cmd_enumerate(args, config: RunConfig) -> int:
    states = enumerate_states(args.nmax)
    print(f"{len(states)} states with even N <= {args.nmax} (v = 0)")
    outdir = _outdir(args)
    path = outdir / f"states_n{args.nmax}.csv"
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "J_x2", "I", "F_x2", "m_x2"])
        for s in states:
            writer.writerow([s.n, s.j.twice, s.i_nuc,
                             "" if s.f is None else s.f.twice, s.m.twice])
    _write_manifest(outdir, "enumerate", config, {"states": len(states)})
    print(f"wrote {path}")
    return EXIT_OK


def cmd_spectrum(args, config: RunConfig) -> int:
    catalog = config.catalog()
    states = [s for s in enumerate_states(args.nmax)
              if s.n >= args.nmin and (args.isomer is None or s.i_nuc == args.isomer)]
    wavelengths = np.linspace(args.lambda_min, args.lambda_max, args.steps)
    outdir = _outdir(args)
    path = outdir / "stark_spectrum.csv"
    skipped = 0
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["wavelength_nm", "N", "J_x2", "I", "F_x2", "m_x2",
                         "shift_hz"])
        for lam in wavelengths:
            for s in states:
                try:
                    alpha = polarizability_breakdown(
                        s, lam, catalog, guard_hz=config.resonance_guard_hz).total_au
                except NearResonanceError:
                    skipped += 1
                    continue
                shift = polarizability_to_shift(alpha, config.intensity_w_m2)
                writer.writerow([f"{lam:.5f}", s.n, s.j.twice, s.i_nuc,
                                 "" if s.f is None else s.f.twice, s.m.twice,
                                 f"{shift:.4f}"])
    _write_manifest(outdir, "spectrum", config,
                    {"states": len(states), "wavelengths": len(wavelengths),
                     "near_resonant_skipped": skipped})
    print(f"wrote {path} ({len(states)} states x {len(wavelengths)} wavelengths, "
          f"{skipped} near-resonant points skipped)")
    return EXIT_OK


def _build_drive(config: RunConfig, crystal: TwoIonCrystal, shift1_hz: float,
                 shift2_hz: float, extra_distance_m: float = 0.0) -> LatticeDrive:
    return LatticeDrive.for_crystal(
        crystal, config.wavelength_nm, shift1_hz, shift2_hz,
        extra_distance_m=extra_distance_m,
        beat_frequency_hz=config.beat_frequency_hz,
        duration_s=config.pulse_ms * 1e-3,
    )


def cmd_simulate(args, config: RunConfig) -> int:
    crystal = config.crystal()
    crystal_op = TwoIonCrystal.from_distance(
        crystal.m1_u, crystal.m2_u, crystal.d + config.wavelength_nm * 1e-9 / 4.0)
    print(f"crystal: d = {crystal.d * 1e6:.4f} um, u0 = {crystal.u0:.4e} N/m")
    print(f"f_IP(SP) = {crystal.f_ip / 1e3:.2f} kHz, "
          f"f_IP(OP distance) = {crystal_op.f_ip / 1e3:.2f} kHz, "
          f"f_OP_mode = {crystal.omega_plus / (2e3 * math.pi):.2f} kHz")
    atomic_shift = polarizability_to_shift(
        atomic_polarizability(config.atomic_model(), config.wavelength_nm),
        config.intensity_w_m2)
    drive = _build_drive(config, crystal, args.molecular_shift, atomic_shift)
    print(f"drive: {drive.configuration}, beat {drive.beat_frequency_hz / 1e3:.2f} kHz, "
          f"shifts ({drive.shift1_hz:.1f}, {drive.shift2_hz:.1f}) Hz")
    outdir = _outdir(args)
    sim_config = SimulationConfig(crystal, drive, rtol=args.rtol)
    try:
        if args.sweep:
            lo, hi, count = args.sweep
            freqs = np.linspace(lo, hi, int(count))
            rows = sweep_beat_frequency(sim_config, freqs,
                                        use_simulator=not args.linearized,
                                        jobs=args.jobs)
            path = outdir / "beat_sweep.csv"
            with path.open("w", encoding="utf-8", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["beat_hz", "ip_amplitude_m"])
                for f, amp in rows:
                    writer.writerow([f"{f:.3f}", f"{amp:.8e}"])
            peak = max(rows, key=lambda r: r[1])
            print(f"wrote {path}; peak at {peak[0] / 1e3:.3f} kHz")
        else:
            trajectory = simulate_odf(sim_config)
            excitation = mode_amplitude(trajectory)
            linear = linearized_prediction(sim_config)
            path = outdir / "trajectory.csv"
            trajectory.export_csv(path)
            print(f"wrote {path}")
            print(f"in-phase mode: n = {excitation.n_minus:.2f} "
                  f"(linearized {linear.n_minus:.2f}), "
                  f"out-of-phase n = {excitation.n_plus:.3f}")
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _write_manifest(outdir, "simulate", config,
                    {"f_ip_sp_hz": crystal.f_ip, "f_ip_op_hz": crystal_op.f_ip})
    return EXIT_OK


def cmd_calibrate(args, config: RunConfig) -> int:
    crystal = config.crystal()
    pipeline = ReadoutPipeline(
        crystal,
        wavelength_nm=config.wavelength_nm,
        pulse_s=config.pulse_ms * 1e-3,
        eta=config.lamb_dicke,
        carrier_rabi_hz=config.carrier_rabi_hz,
        decoherence_tau_s=config.decoherence_tau_ms * 1e-3,
    )
    shifts = np.linspace(args.shift_min, args.shift_max, args.count)
    try:
        cal = build_calibration(shifts, pipeline,
                                shots=None if args.noiseless else config.shots,
                                seed=config.seed)
    except FitError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    outdir = _outdir(args)
    for shift, template in zip(cal.shifts_hz, cal.templates):
        path = outdir / f"template_{shift:.0f}Hz.csv"
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t_s", "P", "shots"])
            writer.writerows(template.export_rows())
    _write_manifest(outdir, "calibrate", config, {
        "shifts_hz": list(cal.shifts_hz),
        "partner_fraction": cal.partner_fraction,
        "templates": len(cal.templates),
    })
    print(f"wrote {len(cal.templates)} calibration templates to {outdir}")
    return EXIT_OK


def cmd_identify(args, config: RunConfig) -> int:
    catalog = config.catalog()
    states = enumerate_states(args.nmax)
    measurements = read_measurements(args.measurements)
    outdir = _outdir(args)
    reports = []
    for index, meas in enumerate(measurements, start=1):
        predictions = predict_catalog_shifts(
            meas.wavelength_nm, meas.intensity_w_m2, states, catalog,
            guard_hz=config.resonance_guard_hz)
        report = identification_report(meas, predictions,
                                       ks=(1.0, config.sigma_multiplier))
        report["background_shift_hz"] = background_shift_hz(
            meas.wavelength_nm, meas.intensity_w_m2, catalog)
        reports.append(report)
        print(f"--- measurement {index} ---")
        print(format_report_text(report))
    write_report_json({"reports": reports}, outdir / "identification.json")
    _write_manifest(outdir, "identify", config, {"measurements": len(measurements)})
    print(f"wrote {outdir / 'identification.json'}")
    return EXIT_OK


def cmd_windows(args, config: RunConfig) -> int:
    catalog = config.catalog()
    red_min, blue_max = exclusion_window(args.exclude_up_to, catalog)
    print(f"manifold N'' <= {args.exclude_up_to}:")
    print(f"  red side: lattice > {red_min:.3f} nm is red of every line "
          "(a blue measurement excludes the manifold)")
    print(f"  blue side: lattice < {blue_max:.3f} nm is blue of every line "
          "(a red measurement excludes the manifold)")
    if args.measurements:
        for meas in read_measurements(args.measurements):
            verdict = apply_partial_readout(meas, args.exclude_up_to, catalog)
            print(f"  {meas.wavelength_nm:.4f} nm, sign {meas.sign}: {verdict}")
    return EXIT_OK


def cmd_classify(args, config: RunConfig) -> int:
    measurements = read_measurements(args.measurements)
    if len(measurements) < 2:
        print("need at least two measurements (before/after pairs)", file=sys.stderr)
        return EXIT_VALIDATION
    for before, after in zip(measurements, measurements[1:]):
        event = classify_event(before, after,
                               reaction_threshold=config.reaction_rel_change,
                               k=config.sigma_multiplier)
        print(f"f_ip {before.f_ip_hz / 1e3:.1f} -> {after.f_ip_hz / 1e3:.1f} kHz, "
              f"sign {before.sign} -> {after.sign}: {event}")
    return EXIT_OK


def _add_common(parser):
    parser.add_argument("--config", default="default",
                        help="config file path or 'default' (shipped)")
    parser.add_argument("--out", default="odfprobe-out",
                        help="output directory (created if missing)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="odfprobe",
        description="Phase-sensitive optical-dipole-force state detection "
                    "for a two-ion crystal",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="enumerate hyperfine-Zeeman states")
    p.add_argument("--nmax", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("spectrum", help="per-state Stark-shift sweep over wavelength")
    p.add_argument("--nmin", type=int, default=0)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--isomer", type=int, choices=(0, 2), default=None)
    p.add_argument("--lambda-min", type=float, default=785.0)
    p.add_argument("--lambda-max", type=float, default=790.0)
    p.add_argument("--steps", type=int, default=201)
    _add_common(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", help="simulate the lattice-driven crystal motion")
    p.add_argument("--molecular-shift", type=float, default=-1000.0,
                   help="signed single-beam molecular shift in Hz")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--sweep", nargs=3, type=float, metavar=("LO", "HI", "COUNT"),
                   default=None, help="sweep the beat frequency (Hz)")
    p.add_argument("--linearized", action="store_true",
                   help="use the analytic linearized model for sweeps")
    p.add_argument("--jobs", type=int, default=1,
                   help="parallel sweep workers (1 keeps bit-reproducibility)")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="build the shift-calibration templates")
    p.add_argument("--shift-min", type=float, default=800.0)
    p.add_argument("--shift-max", type=float, default=4600.0)
    p.add_argument("--count", type=int, default=6)
    p.add_argument("--noiseless", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("identify", help="match measurements against predictions")
    p.add_argument("--measurements", required=True)
    p.add_argument("--nmax", type=int, default=8)
    _add_common(p)
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("windows", help="partial-readout exclusion thresholds")
    p.add_argument("--exclude-up-to", type=int, required=True, metavar="NMAX")
    p.add_argument("--measurements", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_windows)

    p = sub.add_parser("classify", help="classify reaction/quantum-jump events")
    p.add_argument("--measurements", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.func(args, config)
    except (ConfigError, CatalogError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (IntegrationError, FitError, ConvergenceError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
