"""Spectroscopic line catalog: construction, CSV ingestion and validation.

A catalog holds the rotationally resolved lines of the near-resonant vibronic
band, a set of far-detuned rotationless band heads, and the constant core
polarizability.  Catalogs can be loaded from CSV files (the package ships one
for the molecular ion of interest) or generated from spectroscopic constants.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .angular import HalfInt, PiCoupling, allowed_branches, honl_london, parse_branch
from .quantities import (
    HBAR,
    SPEED_OF_LIGHT,
    VACUUM_PERMITTIVITY,
    AU_DIPOLE_SQUARED,
    wavelength_to_angular_frequency,
    wavenumber_to_wavelength_nm,
)
from .terms import PiConstants, SigmaConstants, pi_term_energy, sigma_term_energy

LINE_COLUMNS = (
    "band", "branch", "N_lower", "J_lower_x2", "J_upper_x2",
    "wavelength_nm", "einstein_A", "mu_squared_au",
)
FAR_BAND_COLUMNS = ("band", "wavelength_nm", "einstein_A")


class CatalogError(ValueError):
    """Raised for unreadable, malformed or inconsistent catalog data."""


def band_dipole_squared_au(einstein_a: float, wavelength_nm: float) -> float:
    """Vibronic squared transition dipole (au) from the band Einstein A.

    Uses the two-level relation A = omega^3 mu^2 / (3 pi eps0 hbar c^3)
    applied band-wise; rotational structure is distributed over the branches
    by the line-strength factors.
    """
    omega = wavelength_to_angular_frequency(wavelength_nm)
    mu2_si = 3.0 * math.pi * VACUUM_PERMITTIVITY * HBAR * SPEED_OF_LIGHT**3 \
        * einstein_a / omega**3
    return mu2_si / AU_DIPOLE_SQUARED


@dataclass(frozen=True)
class TransitionLine:
    """One rotationally resolved line of the resolved band.

    ``strength_au`` is the reduced line strength |<k|mu|j>|^2 in au: the
    vibronic band strength multiplied by the Honl-London factor of the
    branch.  State-resolved strengths (hyperfine recoupling, Zeeman 3j
    factor) are applied downstream.
    """

    band: str
    branch: str
    n_lower: int
    j_lower: HalfInt
    j_upper: HalfInt
    wavelength_nm: float
    strength_au: float
    einstein_a: float | None = None

    def __post_init__(self):
        if self.wavelength_nm <= 0.0:
            raise CatalogError(f"line {self.branch}({self.j_lower}): wavelength must be > 0")
        if self.strength_au < 0.0:
            raise CatalogError(f"line {self.branch}({self.j_lower}): negative strength")
        delta_j, _, j_low = parse_branch(self.branch)
        if self.j_upper.twice != self.j_lower.twice + 2 * delta_j:
            raise CatalogError(
                f"line {self.branch}({self.j_lower}): J' = {self.j_upper} inconsistent"
            )
        expected_two_j = 2 * self.n_lower + 1 if j_low == 1 else 2 * self.n_lower - 1
        if self.j_lower.twice != expected_two_j:
            raise CatalogError(
                f"line {self.branch}({self.j_lower}): lower level is not N'' = {self.n_lower}"
            )

    @property
    def upper_component(self) -> int:
        return parse_branch(self.branch)[1]

    @property
    def angular_frequency(self) -> float:
        return wavelength_to_angular_frequency(self.wavelength_nm)


@dataclass(frozen=True)
class FarBand:
    """A far-detuned vibronic band kept only as a rotationless transition."""

    band: str
    wavelength_nm: float
    einstein_a: float

    @property
    def strength_au(self) -> float:
        return band_dipole_squared_au(self.einstein_a, self.wavelength_nm)

    @property
    def angular_frequency(self) -> float:
        return wavelength_to_angular_frequency(self.wavelength_nm)


@dataclass(frozen=True)
class LineCatalog:
    lines: tuple[TransitionLine, ...]
    far_bands: tuple[FarBand, ...] = ()
    core_polarizability_au: float = 0.0
    pi_coupling: PiCoupling | None = None
    metadata: dict = field(default_factory=dict)

    def lines_from(self, n_lower: int, j_lower: HalfInt) -> list[TransitionLine]:
        return [
            line for line in self.lines
            if line.n_lower == n_lower and line.j_lower == j_lower
        ]

    def lines_up_to(self, n_max: int) -> list[TransitionLine]:
        return [line for line in self.lines if line.n_lower <= n_max]

    @property
    def max_n_lower(self) -> int:
        return max((line.n_lower for line in self.lines), default=-1)


def _parse_metadata(lines: list[str]) -> dict:
    meta = {}
    for raw in lines:
        body = raw.lstrip("#").strip()
        if "=" in body:
            key, _, value = body.partition("=")
            meta[key.strip()] = value.strip()
    return meta


def _read_csv(path: Path, expected_columns) -> tuple[list[dict], dict, list[int]]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CatalogError(f"cannot read catalog file {path}: {exc}") from exc
    comment_lines = [ln for ln in text.splitlines() if ln.startswith("#")]
    meta = _parse_metadata(comment_lines)
    data_lines, line_numbers = [], []
    for idx, ln in enumerate(text.splitlines(), start=1):
        if ln.startswith("#") or not ln.strip():
            continue
        data_lines.append(ln)
        line_numbers.append(idx)
    if not data_lines:
        raise CatalogError(f"{path}: no header row found")
    reader = csv.DictReader(io.StringIO("\n".join(data_lines)))
    header = reader.fieldnames or []
    missing = [col for col in expected_columns if col not in header]
    if missing:
        raise CatalogError(f"{path}: missing mandatory column(s) {', '.join(missing)}")
    rows = list(reader)
    return rows, meta, line_numbers[1:]


def _float_or_none(value: str | None) -> float | None:
    if value is None or value.strip() == "":
        return None
    return float(value)


def load_line_catalog(lines_path, far_bands_path=None) -> LineCatalog:
    """Load a catalog from its line CSV and optional far-band CSV.

    Metadata is carried as ``# key = value`` comment lines in the line file;
    ``core_polarizability_au`` and the upper-state coupling constants
    (``pi_spin_orbit_A_cm1``, ``pi_rotational_B_cm1``) are recognized.
    """
    lines_path = Path(lines_path)
    rows, meta, line_numbers = _read_csv(lines_path, LINE_COLUMNS)
    lines = []
    seen = {}
    for row, lineno in zip(rows, line_numbers):
        where = f"{lines_path.name}:{lineno}"
        try:
            branch = row["branch"].strip()
            n_lower = int(row["N_lower"])
            j_lower = HalfInt(int(row["J_lower_x2"]))
            j_upper = HalfInt(int(row["J_upper_x2"]))
            wavelength = float(row["wavelength_nm"])
            einstein_a = _float_or_none(row.get("einstein_A"))
            mu2 = _float_or_none(row.get("mu_squared_au"))
        except (KeyError, ValueError) as exc:
            raise CatalogError(f"{where}: {exc}") from exc
        if (einstein_a is None) == (mu2 is None):
            raise CatalogError(
                f"{where}: exactly one of einstein_A or mu_squared_au must be given"
            )
        key = (branch, n_lower, j_lower.twice)
        if key in seen:
            raise CatalogError(
                f"{where}: duplicate line {branch}({j_lower}) for N'' = {n_lower} "
                f"(first at line {seen[key]})"
            )
        seen[key] = lineno
        if mu2 is None:
            coupling = _coupling_from_metadata(meta, where)
            hl = honl_london(branch, j_lower, coupling)
            mu2 = band_dipole_squared_au(einstein_a, wavelength) * hl
        try:
            lines.append(TransitionLine(
                band=row["band"].strip(),
                branch=branch,
                n_lower=n_lower,
                j_lower=j_lower,
                j_upper=j_upper,
                wavelength_nm=wavelength,
                strength_au=mu2,
                einstein_a=einstein_a,
            ))
        except (CatalogError, ValueError) as exc:
            raise CatalogError(f"{where}: {exc}") from exc

    far_bands = []
    if far_bands_path is not None:
        far_rows, far_meta, far_linenos = _read_csv(Path(far_bands_path), FAR_BAND_COLUMNS)
        meta = {**far_meta, **meta}
        for row, lineno in zip(far_rows, far_linenos):
            where = f"{Path(far_bands_path).name}:{lineno}"
            try:
                far_bands.append(FarBand(
                    band=row["band"].strip(),
                    wavelength_nm=float(row["wavelength_nm"]),
                    einstein_a=float(row["einstein_A"]),
                ))
            except (KeyError, ValueError) as exc:
                raise CatalogError(f"{where}: {exc}") from exc

    core = float(meta.get("core_polarizability_au", 0.0))
    coupling = None
    if "pi_spin_orbit_A_cm1" in meta and "pi_rotational_B_cm1" in meta:
        coupling = PiCoupling(
            spin_orbit_a=float(meta["pi_spin_orbit_A_cm1"]),
            rotational_b=float(meta["pi_rotational_B_cm1"]),
        )
    return LineCatalog(
        lines=tuple(sorted(lines, key=lambda l: (l.n_lower, l.j_lower.twice, l.branch))),
        far_bands=tuple(far_bands),
        core_polarizability_au=core,
        pi_coupling=coupling,
        metadata=meta,
    )


def _coupling_from_metadata(meta: dict, where: str) -> PiCoupling:
    try:
        return PiCoupling(
            spin_orbit_a=float(meta["pi_spin_orbit_A_cm1"]),
            rotational_b=float(meta["pi_rotational_B_cm1"]),
        )
    except KeyError as exc:
        raise CatalogError(
            f"{where}: einstein_A rows need pi_spin_orbit_A_cm1 and "
            "pi_rotational_B_cm1 metadata to evaluate line strengths"
        ) from exc


@dataclass(frozen=True)
class BandConstants:
    """Spectroscopic constants defining the resolved band of the catalog."""

    band: str
    sigma: SigmaConstants
    pi: PiConstants
    einstein_a: float


def generate_lines(constants: BandConstants, n_max: int) -> list[TransitionLine]:
    """All P/Q/R (+ spin sub-branch) lines from even N'' <= n_max."""
    if n_max < 0 or n_max % 2 != 0:
        raise ValueError(f"N_max must be even and >= 0, got {n_max}")
    mu2_cache: dict[float, float] = {}
    lines = []
    for n2 in range(0, n_max + 1, 2):
        for j_comp in (1, 2):
            two_j2 = 2 * n2 + 1 if j_comp == 1 else 2 * n2 - 1
            if two_j2 < 1:
                continue
            j_lower = HalfInt(two_j2)
            lower = sigma_term_energy(n2, j_lower, constants.sigma)
            for branch in allowed_branches(n2, j_comp):
                delta_j, i_up, _ = parse_branch(branch)
                j_upper = HalfInt(two_j2 + 2 * delta_j)
                nu = pi_term_energy(j_upper, i_up, constants.pi) - lower
                wavelength = wavenumber_to_wavelength_nm(nu)
                if wavelength not in mu2_cache:
                    mu2_cache[wavelength] = band_dipole_squared_au(
                        constants.einstein_a, wavelength)
                hl = honl_london(branch, j_lower, constants.pi.coupling)
                lines.append(TransitionLine(
                    band=constants.band,
                    branch=branch,
                    n_lower=n2,
                    j_lower=j_lower,
                    j_upper=j_upper,
                    wavelength_nm=wavelength,
                    strength_au=mu2_cache[wavelength] * hl,
                    einstein_a=constants.einstein_a,
                ))
    return lines


def build_line_catalog(source, far_bands=None, core_polarizability_au=None,
                       n_max: int = 10) -> LineCatalog:
    """Build a catalog from a CSV path or a :class:`BandConstants` set.

    With a path source, ``far_bands`` may be a second CSV path.  With a
    constants source, ``far_bands`` may be an iterable of :class:`FarBand`
    and ``core_polarizability_au`` must be given explicitly if nonzero.
    """
    if isinstance(source, (str, Path)):
        catalog = load_line_catalog(source, far_bands)
        if core_polarizability_au is not None:
            catalog = LineCatalog(
                lines=catalog.lines,
                far_bands=catalog.far_bands,
                core_polarizability_au=core_polarizability_au,
                pi_coupling=catalog.pi_coupling,
                metadata=catalog.metadata,
            )
        return catalog
    if isinstance(source, BandConstants):
        return LineCatalog(
            lines=tuple(generate_lines(source, n_max)),
            far_bands=tuple(far_bands or ()),
            core_polarizability_au=core_polarizability_au or 0.0,
            pi_coupling=source.pi.coupling,
        )
    raise CatalogError(f"unsupported catalog source {type(source).__name__}")


def write_line_catalog(lines, path, metadata: dict | None = None,
                       header_comment: str = "") -> None:
    """Write lines to CSV with ``# key = value`` metadata comments."""
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        if header_comment:
            for ln in header_comment.strip().splitlines():
                fh.write(f"# {ln}\n")
        for key, value in (metadata or {}).items():
            fh.write(f"# {key} = {value}\n")
        writer = csv.writer(fh)
        writer.writerow(LINE_COLUMNS)
        for line in sorted(lines, key=lambda l: l.wavelength_nm):
            writer.writerow([
                line.band, line.branch, line.n_lower,
                line.j_lower.twice, line.j_upper.twice,
                f"{line.wavelength_nm:.6f}",
                "" if line.einstein_a is None else f"{line.einstein_a:.6g}",
                "" if line.einstein_a is not None else f"{line.strength_au:.8e}",
            ])


# ---------------------------------------------------------------------------
# Shipped catalog
# ---------------------------------------------------------------------------

SHIPPED_LINES_FILE = "n2plus_meinel_2_0_lines.csv"
SHIPPED_FAR_BANDS_FILE = "n2plus_far_bands.csv"

# Constants behind the shipped line list (cm^-1); the band origin is an
# effective value adjusted to reproduce the measured anchor-line positions.
N2PLUS_SIGMA = SigmaConstants(b=1.922355, d=6.1e-6, gamma=9.18e-3)
N2PLUS_PI = PiConstants(origin=12732.8342, b=1.697425, a=-74.62, d=5.9e-6)
N2PLUS_BAND = BandConstants(
    band="A(v'=2)-X(v''=0)",
    sigma=N2PLUS_SIGMA,
    pi=N2PLUS_PI,
    einstein_a=1.14e4,
)
N2PLUS_CORE_POLARIZABILITY_AU = 7.23


def shipped_data_path(name: str) -> Path:
    return Path(resources.files("odfprobe").joinpath("data", name))


def load_shipped_catalog() -> LineCatalog:
    """The catalog distributed with the package for the N2+ molecular ion."""
    return load_line_catalog(
        shipped_data_path(SHIPPED_LINES_FILE),
        shipped_data_path(SHIPPED_FAR_BANDS_FILE),
    )
