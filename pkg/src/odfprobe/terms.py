"""Rotational term energies of the two electronic states of the probed band.

The ground doublet-Sigma state follows Hund's case (b); the excited
doublet-Pi state is treated in intermediate (a)/(b) coupling via the
two-level (Hill-Van Vleck) construction, the same 2x2 matrix whose
eigenvectors feed the line-strength factors in :mod:`odfprobe.angular`.
All energies are in cm^-1 relative to the ground state's rotationless origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .angular import HalfInt, PiCoupling


@dataclass(frozen=True)
class SigmaConstants:
    """Case-(b) constants of the lower doublet-Sigma vibronic level (cm^-1)."""

    b: float                 # rotational constant
    d: float = 0.0           # centrifugal distortion
    gamma: float = 0.0       # spin-rotation coupling


@dataclass(frozen=True)
class PiConstants:
    """Intermediate-coupling constants of the upper doublet-Pi vibronic level.

    ``origin`` is the spin-free band origin relative to the lower state's
    rotationless level (cm^-1); Lambda doubling is neglected.
    """

    origin: float
    b: float
    a: float                 # spin-orbit coupling; a < 0 for an inverted state
    d: float = 0.0

    @property
    def coupling(self) -> PiCoupling:
        return PiCoupling(spin_orbit_a=self.a, rotational_b=self.b)


def sigma_term_energy(n: int, j, constants: SigmaConstants) -> float:
    """Term value of the (N, J = N +- 1/2) level of the Sigma state.

    B N(N+1) - D N^2(N+1)^2 + gamma N/2 for J = N + 1/2,
    and -gamma (N+1)/2 for J = N - 1/2.
    """
    if n < 0:
        raise ValueError(f"N must be >= 0, got {n}")
    two_j = HalfInt.of(j).twice
    if two_j not in (2 * n - 1, 2 * n + 1) or two_j < 1:
        raise ValueError(f"J = {two_j / 2} is not N +- 1/2 for N = {n}")
    x = n * (n + 1)
    energy = constants.b * x - constants.d * x * x
    if two_j == 2 * n + 1:
        energy += constants.gamma * n / 2.0
    else:
        energy -= constants.gamma * (n + 1) / 2.0
    return energy


def pi_term_energy(j_upper, component: int, constants: PiConstants) -> float:
    """Term value of the (J', F1|F2) level of the Pi state.

    The two eigenvalues of the spin-orbit/rotation 2x2 matrix; F1 is the
    lower one (it correlates with J' = N' + 1/2 as the coupling vanishes).
    Centrifugal distortion is applied on the case-(b)-limit N'(N'+1) value of
    each component, which keeps both eigenvalues continuous in J'.
    """
    two_j = HalfInt.of(j_upper).twice
    if two_j < 1 or two_j % 2 == 0:
        raise ValueError(f"J' must be a positive half-odd integer, got {two_j / 2}")
    if component not in (1, 2):
        raise ValueError(f"component must be 1 or 2, got {component}")
    if two_j == 1 and component == 1:
        raise ValueError("the F1 component does not exist at J' = 1/2")
    x = (two_j + 1) / 2.0  # J' + 1/2
    y = constants.a / constants.b
    root = 0.5 * math.sqrt(4.0 * x * x + y * (y - 4.0))
    if component == 1:
        energy = constants.origin + constants.b * (x * x - 1.0 - root)
        z = (x - 1.0) * x          # N'(N'+1) with N' = J' - 1/2
    else:
        energy = constants.origin + constants.b * (x * x - 1.0 + root)
        z = x * (x + 1.0)          # N' = J' + 1/2
    return energy - constants.d * z * z
