"""Physical constants, particle material parameters, geometry checks.

SI mechanical units throughout: lengths in m, angular frequencies in
rad/s, temperatures in K, forces in N.  Static polarizabilities are
kept as volumes (m^3), which is the convention the force expressions
in this package are written for.
"""

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "C_LIGHT",
    "HBAR",
    "K_BOLTZMANN",
    "FINE_STRUCTURE",
    "V_FERMI_DEFAULT",
    "ThermalState",
    "GeometryReport",
    "thermal_wavelength",
    "matsubara_frequency",
    "static_polarizability",
    "validate_geometry",
]

C_LIGHT = 299792458.0            # speed of light, m/s (exact)
HBAR = 1.0545718176461565e-34    # reduced Planck constant, J*s (exact, h/2pi)
K_BOLTZMANN = 1.380649e-23       # Boltzmann constant, J/K (exact)
FINE_STRUCTURE = 7.2973525693e-3  # fine-structure constant (CODATA 2018)

# Fermi velocity of the graphene Dirac cone, m/s.  Every routine that
# needs it accepts an override; this is the conventional c/300 value.
V_FERMI_DEFAULT = C_LIGHT / 300.0


def thermal_wavelength(temperature):
    """Characteristic thermal photon wavelength hbar*c/(k_B*T) in m.

    Separations small against this scale behave quantum mechanically,
    large separations classically.  About 7.6 um at room temperature.
    """
    if temperature <= 0.0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    return HBAR * C_LIGHT / (K_BOLTZMANN * temperature)


def matsubara_frequency(order, temperature):
    """Imaginary-axis angular frequency 2*pi*k_B*T*order/hbar in rad/s.

    ``order`` is a non-negative integer; order 0 returns exactly 0.0.
    """
    if order < 0 or order != int(order):
        raise DomainError(f"order must be a non-negative integer, got {order}")
    if temperature <= 0.0:
        raise DomainError(f"temperature must be positive, got {temperature}")
    return 2.0 * math.pi * K_BOLTZMANN * temperature * order / HBAR


@dataclass(frozen=True)
class ThermalState:
    """Separation plus the two temperatures of a stationary arrangement.

    ``t_environment`` is shared by the particle and the surrounding
    radiation; ``t_sheet`` is the temperature the sheet is held at.
    Either may be zero, but not for a run that needs a thermal drive.
    """

    gap: float            # particle-sheet separation, m
    t_environment: float  # K
    t_sheet: float        # K

    def __post_init__(self):
        if self.gap <= 0.0:
            raise DomainError(f"gap must be positive, got {self.gap}")
        if self.t_environment < 0.0 or self.t_sheet < 0.0:
            raise DomainError("temperatures must be nonnegative, got "
                              f"{self.t_environment}, {self.t_sheet}")


@dataclass(frozen=True)
class GeometryReport:
    """Outcome of the dipole-model applicability check.

    ``ok`` is True when no warning fired; ``warnings`` spells out each
    violated ratio so callers can log or surface them.
    """

    radius_over_gap: float
    radius_over_wavelength: float  # worst (largest) of the two temperatures
    warnings: tuple

    @property
    def ok(self):
        return not self.warnings


def validate_geometry(radius, state):
    """Check a sphere of ``radius`` at ``state`` against the dipole model.

    The point-dipole force expressions need the sphere small against
    both the separation (threshold 0.1) and the thermal wavelengths of
    the two baths (threshold 0.01); zero temperatures impose no
    wavelength constraint.  Violations warn, they do not raise: the
    numbers remain computable, just less trustworthy.
    """
    if radius <= 0.0:
        raise DomainError(f"radius must be positive, got {radius}")
    over_gap = radius / state.gap
    over_wl = 0.0
    for t in (state.t_environment, state.t_sheet):
        if t > 0.0:
            over_wl = max(over_wl, radius / thermal_wavelength(t))
    warnings = []
    if over_gap > 0.1:
        warnings.append(
            f"radius/gap = {over_gap:.3g} > 0.1: dipole approximation "
            "unreliable this close")
    if over_wl > 0.01:
        warnings.append(
            f"radius/thermal wavelength = {over_wl:.3g} > 0.01: sphere "
            "not small against the photon bath")
    return GeometryReport(over_gap, over_wl, tuple(warnings))


def static_polarizability(radius, epsilon=None):
    """Static polarizability (m^3) of a small homogeneous sphere.

    ``epsilon`` is the static relative permittivity; ``None`` means an
    ideal metal, whose polarizability is the full sphere volume R^3.
    A dielectric sphere is reduced by the Clausius-Mossotti factor
    (eps - 1)/(eps + 2).
    """
    if radius <= 0.0:
        raise DomainError(f"radius must be positive, got {radius}")
    if epsilon is None:
        return radius ** 3
    if epsilon <= 1.0:
        raise DomainError(f"static permittivity must exceed 1, got {epsilon}")
    return radius ** 3 * (epsilon - 1.0) / (epsilon + 2.0)
