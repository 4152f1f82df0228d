"""Imaginary-axis (Matsubara) Casimir-Polder force on a small sphere.

The temperature enters the force expression in two distinct roles and
this module keeps them separate: ``t_sum`` sets the frequency comb and
the overall prefactor, while ``t_sheet`` sets the occupation of the
sheet's Dirac sea inside the reflection coefficients.  The physical
equilibrium force is the diagonal ``t_sum == t_sheet``; the off-diagonal
evaluations are the building blocks of the nonequilibrium force.

Everything is computed in the dimensionless variables kappa = 2*a*k and
zeta_l = 2*a*xi_l/c, which turn the separation exponential into e^{-y}
with y of order one at any separation.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR, K_BOLTZMANN, static_polarizability
from .errors import DomainError
from .graphene import reflection_reduced_matsubara
from .quadrature import integrate_decaying_tail, sum_decaying_series

__all__ = [
    "NanoparticleSpec",
    "ForceResult",
    "polarizability",
    "lifshitz_tilde_force",
    "equilibrium_force",
]

TENSOR_REL_TOL = 1e-8   # sheet response accuracy inside force integrands
FORCE_REL_TOL = 1e-6    # force-level integrals and series


@dataclass(frozen=True)
class NanoparticleSpec:
    """Sphere radius and material class for the point-dipole model.

    ``material`` is "metal" (polarizability = full volume R^3) or
    "dielectric", which then needs a static permittivity above 1.
    """

    radius: float                 # m
    material: str = "metal"
    epsilon_static: float = None  # dielectric only

    def __post_init__(self):
        if self.radius <= 0.0:
            raise DomainError(f"radius must be positive, got {self.radius}")
        if self.material not in ("metal", "dielectric"):
            raise DomainError(
                f"material must be 'metal' or 'dielectric', got "
                f"{self.material!r}")
        if self.material == "dielectric":
            if self.epsilon_static is None or self.epsilon_static <= 1.0:
                raise DomainError(
                    "dielectric material needs epsilon_static > 1, got "
                    f"{self.epsilon_static}")
        elif self.epsilon_static is not None:
            raise DomainError("epsilon_static only applies to dielectric")


@dataclass(frozen=True)
class ForceResult:
    """A force value with its additive breakdown and error bound.

    Negative force means attraction toward the sheet.  The parts in
    ``decomposition`` sum to ``force`` up to the reported ``error``,
    which combines quadrature and series-truncation bounds.  The
    out-of-equilibrium entry point attaches its typed two-term split as
    ``breakdown``; equilibrium results leave it None.
    """

    force: float            # N
    decomposition: dict     # name -> N
    error: float            # absolute bound, N
    breakdown: object = None


def polarizability(spec):
    """Static polarizability of the sphere in m^3."""
    eps = spec.epsilon_static if spec.material == "dielectric" else None
    return static_polarizability(spec.radius, eps)


def _comb_spacing(gap, temperature):
    """Dimensionless Matsubara spacing 2*a*xi_1/c at this temperature."""
    return 4.0 * math.pi * K_BOLTZMANN * temperature * gap / (HBAR * C_LIGHT)


def _bracket_integral(zeta, scale_sheet, v_ratio, rel_tol, abs_tol,
                      tensor_rel_tol, errs):
    """One frequency's transverse-momentum integral, dimensionless.

    Integrates kappa * e^{-sqrt(kappa^2 + zeta^2)} times the mixed
    reflection bracket (2*kappa^2 + zeta^2) r_tm - zeta^2 r_te over
    kappa in (0, inf).  ``scale_sheet`` converts kappa to the sheet's
    thermal ratio (inf encodes a cold sheet).  Appends the quadrature
    error to ``errs`` and returns the value.
    """

    def f(kappa):
        rho = zeta / kappa
        gamma = scale_sheet * kappa
        r_tm, r_te = reflection_reduced_matsubara(
            rho, gamma, v_ratio=v_ratio, rel_tol=tensor_rel_tol)
        weight = kappa * np.exp(-np.hypot(kappa, zeta))
        return weight * ((2.0 * kappa * kappa + zeta * zeta) * r_tm
                         - zeta * zeta * r_te)

    value, err = integrate_decaying_tail(f, 0.0, 1.0, rel_tol=rel_tol,
                                         abs_tol=abs_tol)
    errs.append(err)
    return value


def lifshitz_tilde_force(gap, t_sum, t_sheet, spec, rel_tol=FORCE_REL_TOL,
                         v_fermi=None):
    """Matsubara-sum force with split temperature roles, in newtons.

    ``t_sum`` (> 0) drives the frequency comb and prefactor; ``t_sheet``
    (>= 0) drives the sheet reflection.  The zero-frequency term enters
    with half weight and is purely TM: its TE bracket carries an
    explicit xi^2 factor, which vanishes identically at xi = 0.
    """
    if gap <= 0.0:
        raise DomainError(f"gap must be positive, got {gap}")
    if t_sum <= 0.0:
        raise DomainError(f"summation temperature must be positive, got {t_sum}")
    if t_sheet < 0.0:
        raise DomainError(f"sheet temperature must be nonnegative, got {t_sheet}")
    v_ratio = None if v_fermi is None else v_fermi / C_LIGHT
    spacing = _comb_spacing(gap, t_sum)
    scale_sheet = math.inf if t_sheet == 0.0 else \
        HBAR * C_LIGHT / (2.0 * gap * K_BOLTZMANN * t_sheet)
    tensor_rel_tol = min(TENSOR_REL_TOL, 1e-2 * rel_tol)

    errs = []
    g0 = _bracket_integral(0.0, scale_sheet, v_ratio, 0.1 * rel_tol, 0.0,
                           tensor_rel_tol, errs)
    # Later terms only need resolving relative to the full sum; g0 sets
    # its scale (the bracket decays with frequency).
    abs_tol = 0.05 * rel_tol * abs(g0)

    def term(order):
        return _bracket_integral(order * spacing, scale_sheet, v_ratio,
                                 0.1 * rel_tol, abs_tol, tensor_rel_tol, errs)

    series, tail_bound = sum_decaying_series(term, rel_tol=1e-10)
    alpha0 = polarizability(spec)
    pref = K_BOLTZMANN * t_sum * alpha0 / (8.0 * gap ** 4)
    force = -pref * (0.5 * g0 + series)
    error = pref * (0.5 * errs[0] + sum(errs[1:]) + tail_bound)
    return ForceResult(force=force,
                       decomposition={"equilibrium_like": force},
                       error=error)


def equilibrium_force(gap, temperature, spec, rel_tol=FORCE_REL_TOL,
                      v_fermi=None):
    """True thermal-equilibrium force: both temperature roles equal."""
    return lifshitz_tilde_force(gap, temperature, temperature, spec,
                                rel_tol=rel_tol, v_fermi=v_fermi)
