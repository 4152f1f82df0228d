"""Casimir-Polder force between a small particle and suspended graphene.

Supports thermal equilibrium and the stationary nonequilibrium
situation where the graphene sheet is held at a temperature different
from the particle and environment.
"""

__version__ = "0.1.0"

from .constants import (C_LIGHT, FINE_STRUCTURE, HBAR, K_BOLTZMANN,
                        V_FERMI_DEFAULT, GeometryReport, ThermalState,
                        matsubara_frequency, static_polarizability,
                        thermal_wavelength, validate_geometry)
from .equilibrium import (FORCE_REL_TOL, TENSOR_REL_TOL, ForceResult,
                          NanoparticleSpec, equilibrium_force,
                          lifshitz_tilde_force, polarizability)
from .errors import (BracketError, BudgetExceededError, ConfigError,
                     DomainError, NeqcpError, RegimeBoundaryError,
                     SingularityError)
from .graphene import (polarization_reduced, polarization_reduced_matsubara,
                       reflection_reduced, reflection_reduced_matsubara)
from .nonequilibrium import (ConsistencyReport, NoneqBreakdown,
                             angular_factors, cross_check_representation,
                             noneq_delta, noneq_force, theta)
from .sweep import (RunConfig, SweepRow, SweepTable, ZeroCrossing,
                    cache_lookup, cache_store, config_hash, emit_csv,
                    find_zero_crossing, parse_csv, render_csv, run_sweep)

__all__ = [
    "__version__",
    "C_LIGHT", "HBAR", "K_BOLTZMANN", "FINE_STRUCTURE", "V_FERMI_DEFAULT",
    "ThermalState", "GeometryReport", "thermal_wavelength",
    "matsubara_frequency", "static_polarizability", "validate_geometry",
    "NanoparticleSpec", "ForceResult", "polarizability",
    "lifshitz_tilde_force", "equilibrium_force",
    "FORCE_REL_TOL", "TENSOR_REL_TOL",
    "NeqcpError", "BudgetExceededError", "SingularityError",
    "RegimeBoundaryError", "DomainError", "BracketError", "ConfigError",
    "polarization_reduced", "polarization_reduced_matsubara",
    "reflection_reduced", "reflection_reduced_matsubara",
    "theta", "angular_factors", "noneq_delta", "noneq_force",
    "NoneqBreakdown", "cross_check_representation", "ConsistencyReport",
    "RunConfig", "SweepRow", "SweepTable", "ZeroCrossing", "run_sweep",
    "find_zero_crossing", "render_csv", "emit_csv", "parse_csv",
    "config_hash", "cache_lookup", "cache_store",
]
