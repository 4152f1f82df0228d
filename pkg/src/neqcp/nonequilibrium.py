"""Out-of-equilibrium force assembly on the real-frequency axis.

The production route adds one real-axis double integral, restricted to
evanescent waves, to the Matsubara force evaluated with split
temperature roles.  The older split representation (half-sum of two
Matsubara forces plus separate propagating/evanescent corrections) is
kept as an internal consistency oracle: both routes integrate the same
physics through disjoint code paths and must agree.

Reduced variables throughout: nu = 2*a*omega/c for frequency,
kappa = 2*a*k for transverse momentum, and t = sqrt(kappa^2 - nu^2) on
the evanescent side so the separation exponential is exactly e^{-t}.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR, K_BOLTZMANN
from .equilibrium import (FORCE_REL_TOL, TENSOR_REL_TOL, ForceResult,
                          lifshitz_tilde_force, polarizability)
from .errors import DomainError
from .graphene import polarization_reduced, reflection_reduced
from .quadrature import integrate_adaptive

__all__ = [
    "theta",
    "angular_factors",
    "noneq_delta",
    "noneq_force",
    "cross_check_representation",
    "NoneqBreakdown",
    "ConsistencyReport",
]

_EV = 1.602176634e-19          # J per eV (exact)
_PHOTON_CEILING = 3.0 * _EV    # Dirac-cone description holds below this
_CUT_FACTOR = 40.0             # occupation difference < 1e-17 of its scale past it
_SERIES_CUT = 1e-4             # switch occupations to their small-argument series


def _occupation_vs_temp(w, temperature):
    """Bose-Einstein occupation of photon modes at angular frequency w."""
    if temperature == 0.0:
        return np.zeros_like(w)
    x = HBAR * w / (K_BOLTZMANN * temperature)
    occ = np.empty_like(x)
    small = x < _SERIES_CUT
    xs = x[small]
    occ[small] = 1.0 / xs - 0.5 + xs / 12.0 - xs * xs * xs / 720.0
    occ[~small] = 1.0 / np.expm1(np.minimum(x[~small], 700.0))
    return occ


def theta(omega, t_environment, t_sheet):
    """Occupation imbalance driving the nonequilibrium force.

    Difference of the Bose-Einstein occupations seen by the environment
    and by the sheet, positive when the environment is hotter.  Exactly
    zero when the temperatures coincide; diverges like 1/omega at small
    frequency, where the computation switches to a cancellation-free
    series in the temperature difference.
    """
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w).astype(float)
    if np.any(w <= 0.0):
        raise DomainError("frequency must be positive")
    if t_environment < 0.0 or t_sheet < 0.0:
        raise DomainError("temperatures must be nonnegative")
    if t_environment == t_sheet:
        out = np.zeros_like(w)
        return 0.0 if scalar else out
    out = _occupation_vs_temp(w, t_environment) - _occupation_vs_temp(w, t_sheet)
    if t_environment > 0.0 and t_sheet > 0.0:
        x_e = HBAR * w / (K_BOLTZMANN * t_environment)
        x_g = HBAR * w / (K_BOLTZMANN * t_sheet)
        both = (x_e < _SERIES_CUT) & (x_g < _SERIES_CUT)
        if both.any():
            # Difference of two large occupations: take it term by term
            # so the leading 1/x parts never meet in a subtraction.
            xe, xg = x_e[both], x_g[both]
            d = (HBAR * w[both] * (t_sheet - t_environment)
                 / (K_BOLTZMANN * t_environment * t_sheet))
            out[both] = (K_BOLTZMANN * (t_environment - t_sheet)
                         / (HBAR * w[both])
                         + d / 12.0
                         - d * (xe * xe + xe * xg + xg * xg) / 720.0)
    return float(out[0]) if scalar else out


def angular_factors(omega, k_perp):
    """Polarization weights (TM, TE) of the real-axis force kernel.

    TM carries 2*k^2*c^2 - omega^2, TE carries omega^2; both in SI
    (rad/s, 1/m), vectorized over either argument.
    """
    w2 = np.square(omega)
    return 2.0 * np.square(k_perp * C_LIGHT) - w2, w2


def _sheet_scale(gap, temperature):
    """gamma per unit kappa for a sheet at this temperature (inf = cold)."""
    if temperature == 0.0:
        return math.inf
    return HBAR * C_LIGHT / (2.0 * gap * K_BOLTZMANN * temperature)


def _check_dirac_window(t_hot):
    if _CUT_FACTOR * K_BOLTZMANN * t_hot >= _PHOTON_CEILING:
        raise DomainError(
            f"temperature {t_hot} K pushes the occupation-weighted spectrum "
            "to photon energies where the linear-band sheet model fails "
            f"(needs 40 k_B T < {_PHOTON_CEILING / _EV:g} eV, "
            f"i.e. T < {_PHOTON_CEILING / (_CUT_FACTOR * K_BOLTZMANN):.0f} K)")


def _vtilde(v_ratio):
    return 1.0 / 300.0 if v_ratio is None else v_ratio


def _evanescent_rows(nu, t, scale_sheet, v_ratio, tensor_rel_tol):
    """e^{-t}-weighted imaginary part of the polarization-summed kernel."""
    kappa = np.hypot(nu, t)
    ratio = nu / kappa
    vt = _vtilde(v_ratio)
    # The root substitutions keep nodes off the regime boundary, but a
    # rounding collision would still raise; one ulp restores the side.
    ratio = np.where(ratio == vt, np.nextafter(vt, 1.0), ratio)
    r_tm, r_te = reflection_reduced(ratio, scale_sheet * kappa,
                                    v_ratio=v_ratio, rel_tol=tensor_rel_tol)
    bracket = (nu * nu + 2.0 * t * t) * r_tm + nu * nu * r_te
    return t * np.exp(-t) * bracket.imag


def _sheet_denominators(nu, t, scale_sheet, v_ratio, rel_tol):
    """Complex reflection denominators along the sheet-wave strip.

    Returns (den_tm, den_te, qhat) for kappa = hypot(nu, t); a zero of
    a real part with a small imaginary part is a collective sheet
    resonance that shows up as a near-pole of the reflection there.
    """
    kappa = np.hypot(nu, t)
    ratio = nu / kappa
    vt = _vtilde(v_ratio)
    ratio = np.where(ratio == vt, np.nextafter(vt, 1.0), ratio)
    z00, zp, t00, tp = polarization_reduced(ratio, scale_sheet * kappa,
                                            v_ratio=v_ratio, rel_tol=rel_tol)
    qhat = np.sqrt(np.clip((1.0 - ratio) * (1.0 + ratio), 0.0, None))
    return qhat * (z00 + t00) + 2.0, (zp + tp) + 2.0 * qhat, qhat


def _refine_crossing(lo, hi, d_lo, d_hi, den_of_t, channel):
    """Bracketed secant for a sign change of Re(denominator).

    ``den_of_t`` maps a scalar t to the complex denominator pair;
    ``channel`` selects TM (0) or TE (1).  Returns (root, halfwidth),
    the halfwidth being |Im den| over |slope of Re den| at the root:
    the scale on which the reflection spike lives.
    """
    a, b, fa, fb = lo, hi, d_lo, d_hi
    t_prev, f_prev = a, fa
    t_cur, f_cur = b, fb
    eps_im = 0.0
    for _ in range(60):
        if f_cur == f_prev:
            t_next = 0.5 * (a + b)
        else:
            t_next = t_cur - f_cur * (t_cur - t_prev) / (f_cur - f_prev)
            if not a < t_next < b:
                t_next = 0.5 * (a + b)
        den = den_of_t(t_next)[channel]
        f_next = den.real
        eps_im = abs(den.imag)
        if f_next == 0.0 or abs(t_next - t_cur) <= 1e-14 * (abs(t_next) + hi):
            t_cur, f_cur = t_next, f_next
            break
        if (f_next < 0.0) == (fa < 0.0):
            a, fa = t_next, f_next
        else:
            b, fb = t_next, f_next
        t_prev, f_prev = t_cur, f_cur
        t_cur, f_cur = t_next, f_next
    slope = abs(f_cur - f_prev) / max(abs(t_cur - t_prev), 1e-300)
    if slope == 0.0:
        slope = abs(d_hi - d_lo) / (hi - lo)
    return t_cur, max(eps_im / max(slope, 1e-300), 1e-13 * hi)


def _spike_centers(nu, grid, den_tm, den_te, scale_sheet, v_ratio):
    """Locate reflection near-poles from a coarse strip scan.

    Sign changes of either real part are refined by the secant above;
    a non-crossing local dip below 0.3 is kept at its scanned minimum
    (those spikes are broad enough for the edge cascade to bracket).
    """

    def den_of_t(t):
        pair = _sheet_denominators(nu, np.array([t]), scale_sheet, v_ratio,
                                   rel_tol=1e-10)
        return pair[0][0], pair[1][0]

    spikes = []
    for channel, den in enumerate((den_tm, den_te)):
        re = den.real
        flips = np.nonzero(np.signbit(re[1:]) != np.signbit(re[:-1]))[0]
        for i in flips:
            spikes.append(_refine_crossing(grid[i], grid[i + 1], re[i],
                                           re[i + 1], den_of_t, channel))
        mag = np.abs(re)
        dip = np.nonzero((mag[1:-1] < 0.3) & (mag[1:-1] <= mag[:-2])
                         & (mag[1:-1] <= mag[2:]))[0] + 1
        for i in dip:
            if any(grid[i - 1] <= c <= grid[i + 1] for c, _ in spikes):
                continue
            width = max(mag[i], np.abs(den.imag[i])) \
                / max(abs(re[i + 1] - re[i - 1])
                      / (grid[i + 1] - grid[i - 1]), 1e-300)
            spikes.append((grid[i], width))
    return spikes


def _cascade_edges(lo, hi, spikes):
    """Panel edges geometrically clustered around each spike center."""
    edges = [np.geomspace(1e-4 * hi, hi, 9), np.array([lo, hi])]
    for center, width in spikes:
        scales = width * 4.0 ** np.arange(0, 22)
        scales = scales[scales < hi - lo]
        pts = np.concatenate([center - scales[::-1], [center],
                              center + scales])
        edges.append(pts[(pts > lo) & (pts < hi)])
    merged = np.unique(np.concatenate(edges))
    return merged[(merged >= lo) & (merged <= hi)]


def _strip_piece(nu, hi, scale_sheet, v_ratio, rel_tol, abs_tol,
                 tensor_rel_tol, substituted):
    """Sheet-wave-side momentum integral over t in (0, hi).

    ``substituted`` integrates in u = sqrt(hi - t), which absorbs the
    square-root kink when hi is the regime boundary; otherwise the
    range ends inside the strip and plain panels suffice.  Either way
    the panel edges carry the resonance cascade; ``abs_tol`` supplies
    the scale of the rest of the momentum integral, so a strip whose
    contribution is negligible converges without resolving its spike.
    """
    grid = np.unique(np.concatenate(
        [np.geomspace(1e-7 * hi, hi * (1.0 - 1e-9), 128),
         np.linspace(1e-7 * hi, hi * (1.0 - 1e-9), 48)]))
    den_tm, den_te, qhat = _sheet_denominators(nu, grid, scale_sheet,
                                               v_ratio, rel_tol=1e-4)
    spikes = _spike_centers(nu, grid, den_tm, den_te, scale_sheet, v_ratio)
    # Same scan doubles as a magnitude estimate for the absolute floor:
    # the numerators recovered from den - baseline avoid a second pass.
    r_tm = (den_tm - 2.0) / den_tm
    r_te = -(den_te - 2.0 * qhat) / den_te
    bracket = (nu * nu + 2.0 * grid * grid) * r_tm + nu * nu * r_te
    f_scan = grid * np.exp(-grid) * bracket.imag
    mass = np.trapezoid(np.abs(f_scan), grid)
    abs_tol = max(abs_tol, 1e-3 * rel_tol * mass)
    edges = _cascade_edges(0.0, hi, spikes)

    def f(t):
        return _evanescent_rows(nu, t, scale_sheet, v_ratio, tensor_rel_tol)

    if not substituted:
        return integrate_adaptive(f, 0.0, hi, rel_tol=rel_tol,
                                  abs_tol=abs_tol, initial_edges=edges)

    u_edges = np.unique(np.sqrt(np.clip(hi - edges[::-1], 0.0, None)))

    def near(u):
        return 2.0 * u * f(hi - u * u)

    return integrate_adaptive(near, 0.0, math.sqrt(hi), rel_tol=rel_tol,
                              abs_tol=abs_tol, initial_edges=u_edges)


def _evanescent_integral(nu, scale_sheet, v_ratio, rel_tol, tensor_rel_tol):
    """Momentum integral of the evanescent kernel at fixed frequency.

    Split at the sheet-wave boundary kappa = nu/vtilde: the response is
    analytic on each side but only in sqrt(|t - t_boundary|), so the
    boundary is approached through that root variable, which removes
    the cusp exactly.  The far side, integrated first, hosts no
    resonances (its density response is real-dominated and positive)
    and is dropped once the boundary sits past t = 120 (weight below
    e^{-120}); the sheet-wave side is searched for resonances
    explicitly, with the far value setting its negligibility floor.
    """
    vt = _vtilde(v_ratio)
    t_boundary = nu * math.sqrt((1.0 - vt) * (1.0 + vt)) / vt

    if t_boundary > 120.0:
        return _strip_piece(nu, 120.0, scale_sheet, v_ratio, rel_tol, 0.0,
                            tensor_rel_tol, substituted=False)

    def f(t):
        return _evanescent_rows(nu, t, scale_sheet, v_ratio, tensor_rel_tol)

    def far(w):
        return 2.0 * w * f(t_boundary + w * w)

    fv, fe = integrate_adaptive(far, 0.0, math.sqrt(60.0), rel_tol=rel_tol)
    tail = 2.0 * abs(float(f(np.array([t_boundary + 60.0]))[0]))

    value, err = _strip_piece(nu, t_boundary, scale_sheet, v_ratio, rel_tol,
                              0.1 * rel_tol * abs(fv), tensor_rel_tol,
                              substituted=True)
    return value + fv, err + fe + tail


def _propagating_integral(nu, scale_sheet, v_ratio, rel_tol, tensor_rel_tol):
    """Momentum integral over traveling waves at fixed frequency.

    In the round-trip phase variable u = sqrt(nu^2 - kappa^2) the range
    is finite and the oscillation a plain e^{iu}; the kappa -> 0 end is
    reached through w = sqrt(nu - u), in which the response is analytic.
    """

    def f(w):
        u = nu - w * w
        kappa = w * np.sqrt(2.0 * nu - w * w)
        r_tm, r_te = reflection_reduced(nu / kappa, scale_sheet * kappa,
                                        v_ratio=v_ratio,
                                        rel_tol=tensor_rel_tol)
        bracket = (nu * nu - 2.0 * u * u) * r_tm + nu * nu * r_te
        return 2.0 * w * u * (np.exp(1j * u) * bracket).imag

    return integrate_adaptive(f, 0.0, math.sqrt(nu), rel_tol=rel_tol)


def _weighted_outer(gap, t_env, t_sheet, columns, rel_tol, nu_max):
    """Occupation-weighted frequency integral of per-frequency columns.

    ``columns(nu)`` returns ([values...], [errors...]) for one reduced
    frequency; every value column is multiplied by the occupation
    imbalance and integrated over nu in (0, nu_max].  Returns the value
    array and the combined (outer + inner) error array.
    """

    def outer(nus):
        th = theta(C_LIGHT * nus / (2.0 * gap), t_env, t_sheet)
        rows = []
        for i, nu in enumerate(nus):
            vals, errs = columns(float(nu))
            rows.append(np.concatenate([th[i] * np.asarray(vals),
                                        abs(th[i]) * np.asarray(errs)]))
        return np.vstack(rows)

    probe_v, probe_e = columns(0.5 * nu_max)
    n = len(probe_v)
    control = np.arange(2 * n) < n
    edges = nu_max * np.array([0.0, 1e-5, 1e-4, 1e-3, 1e-2, 0.05, 0.15,
                               0.3, 0.5, 0.75, 1.0])
    vals, errs = integrate_adaptive(outer, 0.0, nu_max, rel_tol=rel_tol,
                                    control=control, initial_edges=edges)
    total_err = np.hypot(errs[:n], vals[n:])
    return vals[:n], total_err


def _delta_with_error(gap, t_env, t_sheet, spec, rel_tol, v_fermi):
    """Evanescent-only nonequilibrium addition, in newtons, with bound."""
    if t_env == t_sheet:
        return 0.0, 0.0
    _check_dirac_window(max(t_env, t_sheet))
    v_ratio = None if v_fermi is None else v_fermi / C_LIGHT
    scale_sheet = _sheet_scale(gap, t_sheet)
    nu_max = _CUT_FACTOR * 2.0 * gap * K_BOLTZMANN * max(t_env, t_sheet) \
        / (HBAR * C_LIGHT)
    tensor_rel_tol = min(TENSOR_REL_TOL, 1e-2 * rel_tol)

    def columns(nu):
        v, e = _evanescent_integral(nu, scale_sheet, v_ratio, 0.1 * rel_tol,
                                    tensor_rel_tol)
        return [v], [e]

    vals, errs = _weighted_outer(gap, t_env, t_sheet, columns, rel_tol, nu_max)
    pref = HBAR * C_LIGHT * polarizability(spec) / (16.0 * math.pi * gap ** 5)
    return pref * float(vals[0]), pref * float(errs[0])


def _validate_state(gap, t_env, t_sheet):
    if gap <= 0.0:
        raise DomainError(f"gap must be positive, got {gap}")
    if t_env < 0.0 or t_sheet < 0.0:
        raise DomainError("temperatures must be nonnegative")
    if t_env == 0.0 and t_sheet == 0.0:
        raise DomainError("at least one temperature must be positive")


def noneq_delta(gap, t_environment, t_sheet, spec, rel_tol=FORCE_REL_TOL,
                v_fermi=None):
    """Nonequilibrium force addition in newtons.

    Positive (repulsive) for a sheet colder than the environment.
    Exactly 0.0 with no quadrature run when the temperatures coincide.
    """
    _validate_state(gap, t_environment, t_sheet)
    value, _ = _delta_with_error(gap, t_environment, t_sheet, spec, rel_tol,
                                 v_fermi)
    return value


@dataclass(frozen=True)
class NoneqBreakdown:
    """Two-term additive split of the out-of-equilibrium force.

    ``comb_term`` is the Matsubara force with the frequency comb at the
    environment temperature and the sheet response at the sheet
    temperature; ``evanescent_shift`` is the occupation-imbalance
    real-axis addition.  Their sum is the total force.

    The remaining fields are only filled by the representation
    cross-check: ``half_difference`` is the real-axis spectral value of
    half the difference of the two Matsubara forces, ``half_sum_force``
    the symmetrized force built from it, and ``split_shift`` the
    correction completing that older representation.  When present,
    ``half_sum_force + split_shift`` equals the total force up to
    quadrature error.
    """

    comb_term: float               # N
    evanescent_shift: float        # N
    half_difference: float = None  # N, cross-check only
    half_sum_force: float = None   # N, cross-check only
    split_shift: float = None      # N, cross-check only

    @property
    def force(self):
        return self.comb_term + self.evanescent_shift


def noneq_force(gap, t_environment, t_sheet, spec, rel_tol=FORCE_REL_TOL,
                v_fermi=None):
    """Total force on the sphere out of thermal equilibrium, in newtons.

    The Matsubara term runs at the environmental temperature with sheet
    reflection at the sheet temperature; the real-axis addition covers
    the rest.  At equal temperatures this reduces bitwise to the
    equilibrium force.
    """
    _validate_state(gap, t_environment, t_sheet)
    if t_environment <= 0.0:
        raise DomainError("environment temperature must be positive: the "
                          "frequency comb is built from it")
    base = lifshitz_tilde_force(gap, t_environment, t_sheet, spec,
                                rel_tol=rel_tol, v_fermi=v_fermi)
    shift, shift_err = _delta_with_error(gap, t_environment, t_sheet, spec,
                                         rel_tol, v_fermi)
    return ForceResult(
        force=base.force + shift,
        decomposition={"equilibrium_like": base.force,
                       "nonequilibrium_shift": shift},
        error=base.error + shift_err,
        breakdown=NoneqBreakdown(comb_term=base.force,
                                 evanescent_shift=shift))


@dataclass(frozen=True)
class ConsistencyReport:
    """Agreement between the two independent force representations.

    ``force_direct`` is the production (evanescent-only) route;
    ``force_via_split`` rebuilds the same force from the half-sum form
    with separate propagating and evanescent corrections.  The
    half-difference fields compare a Matsubara-sum difference against
    its real-axis spectral form, the sharpest end-to-end check of the
    real-axis sheet response.
    """

    force_direct: float
    force_via_split: float
    half_difference_sum: float       # from two Matsubara evaluations
    half_difference_spectral: float  # from the real-axis integral
    force_mismatch: float            # relative
    half_difference_mismatch: float  # relative to the force scale
    tolerance: float
    breakdown: NoneqBreakdown = None

    @property
    def ok(self):
        return (self.force_mismatch <= self.tolerance
                and self.half_difference_mismatch <= self.tolerance)


def cross_check_representation(gap, t_environment, t_sheet, spec,
                               tolerance=1e-4, v_fermi=None):
    """Run both force representations and report their agreement.

    Needs a sheet above absolute zero (the split form evaluates a
    Matsubara sum at the sheet temperature).  A mismatch beyond
    ``tolerance`` is reported, not raised.
    """
    _validate_state(gap, t_environment, t_sheet)
    if t_sheet <= 0.0 or t_environment <= 0.0:
        raise DomainError("the split representation sums frequency combs "
                          "at both temperatures; both must be positive")
    _check_dirac_window(max(t_environment, t_sheet))
    rel_tol = 0.1 * tolerance
    v_ratio = None if v_fermi is None else v_fermi / C_LIGHT
    scale_sheet = _sheet_scale(gap, t_sheet)
    nu_max = _CUT_FACTOR * 2.0 * gap * K_BOLTZMANN \
        * max(t_environment, t_sheet) / (HBAR * C_LIGHT)
    tensor_rel_tol = min(TENSOR_REL_TOL, 1e-2 * rel_tol)

    def columns(nu):
        ev, ev_err = _evanescent_integral(nu, scale_sheet, v_ratio,
                                          0.1 * rel_tol, tensor_rel_tol)
        pv, pv_err = _propagating_integral(nu, scale_sheet, v_ratio,
                                           0.1 * rel_tol, tensor_rel_tol)
        return [pv + ev, ev - pv], [pv_err + ev_err, pv_err + ev_err]

    vals, _ = _weighted_outer(gap, t_environment, t_sheet, columns, rel_tol,
                              nu_max)
    pref = HBAR * C_LIGHT * polarizability(spec) \
        / (32.0 * math.pi * gap ** 5)
    half_spectral = pref * float(vals[0])
    shift_split = pref * float(vals[1])

    tilde_env = lifshitz_tilde_force(gap, t_environment, t_sheet, spec,
                                     rel_tol=rel_tol, v_fermi=v_fermi).force
    tilde_sheet = lifshitz_tilde_force(gap, t_sheet, t_sheet, spec,
                                       rel_tol=rel_tol, v_fermi=v_fermi).force
    half_sum = 0.5 * (tilde_sheet - tilde_env)

    via_split = tilde_env + half_spectral + shift_split
    direct_result = noneq_force(gap, t_environment, t_sheet, spec,
                                rel_tol=rel_tol, v_fermi=v_fermi)
    direct = direct_result.force
    scale = abs(direct)
    parts = direct_result.breakdown
    return ConsistencyReport(
        force_direct=direct,
        force_via_split=via_split,
        half_difference_sum=half_sum,
        half_difference_spectral=half_spectral,
        force_mismatch=abs(via_split - direct) / scale,
        half_difference_mismatch=abs(half_spectral - half_sum) / scale,
        tolerance=tolerance,
        breakdown=NoneqBreakdown(
            comb_term=parts.comb_term,
            evanescent_shift=parts.evanescent_shift,
            half_difference=half_spectral,
            half_sum_force=tilde_env + half_spectral,
            split_shift=shift_split))
