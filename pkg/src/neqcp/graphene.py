"""Electromagnetic response of free-standing gapless, undoped graphene.

The sheet enters the force theory through two independent components of
its polarization tensor, handled here in reduced form

    pi00 = Pi_00 / (hbar k_perp),      pi = Pi / (hbar k_perp**3),

as functions of three dimensionless numbers:

    ratio   = omega / (c k_perp)  on the real frequency axis,
    rho     = xi / (c k_perp)     on the imaginary (thermal) axis,
    gamma   = hbar c k_perp / (k_B T)   with inf encoding T = 0,
    v_ratio = v_F / c             (Dirac-cone slope over light speed).

Real-axis evaluation splits at ratio = v_ratio.  Above it (Plasmonic,
and its Propagating continuation past ratio = 1) the zero-temperature
parts are purely imaginary; below it (FarEvanescent) they are real.
The split point itself is a pole of the zero-temperature parts and is
excluded: callers must approach it by limits.

Thermal corrections are Fermi-weighted integrals whose non-Fermi
factors carry inverse-square-root edges interior to the integration
range.  Each correction is assembled from fixed pieces separated at
those edges and integrated by the tanh-sinh column engine, so a whole
batch of wavenumbers shares one abscissa sweep.  Semi-infinite pieces
are truncated where the Fermi weight reaches exp(-80) (~1e-35 of its
peak value); the neglected tail is orders of magnitude below every
supported tolerance.
"""

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .constants import (
    C_LIGHT,
    HBAR,
    K_BOLTZMANN,
    FINE_STRUCTURE,
    V_FERMI_DEFAULT,
)
from .errors import DomainError, RegimeBoundaryError, SingularityError
from .quadrature import tanh_sinh_columns

__all__ = [
    "Regime",
    "SpectralPoint",
    "PolarizationPair",
    "ReflectionPair",
    "pi_zero_T_plasmonic",
    "pi00_thermal_plasmonic",
    "pi_thermal_plasmonic",
    "pi_far_evanescent",
    "pi_matsubara",
    "reflection",
    "polarization_reduced",
    "polarization_reduced_matsubara",
    "reflection_reduced",
    "reflection_reduced_matsubara",
]

_AL = FINE_STRUCTURE

# Fermi-weight truncation: integrals in the scaled thermal variable stop
# where the weight's argument reaches _FERMI_CUT / 2 = 80.
_FERMI_CUT = 160.0


def _fermi(x):
    """Occupation factor 1/(exp(x) + 1) for x >= 0, overflow-free."""
    e = np.exp(-x)
    return e / (1.0 + e)


class Regime(enum.Enum):
    """Where a spectral point sits relative to the two light cones."""

    MATSUBARA_AXIS = "matsubara_axis"
    PLASMONIC = "plasmonic"
    FAR_EVANESCENT = "far_evanescent"
    PROPAGATING = "propagating"


@dataclass(frozen=True)
class SpectralPoint:
    """One evaluation point of the sheet response.

    ``omega`` holds the angular frequency in rad/s for real-axis
    regimes and the nonnegative integer thermal-frequency index for
    ``Regime.MATSUBARA_AXIS``.
    """

    omega: float
    k_perp: float
    temperature: float
    regime: Regime

    @staticmethod
    def real_axis(omega, k_perp, temperature, v_fermi=None):
        """Classify a real-axis point; the Dirac-cone edge is excluded."""
        vf = V_FERMI_DEFAULT if v_fermi is None else float(v_fermi)
        if not k_perp > 0.0:
            raise DomainError(f"k_perp must be positive, got {k_perp}")
        if omega < 0.0:
            raise DomainError(f"omega must be nonnegative, got {omega}")
        if temperature < 0.0:
            raise DomainError(f"temperature must be nonnegative, got {temperature}")
        if omega == vf * k_perp:
            raise RegimeBoundaryError(
                f"omega = v_F * k_perp ({omega} rad/s) is a pole of the "
                "zero-temperature response; approach it by limits")
        if omega < vf * k_perp:
            regime = Regime.FAR_EVANESCENT
        elif k_perp < omega / C_LIGHT:
            regime = Regime.PROPAGATING
        else:
            # the light cone k_perp = omega/c itself is regular and is
            # grouped with the evanescent side
            regime = Regime.PLASMONIC
        return SpectralPoint(float(omega), float(k_perp), float(temperature),
                             regime)

    @staticmethod
    def matsubara(order, k_perp, temperature):
        """Imaginary-axis point at the given thermal-frequency index."""
        if order != int(order) or order < 0:
            raise DomainError(f"order must be a nonnegative integer, got {order}")
        if not k_perp > 0.0:
            raise DomainError(f"k_perp must be positive, got {k_perp}")
        if temperature < 0.0:
            raise DomainError(f"temperature must be nonnegative, got {temperature}")
        return SpectralPoint(float(int(order)), float(k_perp),
                             float(temperature), Regime.MATSUBARA_AXIS)


class PolarizationPair(NamedTuple):
    pi00: complex
    pi: complex


class ReflectionPair(NamedTuple):
    r_tm: complex
    r_te: complex


def _norm_inputs(spectral, gamma):
    spectral = np.atleast_1d(np.asarray(spectral, dtype=float))
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), spectral.shape).copy()
    if spectral.ndim != 1:
        raise DomainError("spectral arguments must be scalars or 1-d arrays")
    if np.any(np.isnan(spectral)) or np.any(np.isnan(gamma)):
        raise DomainError("NaN in spectral inputs")
    if np.any(gamma <= 0.0):
        raise DomainError("gamma must be positive (inf encodes T = 0)")
    return spectral, gamma


def _vt(v_ratio):
    vt = V_FERMI_DEFAULT / C_LIGHT if v_ratio is None else float(v_ratio)
    if not 0.0 < vt < 1.0:
        raise DomainError(f"v_ratio must lie in (0, 1), got {vt}")
    return vt


def _interval_reduced(r, gamma_in, vt, rel_tol):
    """Tensor parts for ratio > v_ratio (sheet waves, both sides of r = 1).

    Returns (zero00, zerop, thermal00, thermalp) complex arrays.  The
    thermal real parts integrate a Fermi weight against square-root
    factors over three windows split at ratio -+ v_ratio; the imaginary
    parts come from the middle window recast as an angular integral.
    """
    n = r.size
    phat = np.sqrt((r - vt) * (r + vt))
    z00 = 1j * math.pi * _AL / phat
    zp = -1j * math.pi * _AL * phat
    t00 = np.zeros(n, dtype=complex)
    tp = np.zeros(n, dtype=complex)
    finite = np.isfinite(gamma_in)
    if not finite.any():
        return z00, zp, t00, tp

    gam = np.where(finite, gamma_in, 1.0)
    ym = r - vt
    yp = r + vt
    cut = np.where(finite, _FERMI_CUT / gam, 0.0)
    w1 = np.minimum(ym, cut)
    w2 = np.clip(np.minimum(yp, cut) - ym, 0.0, None)
    w3 = np.clip(cut - yp, 0.0, None)
    wth = np.where(ym < cut, math.pi, 0.0)
    # zero-width columns are still computed (not integrated); give them
    # harmless stand-in coordinates so no invalid operations fire
    w3s = np.where(w3 > 0.0, w3, 1.0)

    def f(x, omx, cols):
        need = set(np.unique(cols // n).tolist())
        xc = x[:, None]
        oc = omx[:, None]
        parts = {}
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if need & {0, 1}:
                # Raw forms subtract near-equal square roots (the thermal
                # deviation is tiny against the r-scale factors), so both
                # integrands are rationalized exactly:
                #   (2 phat)^2 - (b1p + b1m)^2 = 2 (X - B),
                #   X = phat^2 - y^2, B = b1p b1m,
                #   X^2 - B^2 = 4 y^2 vt^2,
                # leaving only positive sums, products and the explicit
                # 1/B edge divergence of the second kind.
                y = w1 * xc
                edge = (ym - w1) + w1 * oc           # ym - y, exact at the edge
                b1p = np.sqrt((y + ym) * (y + yp))
                b1m = np.sqrt(edge * (yp - y))
                fw = _fermi(0.5 * gam * y)
                bsum = b1p + b1m
                bprod = b1p * b1m
                xfac = (phat - y) * (phat + y)
                g1 = (4.0 * y * y * vt * vt
                      / (phat * (2.0 * phat + bsum) * (xfac + bprod)))
                parts[0] = fw * g1
                parts[1] = fw * (r * r * g1
                                 - vt * vt * bsum * y * y
                                 * (2.0 * r * r + 2.0 * vt * vt - y * y)
                                 / (2.0 * phat * bprod
                                    * (phat * phat + bprod)))
            if need & {2, 3}:
                y = ym + w2 * xc
                b1p = np.sqrt((y + ym) * (y + yp))
                fw = _fermi(0.5 * gam * y)
                parts[2] = fw * (1.0 - b1p / (2.0 * phat))
                parts[3] = fw * (r * r - 0.5 * phat * (y + r) ** 2 / b1p)
            if need & {4, 5}:
                # b1p - b1m = 4 r y / (b1p + b1m) exactly, and the leftover
                # r-scale cancellation rationalizes to
                #   phat (b1p + b1m) - 2 r y = -8 r^2 vt^2 y^4
                #     / {[phat (b1p + b1m) + 2 r y] [phat^2 b1p b1m + wfac]}
                # with wfac = y^2 (r^2 + vt^2) - phat^4 > 0 on the piece,
                # so each factor below keeps one sign.
                edge = w3s * xc                      # y - yp, exact at the edge
                y = yp + edge
                b1p = np.sqrt((y + ym) * (y + yp))
                b1m = np.sqrt(edge * (y - ym))
                fw = _fermi(0.5 * gam * y)
                bsum = b1p + b1m
                bprod = b1p * b1m
                ps = phat * bsum
                wfac = y * y * (r * r + vt * vt) - (phat * phat) ** 2
                g3 = (-8.0 * r * r * vt * vt * y ** 4
                      / (ps * (ps + 2.0 * r * y)
                         * (phat * phat * bprod + wfac)))
                parts[4] = fw * g3
                parts[5] = fw * (r * r * g3
                                 + 2.0 * vt * vt * r * y
                                 * (bprod + phat * phat) / (ps * bprod))
            if need & {6, 7}:
                sn = np.sin(math.pi * (xc - 0.5))
                fw = _fermi(0.5 * gam * (r + vt * sn))
                parts[6] = (1.0 - sn * sn) * fw
                parts[7] = sn * sn * fw
        zero = np.zeros((x.size, n))
        big = np.concatenate([parts.get(b, zero) for b in range(8)], axis=1)
        return big[:, cols]

    # Convergence floors tied to what the assembled tensor needs: a piece
    # integral only has to resolve rel_tol of the zero-temperature scale
    # of its own component, not of itself (nearly-dead pieces otherwise
    # chase their own roundoff noise forever).
    z00mag = math.pi * _AL / phat
    zpmag = math.pi * _AL * phat
    pref = 8.0 * _AL / (vt * vt)
    fl = 0.05 * rel_tol
    f00 = fl * z00mag / pref
    fp = fl * zpmag / pref
    widths = np.concatenate([w1, w1, w2, w2, w3, w3, wth, wth])
    floors = np.concatenate([f00, fp, f00, fp, f00, fp,
                             fl * z00mag * phat / (4.0 * _AL),
                             fl * zpmag / (4.0 * _AL * phat)])
    vals, _ = tanh_sinh_columns(f, widths, rel_tol=rel_tol, abs_floor=floors)
    s = vals.reshape(8, n)
    pref = 8.0 * _AL / (vt * vt)
    t00 = pref * (s[0] + s[2] + s[4]) - 1j * (4.0 * _AL / phat) * s[6]
    tp = pref * (s[1] + s[3] + s[5]) + 1j * (4.0 * _AL * phat) * s[7]
    return z00, zp, t00, tp


def _far_reduced(r, gamma_in, vt, rel_tol):
    """Tensor parts for 0 <= ratio < v_ratio (deep evanescent side).

    The thermal integrand's two square-root factors have real roots at
    root_lo <= 1 <= root_hi (product exactly 1); past each root its
    factor turns imaginary with the retarded branch.  Three pieces
    separated at the roots; the outermost real part needs no quadrature
    because its non-Fermi factor is constant.
    """
    n = r.size
    ptil = np.sqrt((vt - r) * (vt + r))
    z00 = (math.pi * _AL / ptil).astype(complex)
    zp = (math.pi * _AL * ptil).astype(complex)
    t00 = np.zeros(n, dtype=complex)
    tp = np.zeros(n, dtype=complex)
    finite = np.isfinite(gamma_in)
    if not finite.any():
        return z00, zp, t00, tp

    gam = np.where(finite, gamma_in, 1.0)
    dhat = 0.5 * gam * ptil
    cut = np.where(finite, _FERMI_CUT / (gam * ptil), 0.0)
    root_lo = (vt - r) / ptil
    root_hi = (vt + r) / ptil
    wa = np.minimum(root_lo, cut)
    wb = np.clip(np.minimum(root_hi, cut) - root_lo, 0.0, None)
    wc = np.clip(cut - root_hi, 0.0, None)
    wbs = np.where(wb > 0.0, wb, 1.0)
    wcs = np.where(wc > 0.0, wc, 1.0)
    droot = 2.0 * r / ptil                   # root_hi - root_lo, no subtraction

    def f(x, omx, cols):
        need = set(np.unique(cols // n).tolist())
        xc = x[:, None]
        oc = omx[:, None]
        parts = {}
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            if need & {0, 1}:
                v = wa * xc
                dlo = (root_lo - wa) + wa * oc       # root_lo - v, exact
                spl = np.sqrt(dlo * (v + root_hi))
                # distance to the upper root through the lower one: exact
                # even when ratio = 0 merges both roots onto the edge
                smn = np.sqrt((droot + dlo) * (v + root_lo))
                fw = _fermi(dhat * v)
                sprod = spl * smn
                # the roots' product is exactly 1, which rationalizes
                # 1 - (spl + smn)/2 into a single positive quotient
                parts[0] = fw * (v * v * (4.0 + droot * droot)
                                 / ((1.0 + v * v + sprod)
                                    * (2.0 + spl + smn)))
                parts[1] = fw * (r * r - 0.5 * ((ptil * v + r) ** 2 / spl
                                                + (ptil * v - r) ** 2 / smn))
            if need & {2, 3, 4, 5}:
                dlo = wbs * xc                       # v - root_lo, exact
                v = root_lo + dlo
                dhi = (root_hi - root_lo - wb) + wbs * oc    # root_hi - v
                apl = np.sqrt(dlo * (v + root_hi))   # |first factor|^(1/2)
                smn = np.sqrt(dhi * (v + root_lo))
                fw = _fermi(dhat * v)
                parts[2] = fw * (1.0 - 0.5 * smn)
                parts[3] = fw * (r * r - 0.5 * (ptil * v - r) ** 2 / smn)
                parts[4] = fw * (0.5 * apl)
                parts[5] = fw * (-0.5 * (ptil * v + r) ** 2 / apl)
            if need & {6, 7}:
                dhi = wcs * xc                       # v - root_hi, exact
                v = root_hi + dhi
                dlo = droot + dhi                    # v - root_lo, exact at r=0
                apl = np.sqrt(dlo * (v + root_hi))
                smn = np.sqrt(dhi * (v + root_lo))   # |second factor|^(1/2)
                fw = _fermi(dhat * v)
                # apl^2 - smn^2 = 2 droot v exactly, and both quadratic
                # numerators reduce through vt^2 + ptil^2 (distance
                # product), collapsing the near-equal difference
                diff = 2.0 * droot * v / (apl + smn)
                parts[6] = fw * 0.5 * diff
                parts[7] = fw * (-0.5) * diff * (ptil * ptil
                                                 - vt * vt / (apl * smn))
        zero = np.zeros((x.size, n))
        big = np.concatenate([parts.get(b, zero) for b in range(8)], axis=1)
        return big[:, cols]

    pref = 8.0 * _AL * ptil / (vt * vt)
    fl = 0.05 * rel_tol
    f00 = fl * (math.pi * _AL / ptil) / pref
    fp = fl * (math.pi * _AL * ptil) / pref
    widths = np.concatenate([wa, wa, wb, wb, wb, wb, wc, wc])
    floors = np.concatenate([f00, fp, f00, fp, f00, fp, f00, fp])
    vals, _ = tanh_sinh_columns(f, widths, rel_tol=rel_tol, abs_floor=floors)
    s = vals.reshape(8, n)
    # outermost piece, real part: non-Fermi factor is exactly 1 (pi00)
    # and r^2 (pi); the remaining Fermi integral is elementary
    live = wc > 0.0
    hi_arg = dhat * np.where(live, cut, 1.0)
    lo_arg = dhat * root_hi
    tail = np.where(live,
                    (np.log1p(np.exp(-lo_arg)) - np.log1p(np.exp(-hi_arg))) / dhat,
                    0.0)
    t00 = pref * (s[0] + s[2] + tail) + 1j * pref * (s[4] + s[6])
    tp = pref * (s[1] + s[3] + r * r * tail) + 1j * pref * (s[5] + s[7])
    return z00, zp, t00, tp


def _matsubara_reduced(rho, gamma_in, vt, rel_tol):
    """Tensor parts on the imaginary axis for rho > 0 (real results).

    The two branch terms are complex conjugates, so the branch sum is
    twice the real part of one of them; the integrand is smooth because
    the radicand's imaginary part keeps it away from the branch cut.
    """
    n = rho.size
    ptil = np.sqrt(vt * vt + rho * rho)
    z00 = math.pi * _AL / ptil
    zp = math.pi * _AL * ptil
    t00 = np.zeros(n)
    tp = np.zeros(n)
    finite = np.isfinite(gamma_in)
    if not finite.any():
        return z00, zp, t00, tp

    gam = np.where(finite, gamma_in, 1.0)
    dhat = 0.5 * gam * ptil
    cut = np.where(finite, _FERMI_CUT / (gam * ptil), 0.0)
    slope = rho / ptil
    mu = vt * vt / (ptil * (ptil + rho))     # 1 - slope, no cancellation
    # the radicand's real part changes sign at v = 1, leaving a kink of
    # width ~ slope there; splitting at it keeps the pieces smooth from
    # their edges for arbitrarily small rho
    wlo = np.minimum(1.0, cut)
    whi = np.clip(cut - 1.0, 0.0, None)
    whis = np.where(whi > 0.0, whi, 1.0)

    def factors(v, one_m_v):
        # Naive branch-sum forms lose all precision as slope -> 1 (the
        # density integrand is proportional to 1 - slope there), so both
        # factors are rewritten in sig = Re(sqrt(radicand)) using
        #   v^2 (1 + sig) + 2 slope v Im(sqrt) = (1 - sig)(v^2 + 2 sig (1 + sig))
        # with 1 - sig itself taken from |radicand|^2 rationalization;
        # every piece below is a sum or product of exact quantities.
        rr = one_m_v * (1.0 + v)             # Re radicand, exact at v = 1
        sv = slope * v
        mag = np.hypot(rr, 2.0 * sv)
        arr = np.abs(rr)
        big = np.sqrt(0.5 * (mag + arr))
        pos = rr >= 0.0
        sig = np.where(pos, big, sv / big)
        tau2 = np.where(pos, 2.0 * sv * sv / (mag + arr), 0.5 * (mag + arr))
        one_m_sig = (2.0 * v * v * mu * (1.0 + slope)
                     / ((1.0 + v * v + mag) * (1.0 + sig)))
        g = (one_m_sig * (v * v + 2.0 * sig * (1.0 + sig))
             / ((1.0 + sig) ** 2 + tau2))
        h = (-rho * rho * g + vt * vt * v * v
             * (2.0 * slope * slope - sig * sig) / (sig * mag))
        return g, h

    def f(x, omx, cols):
        need = set(np.unique(cols // n).tolist())
        xc = x[:, None]
        oc = omx[:, None]
        parts = {}
        if need & {0, 1}:
            v = wlo * xc
            g, h = factors(v, (1.0 - wlo) + wlo * oc)
            fw = _fermi(dhat * v)
            parts[0] = fw * g
            parts[1] = fw * h
        if need & {2, 3}:
            dv = whis * xc
            g, h = factors(1.0 + dv, -dv)
            fw = _fermi(dhat * (1.0 + dv))
            parts[2] = fw * g
            parts[3] = fw * h
        zero = np.zeros((x.size, n))
        bigm = np.concatenate([parts.get(b, zero) for b in range(4)], axis=1)
        return bigm[:, cols]

    pref = 8.0 * _AL * ptil / (vt * vt)
    fl = 0.05 * rel_tol
    f00 = fl * z00 / pref
    fp = fl * zp / pref
    widths = np.concatenate([wlo, wlo, whi, whi])
    floors = np.concatenate([f00, fp, f00, fp])
    vals, _ = tanh_sinh_columns(f, widths, rel_tol=rel_tol, abs_floor=floors)
    s = vals.reshape(4, n)
    return z00, zp, pref * (s[0] + s[2]), pref * (s[1] + s[3])


def polarization_reduced(ratio, gamma, v_ratio=None, rel_tol=1e-8):
    """Reduced tensor parts on the real axis, vectorized over points.

    Returns four complex arrays ``(zero00, zerop, thermal00, thermalp)``
    so callers can use the zero-temperature and thermal splits
    separately; the full components are the sums.  Raises
    RegimeBoundaryError if any point sits exactly at ratio = v_ratio.
    """
    vt = _vt(v_ratio)
    r, gam = _norm_inputs(ratio, gamma)
    if np.any(r < 0.0):
        raise DomainError("ratio must be nonnegative on the real axis")
    if np.any(r == vt):
        raise RegimeBoundaryError(
            "ratio equals v_ratio: the zero-temperature response has a "
            "pole there; evaluate a limit instead")
    n = r.size
    out = [np.zeros(n, dtype=complex) for _ in range(4)]
    far = r < vt
    for mask, engine in ((far, _far_reduced), (~far, _interval_reduced)):
        if mask.any():
            got = engine(r[mask], gam[mask], vt, rel_tol)
            for dst, src in zip(out, got):
                dst[mask] = src
    for part in out:
        if not np.all(np.isfinite(part)):
            raise SingularityError("non-finite tensor component; "
                                   "internal consistency failure")
    return tuple(out)


def polarization_reduced_matsubara(rho, gamma, v_ratio=None, rel_tol=1e-8):
    """Reduced tensor parts on the imaginary axis (real-valued arrays).

    ``rho = 0`` is the static point, evaluated through the real-axis
    far-evanescent engine at ratio 0 where the result is exactly real.
    """
    vt = _vt(v_ratio)
    rho_a, gam = _norm_inputs(rho, gamma)
    if np.any(rho_a < 0.0):
        raise DomainError("rho must be nonnegative")
    n = rho_a.size
    out = [np.zeros(n) for _ in range(4)]
    pos = rho_a > 0.0
    if pos.any():
        got = _matsubara_reduced(rho_a[pos], gam[pos], vt, rel_tol)
        for dst, src in zip(out, got):
            dst[pos] = src
    if (~pos).any():
        got = _far_reduced(np.zeros(int((~pos).sum())), gam[~pos], vt, rel_tol)
        for dst, src in zip(out, got):
            dst[~pos] = src.real
    for part in out:
        if not np.all(np.isfinite(part)):
            raise SingularityError("non-finite tensor component; "
                                   "internal consistency failure")
    return tuple(out)


def _assemble_reflection(pi00, pi, qhat):
    den_tm = qhat * pi00 + 2.0
    den_te = pi + 2.0 * qhat
    if np.any(np.abs(den_tm) < 1e-12) or np.any(np.abs(den_te) < 1e-12):
        raise SingularityError("reflection denominator vanished; the sheet "
                               "response lost passivity (internal error)")
    return qhat * pi00 / den_tm, -pi / den_te


def reflection_reduced(ratio, gamma, v_ratio=None, rel_tol=1e-8):
    """TM/TE reflection pair on the real axis, vectorized (complex)."""
    z00, zp, t00, tp = polarization_reduced(ratio, gamma, v_ratio, rel_tol)
    r, _ = _norm_inputs(ratio, gamma)
    below = np.clip(1.0 - r * r, 0.0, None)
    above = np.clip(r * r - 1.0, 0.0, None)
    qhat = np.sqrt(below) - 1j * np.sqrt(above)   # -i|q| continues past r = 1
    return _assemble_reflection(z00 + t00, zp + tp, qhat)


def reflection_reduced_matsubara(rho, gamma, v_ratio=None, rel_tol=1e-8):
    """TM/TE reflection pair on the imaginary axis, vectorized (real)."""
    z00, zp, t00, tp = polarization_reduced_matsubara(rho, gamma, v_ratio,
                                                      rel_tol)
    pi00 = z00 + t00
    pi = zp + tp
    if np.any(pi00 <= 0.0) or np.any(pi <= 0.0):
        raise SingularityError("imaginary-axis tensor lost positivity; "
                               "internal consistency failure")
    rho_a, _ = _norm_inputs(rho, gamma)
    qhat = np.sqrt(1.0 + rho_a * rho_a)
    return _assemble_reflection(pi00, pi, qhat)


def _real_axis_scalars(point, v_fermi, rel_tol):
    vf = V_FERMI_DEFAULT if v_fermi is None else float(v_fermi)
    vt = _vt(vf / C_LIGHT)
    ratio = point.omega / (C_LIGHT * point.k_perp)
    gamma = math.inf if point.temperature == 0.0 else \
        HBAR * C_LIGHT * point.k_perp / (K_BOLTZMANN * point.temperature)
    return vt, ratio, gamma


def _require_regime(point, allowed, op_name):
    if point.regime not in allowed:
        names = ", ".join(sorted(reg.value for reg in allowed))
        raise DomainError(f"{op_name} needs a point in regime(s) {names}, "
                          f"got {point.regime.value}")


def pi_zero_T_plasmonic(point, v_fermi=None, rel_tol=1e-8):
    """Zero-temperature tensor pair above the Dirac cone (purely imaginary).

    Accepts Propagating points too: the analytic forms continue across
    the light cone unchanged.  Units: pi00 in J s/m, pi in J s/m**3.
    """
    _require_regime(point, {Regime.PLASMONIC, Regime.PROPAGATING},
                    "pi_zero_T_plasmonic")
    vt, ratio, _ = _real_axis_scalars(point, v_fermi, rel_tol)
    if ratio <= vt:
        raise RegimeBoundaryError(
            "point lies at or below the Dirac cone for this v_fermi")
    cone = math.sqrt((ratio - vt) * (ratio + vt))
    k = point.k_perp
    return PolarizationPair(1j * math.pi * _AL * HBAR * k / cone,
                            -1j * math.pi * _AL * HBAR * k ** 3 * cone)


def _thermal_plasmonic(point, v_fermi, rel_tol):
    vt, ratio, gamma = _real_axis_scalars(point, v_fermi, rel_tol)
    if ratio <= vt:
        raise RegimeBoundaryError(
            "point lies at or below the Dirac cone for this v_fermi")
    if math.isinf(gamma):
        return 0j, 0j
    _, _, t00, tp = (arr[0] for arr in polarization_reduced(
        np.array([ratio]), np.array([gamma]), vt, rel_tol))
    k = point.k_perp
    return complex(HBAR * k * t00), complex(HBAR * k ** 3 * tp)


def pi00_thermal_plasmonic(point, v_fermi=None, rel_tol=1e-8):
    """Thermal correction to the density component above the Dirac cone.

    Exactly 0 at T = 0.  Imaginary part is nonpositive (dissipation).
    """
    _require_regime(point, {Regime.PLASMONIC, Regime.PROPAGATING},
                    "pi00_thermal_plasmonic")
    return _thermal_plasmonic(point, v_fermi, rel_tol)[0]


def pi_thermal_plasmonic(point, v_fermi=None, rel_tol=1e-8):
    """Thermal correction to the trace combination above the Dirac cone."""
    _require_regime(point, {Regime.PLASMONIC, Regime.PROPAGATING},
                    "pi_thermal_plasmonic")
    return _thermal_plasmonic(point, v_fermi, rel_tol)[1]


def pi_far_evanescent(point, v_fermi=None, rel_tol=1e-8):
    """Full tensor pair (zero-T plus thermal) below the Dirac cone."""
    _require_regime(point, {Regime.FAR_EVANESCENT}, "pi_far_evanescent")
    vt, ratio, gamma = _real_axis_scalars(point, v_fermi, rel_tol)
    if ratio >= vt:
        raise RegimeBoundaryError(
            "point lies at or above the Dirac cone for this v_fermi")
    z00, zp, t00, tp = (arr[0] for arr in polarization_reduced(
        np.array([ratio]), np.array([gamma]), vt, rel_tol))
    k = point.k_perp
    return PolarizationPair(complex(HBAR * k * (z00 + t00)),
                            complex(HBAR * k ** 3 * (zp + tp)))


def pi_matsubara(order, k_perp, temperature, v_fermi=None, rel_tol=1e-8):
    """Tensor pair at an imaginary-axis thermal frequency (real, positive)."""
    point = SpectralPoint.matsubara(order, k_perp, temperature)
    vf = V_FERMI_DEFAULT if v_fermi is None else float(v_fermi)
    vt = _vt(vf / C_LIGHT)
    gamma = math.inf if point.temperature == 0.0 else \
        HBAR * C_LIGHT * k_perp / (K_BOLTZMANN * point.temperature)
    xi = 2.0 * math.pi * K_BOLTZMANN * point.temperature * point.omega / HBAR
    rho = xi / (C_LIGHT * k_perp)
    z00, zp, t00, tp = (arr[0] for arr in polarization_reduced_matsubara(
        np.array([rho]), np.array([gamma]), vt, rel_tol))
    return PolarizationPair(float(HBAR * k_perp * (z00 + t00)),
                            float(HBAR * k_perp ** 3 * (zp + tp)))


def reflection(point, v_fermi=None, rel_tol=1e-8):
    """TM/TE reflection pair for any spectral point.

    Real-axis points give complex coefficients; imaginary-axis points
    give real ones.  The light cone (ratio = 1) is regular: the TM
    coefficient vanishes there and the TE coefficient is -1.
    """
    vf = V_FERMI_DEFAULT if v_fermi is None else float(v_fermi)
    vt = _vt(vf / C_LIGHT)
    if point.regime is Regime.MATSUBARA_AXIS:
        gamma = math.inf if point.temperature == 0.0 else \
            HBAR * C_LIGHT * point.k_perp / (K_BOLTZMANN * point.temperature)
        xi = 2.0 * math.pi * K_BOLTZMANN * point.temperature * point.omega / HBAR
        rho = xi / (C_LIGHT * point.k_perp)
        r_tm, r_te = reflection_reduced_matsubara(
            np.array([rho]), np.array([gamma]), vt, rel_tol)
        return ReflectionPair(float(r_tm[0]), float(r_te[0]))
    vt_point, ratio, gamma = _real_axis_scalars(point, v_fermi, rel_tol)
    r_tm, r_te = reflection_reduced(np.array([ratio]), np.array([gamma]),
                                    vt_point, rel_tol)
    return ReflectionPair(complex(r_tm[0]), complex(r_te[0]))
