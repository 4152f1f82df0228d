"""Independent reference evaluations for the graphene response integrals.

Everything here is deliberately low-tech: composite Simpson sums on
dense fixed grids, with explicit square-root substitutions wherever the
integrand has an inverse-square-root edge.  In each substituted piece
the vanishing root is cancelled symbolically, so grids may touch the
edge.  No code is shared with the package's quadrature engine; oracle
and package agreeing is a genuine two-route check.

Scalar inputs only; speed is not a goal.
"""

import math

import numpy as np

ALPHA = 7.2973525693e-3  # fine-structure constant, kept local on purpose

_N = 40001  # grid points per sub-integral (odd)


def _simpson(values, h):
    """Composite Simpson rule; len(values) must be odd."""
    n = len(values)
    assert n % 2 == 1 and n >= 3
    return h / 3.0 * (values[0] + values[-1]
                      + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-1:2].sum())


def _fermi(x):
    return np.exp(-x) / (1.0 + np.exp(-x))


def _sum_rows(piece, lo, hi, rows):
    """Simpson-integrate a stacked-row integrand over [lo, hi].

    Two dyadic grids with Richardson extrapolation: every piece is fed
    through a substitution that makes it analytic on the closed
    interval, so the h^4 term dominates and (16 S_half - S) / 15
    removes it.
    """
    if hi <= lo:
        return np.zeros(rows)
    est = []
    for m in (_N, 2 * _N - 1):
        x = np.linspace(lo, hi, m)
        vals = piece(x)
        h = x[1] - x[0]
        est.append(np.array([_simpson(vals[k], h) for k in range(rows)]))
    return (16.0 * est[1] - est[0]) / 15.0


def oracle_pi_interval(r, gamma, vtilde):
    """Reduced response pair for omega > v_F * k (both sheet-wave regimes).

    Returns (pi00, pi) where pi00 = Pi_00/(hbar k) and pi = Pi/(hbar k^3),
    as complex numbers, with gamma = hbar c k / (k_B T); gamma = inf means
    zero temperature.
    """
    if not r > vtilde:
        raise ValueError("interval oracle needs r > vtilde")
    phat = math.sqrt((r - vtilde) * (r + vtilde))
    pi00 = 1j * math.pi * ALPHA / phat
    pi = -1j * math.pi * ALPHA * phat
    if math.isinf(gamma):
        return pi00, pi

    ym = r - vtilde
    yp = r + vtilde
    cut = 200.0 / gamma

    def b1p(y):
        return np.sqrt((y + ym) * (y + yp))

    # piece 1: y in [0, min(ym, cut)] via y = ym - w^2; the root
    # sqrt(ym - y) = w is cancelled against the substitution Jacobian 2w.
    hi1 = min(ym, cut)
    w_lo = math.sqrt(ym - hi1) if hi1 < ym else 0.0

    def piece1(w):
        y = ym - w * w
        s2 = np.sqrt(yp - y)             # second factor of b1(y - r)
        f = _fermi(0.5 * gamma * y)
        g = 2.0 * w * (1.0 - b1p(y) / (2.0 * phat)) - w * w * s2 / phat
        h = 2.0 * w * (r * r - 0.5 * phat * (y + r) ** 2 / b1p(y)) \
            - phat * (y - r) ** 2 / s2
        return f * np.stack([g, h])

    s1 = _sum_rows(piece1, w_lo, math.sqrt(ym), 2)

    # piece 2: y in [ym, min(yp, cut)], no real singular edge
    def piece2(y):
        f = _fermi(0.5 * gamma * y)
        g = 1.0 - b1p(y) / (2.0 * phat)
        h = r * r - 0.5 * phat * (y + r) ** 2 / b1p(y)
        return f * np.stack([g, h])

    s2_ = _sum_rows(piece2, ym, min(yp, cut), 2)

    # piece 3: y in [yp, cut] via y = yp + w^2, left root cancelled
    def piece3(w):
        y = yp + w * w
        s2 = np.sqrt(y - ym)
        f = _fermi(0.5 * gamma * y)
        g = 2.0 * w * (1.0 - b1p(y) / (2.0 * phat)) + w * w * s2 / phat
        h = 2.0 * w * (r * r - 0.5 * phat * (y + r) ** 2 / b1p(y)) \
            + phat * (y - r) ** 2 / s2
        return f * np.stack([g, h])

    s3 = _sum_rows(piece3, 0.0, math.sqrt(max(cut - yp, 0.0)), 2)

    pref = 8.0 * ALPHA / vtilde ** 2
    re00, re_p = pref * (s1 + s2_ + s3)

    # imaginary thermal parts: the angular forms are already regular
    def im_parts(theta):
        f = _fermi(0.5 * gamma * (r + vtilde * np.sin(theta)))
        return np.stack([np.cos(theta) ** 2 * f, np.sin(theta) ** 2 * f])

    i_cos, i_sin = _sum_rows(im_parts, -0.5 * math.pi, 0.5 * math.pi, 2)
    im00 = -4.0 * ALPHA / phat * i_cos
    im_p = 4.0 * ALPHA * phat * i_sin

    return pi00 + re00 + 1j * im00, pi + re_p + 1j * im_p


def oracle_pi_far(r, gamma, vtilde):
    """Reduced response pair for 0 <= omega < v_F * k (deep evanescent side).

    The two square-root factors have real roots at v_plus < v_minus on
    the integration path; the retarded branch takes sqrt(w_lambda) to
    -i * lambda * sqrt|w_lambda| once w_lambda goes negative.
    """
    if not 0.0 <= r < vtilde:
        raise ValueError("far oracle needs 0 <= r < vtilde")
    ptil = math.sqrt((vtilde - r) * (vtilde + r))
    pi00 = complex(math.pi * ALPHA / ptil)
    pi = complex(math.pi * ALPHA * ptil)
    if math.isinf(gamma):
        return pi00, pi

    if r == 0.0:
        # Static frequency: the two roots coincide at v = 1 and the
        # generic single-root substitutions degenerate.  Use v = sin(phi)
        # on [0, 1]; past v = 1 the pi00 factor is exactly 1 and the pi
        # factor exactly 0, and everything is real.
        dhat = 0.5 * gamma * ptil
        cut = 200.0 / (gamma * ptil)
        phi_hi = math.asin(min(1.0, cut))

        def trig_piece(phi):
            v = np.sin(phi)
            f = _fermi(dhat * v)
            g = (1.0 - np.cos(phi)) * np.cos(phi)
            h = -ptil * ptil * v * v
            return f * np.stack([g, h])

        s_lo = _sum_rows(trig_piece, 0.0, phi_hi, 2)
        tail = 0.0
        if cut > 1.0:
            def tail_piece(v):
                return np.stack([_fermi(dhat * v)])

            tail = _sum_rows(tail_piece, 1.0, cut, 1)[0]
        pref = 8.0 * ALPHA * ptil / vtilde ** 2
        return pi00 + pref * (s_lo[0] + tail), pi + pref * s_lo[1]

    vp = (vtilde - r) / ptil
    vm = (vtilde + r) / ptil
    dhat = 0.5 * gamma * ptil
    cut = 200.0 / (gamma * ptil)

    def fermi_v(v):
        return _fermi(dhat * v)

    # piece a: [0, min(vp, cut)] via v = vp - w^2; sqrt(w_plus) = w * sa
    hi_a = min(vp, cut)
    w_lo = math.sqrt(vp - hi_a) if hi_a < vp else 0.0

    def piece_a(w):
        v = vp - w * w
        sa = np.sqrt(v + vm)
        sm = np.sqrt((vm - v) * (v + vp))
        f = fermi_v(v)
        g = 2.0 * w * (1.0 - 0.5 * sm) - w * w * sa
        h = 2.0 * w * (r * r - 0.5 * (ptil * v - r) ** 2 / sm) \
            - (ptil * v + r) ** 2 / sa
        return f * np.stack([g, h])

    sa_ = _sum_rows(piece_a, w_lo, math.sqrt(vp), 2)

    # piece b: [vp, min(vm, cut)]; |w_plus|^(1/2) = w * sa near the left
    # root.  Rows: re00, re_p, im00, im_p.
    hi_b = min(vm, cut)
    sb = np.zeros(4)
    if hi_b > vp:
        mid = 0.5 * (vp + hi_b)

        def piece_b_left(w):
            v = vp + w * w
            sa = np.sqrt(v + vm)
            sm = np.sqrt((vm - v) * (v + vp))
            f = fermi_v(v)
            g_re = 2.0 * w * (1.0 - 0.5 * sm)
            h_re = 2.0 * w * (r * r - 0.5 * (ptil * v - r) ** 2 / sm)
            g_im = w * w * sa
            h_im = -(ptil * v + r) ** 2 / sa
            return f * np.stack([g_re, h_re, g_im, h_im])

        sb = sb + _sum_rows(piece_b_left, 0.0, math.sqrt(mid - vp), 4)

        if hi_b == vm:
            def piece_b_right(w):
                v = vm - w * w
                sbf = np.sqrt(v + vp)                 # sqrt(w_minus) = w*sbf
                ap = np.sqrt((v - vp) * (v + vm))     # |w_plus|^(1/2), regular
                f = fermi_v(v)
                g_re = 2.0 * w - w * w * sbf
                h_re = 2.0 * w * r * r - (ptil * v - r) ** 2 / sbf
                g_im = w * ap
                h_im = -w * (ptil * v + r) ** 2 / ap
                return f * np.stack([g_re, h_re, g_im, h_im])

            sb = sb + _sum_rows(piece_b_right, 0.0, math.sqrt(vm - mid), 4)
        else:
            def piece_b_plain(v):
                ap = np.sqrt((v - vp) * (v + vm))
                sm = np.sqrt((vm - v) * (v + vp))
                f = fermi_v(v)
                g_re = 1.0 - 0.5 * sm
                h_re = r * r - 0.5 * (ptil * v - r) ** 2 / sm
                g_im = 0.5 * ap
                h_im = -0.5 * (ptil * v + r) ** 2 / ap
                return f * np.stack([g_re, h_re, g_im, h_im])

            sb = sb + _sum_rows(piece_b_plain, mid, hi_b, 4)

    # piece c: [vm, cut] via v = vm + w^2; sqrt|w_minus| = w * sbf
    sc = np.zeros(4)
    if cut > vm:
        def piece_c(w):
            v = vm + w * w
            sbf = np.sqrt(v + vp)
            ap = np.sqrt((v - vp) * (v + vm))
            f = fermi_v(v)
            g_re = 2.0 * w * np.ones_like(v)
            h_re = 2.0 * w * r * r * np.ones_like(v)
            g_im = w * ap - w * w * sbf
            h_im = -w * (ptil * v + r) ** 2 / ap + (ptil * v - r) ** 2 / sbf
            return f * np.stack([g_re, h_re, g_im, h_im])

        sc = _sum_rows(piece_c, 0.0, math.sqrt(cut - vm), 4)

    pref = 8.0 * ALPHA * ptil / vtilde ** 2
    re00, re_p, im00, im_p = pref * (
        np.array([sa_[0], sa_[1], 0.0, 0.0]) + sb + sc)
    return pi00 + re00 + 1j * im00, pi + re_p + 1j * im_p


def oracle_pi_matsubara(rho, gamma, vtilde):
    """Reduced response pair on the imaginary frequency axis, rho > 0.

    Evaluates both square-root branches explicitly and sums them; the
    pair is complex conjugate so the sum is real.  Returns real floats.

    The integrand is analytic for rho > 0 but varies on the scale
    rho/ptil near v = 1, so the grid is clustered there with v = 1 - w^2
    below and v = 1 + u^2 above.  Trustworthy down to rho ~ 1e-5; below
    that the v = 1 structure outruns even the substituted grids.
    """
    if rho <= 0.0:
        raise ValueError("use the far oracle at r = 0 for the static point")
    ptil = math.sqrt(vtilde * vtilde + rho * rho)
    pi00 = math.pi * ALPHA / ptil
    pi = math.pi * ALPHA * ptil
    if math.isinf(gamma):
        return pi00, pi

    dhat = 0.5 * gamma * ptil
    cut = 200.0 / (gamma * ptil)

    def both_branches(v):
        f = _fermi(dhat * v)
        t00 = np.zeros_like(v)
        tp = np.zeros_like(v)
        for lam in (+1.0, -1.0):
            w = 1.0 - v * v - 2.0j * lam * rho * v / ptil
            s = np.sqrt(w)
            t00 = t00 + (0.5 * (1.0 - s)).real
            tp = tp + (0.5 * (-rho * rho
                              - (ptil * v + 1j * lam * rho) ** 2 / s)).real
        return f * np.stack([t00, tp])

    hi = min(1.0, cut)

    def piece_lo(w):
        return 2.0 * w * both_branches(1.0 - w * w)

    total = _sum_rows(piece_lo, math.sqrt(1.0 - hi), 1.0, 2)
    if cut > 1.0:
        def piece_hi(u):
            return 2.0 * u * both_branches(1.0 + u * u)

        total = total + _sum_rows(piece_hi, 0.0, math.sqrt(cut - 1.0), 2)

    pref = 8.0 * ALPHA * ptil / vtilde ** 2
    return pi00 + pref * total[0], pi + pref * total[1]


def oracle_reflection(omega, k_perp, temperature, v_fermi, c_light=299792458.0,
                      hbar=1.0545718176461565e-34, k_boltzmann=1.380649e-23):
    """Reflection coefficient pair (r_tm, r_te) from the oracle tensors."""
    vtilde = v_fermi / c_light
    r = omega / (c_light * k_perp)
    gamma = math.inf if temperature == 0.0 else \
        hbar * c_light * k_perp / (k_boltzmann * temperature)
    if r > vtilde:
        pi00, pi = oracle_pi_interval(r, gamma, vtilde)
    else:
        pi00, pi = oracle_pi_far(r, gamma, vtilde)
    if r <= 1.0:
        qhat = complex(math.sqrt(1.0 - r * r))
    else:
        qhat = -1j * math.sqrt(r * r - 1.0)
    r_tm = qhat * pi00 / (qhat * pi00 + 2.0)
    r_te = -pi / (pi + 2.0 * qhat)
    return r_tm, r_te


def oracle_reflection_matsubara(order, k_perp, temperature, v_fermi,
                                c_light=299792458.0,
                                hbar=1.0545718176461565e-34,
                                k_boltzmann=1.380649e-23):
    """Imaginary-axis reflection pair from the oracle tensors."""
    vtilde = v_fermi / c_light
    gamma = math.inf if temperature == 0.0 else \
        hbar * c_light * k_perp / (k_boltzmann * temperature)
    xi = 2.0 * math.pi * k_boltzmann * temperature * order / hbar
    rho = xi / (c_light * k_perp)
    if order == 0:
        pi00, pi = oracle_pi_far(0.0, gamma, vtilde)
        pi00, pi = pi00.real, pi.real
    else:
        pi00, pi = oracle_pi_matsubara(rho, gamma, vtilde)
    qhat = math.sqrt(1.0 + rho * rho)
    r_tm = qhat * pi00 / (qhat * pi00 + 2.0)
    r_te = -pi / (pi + 2.0 * qhat)
    return r_tm, r_te
