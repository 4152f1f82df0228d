"""Deterministic quadrature engine used by every numeric path in the package.

Three building blocks:

* an adaptive Gauss-Kronrod 7/15 integrator over finite intervals,
  vector-valued, with an explicit evaluation budget,
* a vectorized tanh-sinh integrator that handles inverse-square-root
  endpoint singularities and evaluates many "columns" (independent
  parameter sets sharing one abscissa grid) in a single sweep,
* helpers built on those two: semi-infinite integrals of exponentially
  decaying integrands, integrals with singular endpoints, nested double
  integrals, and sums of exponentially decaying series.

Everything here is deterministic: identical inputs produce bitwise
identical results.  No randomness, no thread-dependent reduction order.
"""

import math

import numpy as np

from .errors import BudgetExceededError, SingularityError

__all__ = [
    "integrate_adaptive",
    "integrate_decaying_tail",
    "integrate_endpoint_singular",
    "integrate_double",
    "tanh_sinh_columns",
    "sum_decaying_series",
]

_EPS = np.finfo(float).eps

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1], ascending node order.
# The embedded 7-point Gauss rule sits on every second interior node.
_XGK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK_HALF[:7], _XGK_HALF[::-1]])          # 15 ascending
_WGK = np.concatenate([_WGK_HALF[:7], _WGK_HALF[::-1]])             # Kronrod weights
_WG = np.zeros(15)
_WG[1:14:2] = np.concatenate([_WG_HALF[:3], _WG_HALF[::-1]])        # Gauss weights


def _as_2d(values, n_points):
    """Coerce integrand output to shape (n_points, m); report m and scalar-ness."""
    arr = np.asarray(values)
    if arr.ndim == 1:
        return arr[:, None], True
    if arr.ndim == 2 and arr.shape[0] == n_points:
        return arr, False
    raise ValueError(
        f"integrand returned shape {arr.shape}, expected ({n_points},) or ({n_points}, m)")


def _gk15_panels(f, lo, hi):
    """Apply the 7/15 pair to every panel at once.

    Returns (results, errors, scalar) where results[p, c] estimates the
    integral of component c over panel p and errors uses the QUADPACK
    scaling of the difference against the embedded Gauss rule.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    centers = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = (centers[:, None] + half[:, None] * _NODES[None, :]).ravel()
    fv, scalar = _as_2d(f(x), x.size)
    fv = fv.reshape(len(lo), 15, -1)

    resk = np.einsum("k,pkc->pc", _WGK, fv)
    resg = np.einsum("k,pkc->pc", _WG, fv)
    resabs = np.einsum("k,pkc->pc", _WGK, np.abs(fv))
    resasc = np.einsum("k,pkc->pc", _WGK, np.abs(fv - 0.5 * resk[:, None, :]))

    results = resk * half[:, None]
    raw = np.abs((resk - resg) * half[:, None])
    resasc_s = resasc * half[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = np.minimum(1.0, (200.0 * raw / resasc_s) ** 1.5)
    errors = np.where((resasc_s != 0.0) & (raw != 0.0), resasc_s * shrink, raw)
    floor = 50.0 * _EPS * resabs * half[:, None]
    errors = np.maximum(errors, floor)
    # Components pinned at the roundoff floor cannot improve by splitting.
    at_floor = errors <= floor
    return results, errors, at_floor, scalar


def integrate_adaptive(f, lower, upper, rel_tol=1e-9, abs_tol=0.0,
                       budget=1_000_000, control=None, initial_edges=None):
    """Adaptive Gauss-Kronrod integration of a vector-valued integrand.

    Parameters
    ----------
    f : callable
        Maps an abscissa array of shape (n,) to values of shape (n,) or
        (n, m).  All components are integrated together; the same panels
        serve every component.
    lower, upper : float
        Finite integration limits, lower < upper.
    rel_tol, abs_tol : float
        Convergence requires, for every controlled component c,
        total_error_c <= max(abs_tol, rel_tol * |integral_c|).
    budget : int
        Maximum number of integrand evaluations (abscissa points).  On
        exhaustion BudgetExceededError is raised with the best estimate
        attached.
    control : array of bool, optional
        Which components drive refinement and convergence.  Defaults to
        all of them.  Uncontrolled components are still integrated and
        reported but never force a split.
    initial_edges : array, optional
        Starting panel edges (sorted, spanning [lower, upper]).

    Returns
    -------
    (value, error)
        Arrays of shape (m,), or floats when f returns 1-D output.
    """
    if not (math.isfinite(lower) and math.isfinite(upper)):
        raise ValueError("integrate_adaptive needs finite limits")
    if upper <= lower:
        raise ValueError(f"need lower < upper, got [{lower}, {upper}]")
    if initial_edges is None:
        edges = np.array([lower, upper])
    else:
        edges = np.asarray(initial_edges, dtype=float)
    lo = edges[:-1].copy()
    hi = edges[1:].copy()

    if 15 * len(lo) > budget:
        raise BudgetExceededError(
            f"evaluation budget {budget} smaller than one pass over "
            f"{len(lo)} initial panels")
    results, errors, at_floor, scalar = _gk15_panels(f, lo, hi)
    spent = 15 * len(lo)

    while True:
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        results, errors, at_floor = results[order], errors[order], at_floor[order]

        value = results.sum(axis=0)
        err = errors.sum(axis=0)
        if control is None:
            mask = np.ones(value.shape, dtype=bool)
        else:
            mask = np.asarray(control, dtype=bool)
            if scalar:
                mask = np.atleast_1d(mask)
        tol = np.maximum(abs_tol, rel_tol * np.abs(value))
        if np.all(err[mask] <= tol[mask]):
            break

        # Split every panel carrying a meaningful share of the scaled
        # error; already-evaluated panels are reused, only the children
        # of split panels cost new evaluations.
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = np.where(tol > 0.0, errors / tol, np.inf)
            scaled = np.where(errors == 0.0, 0.0, scaled)
            scaled = np.where(at_floor, 0.0, scaled)
        panel_score = scaled[:, mask].max(axis=1)
        width_ok = (hi - lo) > 50.0 * _EPS * np.maximum(
            1.0, np.maximum(np.abs(lo), np.abs(hi)))
        improvable = width_ok & (panel_score > 0.0)
        if improvable.any():
            split = improvable & (panel_score >= 0.25 * panel_score[improvable].max())
        else:
            split = np.zeros(len(lo), dtype=bool)
        if not split.any():
            break  # nothing left to refine; report the achieved error

        need = 30 * int(split.sum())
        if spent + need > budget:
            out_v = float(value[0]) if scalar else value
            out_e = float(err[0]) if scalar else err
            raise BudgetExceededError(
                f"evaluation budget {budget} exhausted at error {err.max():.3e}",
                estimate=out_v, error=out_e)
        mid = 0.5 * (lo[split] + hi[split])
        child_lo = np.concatenate([lo[split], mid])
        child_hi = np.concatenate([mid, hi[split]])
        child_res, child_err, child_floor, _ = _gk15_panels(f, child_lo, child_hi)
        spent += need
        lo = np.concatenate([lo[~split], child_lo])
        hi = np.concatenate([hi[~split], child_hi])
        results = np.concatenate([results[~split], child_res])
        errors = np.concatenate([errors[~split], child_err])
        at_floor = np.concatenate([at_floor[~split], child_floor])

    if scalar:
        return float(value[0]), float(err[0])
    return value, err


def integrate_decaying_tail(f, lower, decay_scale, rel_tol=1e-9, abs_tol=0.0,
                            budget=1_000_000, control=None):
    """Integrate f from ``lower`` to infinity given an exponential decay scale.

    The domain is truncated at lower + 60 * decay_scale; the neglected
    tail is bounded by 2 * |f| at the cut times the decay scale (exact
    for a pure exponential, a 2x cushion otherwise) and folded into the
    reported error.  ``decay_scale`` must genuinely bound the asymptotic
    decay or the tail bound is meaningless.
    """
    if decay_scale <= 0.0 or not math.isfinite(decay_scale):
        raise ValueError(f"decay_scale must be positive and finite, got {decay_scale}")
    cut = lower + 60.0 * decay_scale
    edges = lower + decay_scale * np.array([0.0, 0.5, 1.0, 2.0, 4.0, 8.0,
                                            16.0, 30.0, 45.0, 60.0])
    value, err = integrate_adaptive(f, lower, cut, rel_tol=rel_tol,
                                    abs_tol=abs_tol, budget=budget,
                                    control=control, initial_edges=edges)
    tail_vals, scalar = _as_2d(f(np.array([cut])), 1)
    tail = 2.0 * np.abs(tail_vals[0]) * decay_scale
    if scalar:
        return value, err + float(tail[0])
    return value, err + tail


def integrate_endpoint_singular(f, lower, upper, rel_tol=1e-10, abs_tol=0.0,
                                max_level=12):
    """Integrate over [lower, upper] allowing integrable endpoint singularities.

    Uses the tanh-sinh transformation, which clusters abscissae
    double-exponentially toward both endpoints, so inverse-square-root
    (and milder) singularities converge to near machine precision.

    The integrand is called as ``f(x, from_lower, from_upper)`` where
    ``from_lower = x - lower`` and ``from_upper = upper - x`` are held to
    full relative precision even when ``x`` itself has rounded onto an
    endpoint.  Singular factors must be built from the distance
    arguments, not from ``x``.
    """
    width = upper - lower
    if not (width > 0.0 and math.isfinite(width)):
        raise ValueError(f"need finite lower < upper, got [{lower}, {upper}]")

    def g(x01, omx01, cols):
        dl = width * x01
        du = width * omx01
        x = np.where(x01 <= 0.5, lower + dl, upper - du)
        return np.asarray(f(x, dl, du))[:, None]

    values, errors = tanh_sinh_columns(g, np.array([width]), rel_tol=rel_tol,
                                       abs_floor=np.array([abs_tol]),
                                       max_level=max_level)
    return float(values[0]), float(errors[0])


# tanh-sinh machinery.  Transform for the unit interval:
#   x(t) = 1 / (1 + exp(-2u)),  u = (pi/2) sinh t,
# so the distance to the nearer endpoint is delta = 1 / (1 + exp(2|u|)),
# computed directly without cancellation, and the weight is
#   dx/dt = pi cosh(t) delta (1 - delta).
# |u| is capped at 90: endpoint distances reach ~7e-79 (still normal
# doubles), which pushes the truncated tail of an x**(-3/4) singularity
# below 1e-17.  Weights near the cap are ~1e-76, far above underflow.

_U_CAP = 90.0
_T_MAX = math.asinh(2.0 * _U_CAP / math.pi)


def _ts_nodes(t):
    """Abscissae x in (0,1), complements 1-x, and weights for node array t."""
    u = 0.5 * math.pi * np.sinh(t)
    delta = 1.0 / (1.0 + np.exp(2.0 * np.abs(u)))
    x = np.where(u >= 0.0, 1.0 - delta, delta)
    omx = np.where(u >= 0.0, delta, 1.0 - delta)
    w = math.pi * np.cosh(t) * delta * (1.0 - delta)
    return x, omx, w


def tanh_sinh_columns(f, widths, rel_tol=1e-10, abs_floor=None, max_level=12):
    """Tanh-sinh integration of many same-shaped integrals in one sweep.

    Each "column" c is an independent integral over a canonical [0, 1]
    variable, scaled by ``widths[c]``; columns share the abscissa grid
    so one call to ``f`` serves all of them.  Zero-width columns are
    never evaluated and contribute exactly 0.0.

    Parameters
    ----------
    f : callable
        ``f(x, one_minus_x, cols)`` with ``x`` shaped (n,) and ``cols``
        an index array selecting the active columns; must return
        (n, len(cols)).  Both ``x`` and ``one_minus_x`` carry full
        relative precision near their respective endpoints.
    widths : array
        Scale factor per column (the physical interval length).
    rel_tol, abs_floor : convergence is reached per column when the
        last refinement changed the estimate by no more than
        max(abs_floor[c], rel_tol * |value[c]|).
    max_level : int
        Grid-halving cap.  Columns still unconverged there raise
        SingularityError when their estimates are growing, otherwise
        BudgetExceededError with the partial result attached.

    Returns
    -------
    (values, errors)
        Arrays over all columns; errors hold the last refinement change.
    """
    widths = np.asarray(widths, dtype=float)
    n_cols = len(widths)
    if abs_floor is None:
        abs_floor = np.zeros(n_cols)
    else:
        abs_floor = np.broadcast_to(np.asarray(abs_floor, float), (n_cols,))

    values = np.zeros(n_cols)
    errors = np.zeros(n_cols)
    active = widths > 0.0
    if not active.any():
        return values, errors

    sums = np.zeros(n_cols)          # running trapezoid sums, h factored out
    history = np.zeros((n_cols, 3))  # last few |column| magnitudes, divergence check
    cols = np.nonzero(active)[0]

    for level in range(max_level + 1):
        h = 2.0 ** (-level)
        if level == 0:
            t = h * np.arange(-math.floor(_T_MAX / h), math.floor(_T_MAX / h) + 1)
        else:
            t = h * (2.0 * np.arange(math.ceil((-_T_MAX / h - 1) / 2),
                                     math.floor((_T_MAX / h - 1) / 2) + 1) + 1.0)
        x, omx, w = _ts_nodes(t)
        fv = np.asarray(f(x, omx, cols))
        if fv.shape != (len(t), len(cols)):
            raise ValueError(
                f"column integrand returned {fv.shape}, expected {(len(t), len(cols))}")
        # All previous nodes remain nodes of the halved grid, so the
        # running weighted sum just accumulates; the h factor in front
        # performs the trapezoid halving.
        contrib = w @ fv
        if level == 0:
            sums[cols] = contrib
        else:
            sums[cols] = sums[cols] + contrib
        new = h * sums[cols] * widths[cols]
        change = np.abs(new - values[cols])
        values[cols] = new
        errors[cols] = change
        history[cols] = np.roll(history[cols], 1, axis=1)
        history[cols, 0] = np.abs(new)

        if level >= 2:
            tol = np.maximum(abs_floor[cols], rel_tol * np.abs(new))
            done = change <= tol
            cols = cols[~done]
            if len(cols) == 0:
                return values, errors

    growing = (history[cols, 0] > 4.0 * history[cols, 1]) & \
              (history[cols, 1] > 4.0 * history[cols, 2]) & \
              (history[cols, 2] > 0.0)
    if growing.any():
        raise SingularityError(
            f"tanh-sinh estimates diverging for columns {cols[growing].tolist()}; "
            "integrand looks non-integrable")
    raise BudgetExceededError(
        f"tanh-sinh failed to converge for columns {cols.tolist()} "
        f"within {max_level} refinements", estimate=values, error=errors)


def integrate_double(f, x_range, y_range, rel_tol=1e-8, abs_tol=0.0,
                     budget=2_000_000, x_decay_scale=None, y_decay_scale=None):
    """Nested integral of f(x, y) over x_range x y_range.

    ``f(x, y_array)`` must be vectorized in its second argument.
    ``y_range`` is a (lo, hi) pair or a callable of x returning one; an
    infinite upper limit on either axis requires the matching
    ``*_decay_scale``.  The reported error combines the outer quadrature
    error with the integral of the inner errors in quadrature, so it
    remains a bound on the whole nested result.

    The shared ``budget`` counts every inner-integrand evaluation.
    """
    spent = [0]

    def inner(x):
        yr = y_range(x) if callable(y_range) else y_range
        remaining = budget - spent[0]
        if remaining <= 0:
            raise BudgetExceededError(f"evaluation budget {budget} exhausted")

        def fy(y):
            spent[0] += len(y)
            return f(x, y)

        if math.isinf(yr[1]):
            if y_decay_scale is None:
                raise ValueError("infinite inner range needs y_decay_scale")
            return integrate_decaying_tail(fy, yr[0], y_decay_scale,
                                           rel_tol=0.1 * rel_tol,
                                           abs_tol=0.1 * abs_tol,
                                           budget=remaining)
        return integrate_adaptive(fy, yr[0], yr[1], rel_tol=0.1 * rel_tol,
                                  abs_tol=0.1 * abs_tol, budget=remaining)

    def outer(xs):
        out = np.empty((len(xs), 2))
        for i, x in enumerate(xs):
            out[i] = inner(float(x))
        return out

    control = np.array([True, False])
    if math.isinf(x_range[1]):
        if x_decay_scale is None:
            raise ValueError("infinite outer range needs x_decay_scale")
        pair, outer_err = integrate_decaying_tail(
            outer, x_range[0], x_decay_scale, rel_tol=rel_tol,
            abs_tol=abs_tol, budget=budget, control=control)
    else:
        pair, outer_err = integrate_adaptive(
            outer, x_range[0], x_range[1], rel_tol=rel_tol,
            abs_tol=abs_tol, budget=budget, control=control)
    value, inner_err_integral = pair
    total_err = math.hypot(outer_err[0], inner_err_integral)
    return float(value), total_err


def sum_decaying_series(term, rel_tol=1e-10, min_terms=3, max_terms=100_000):
    """Sum term(1) + term(2) + ... for eventually geometrically decaying terms.

    Stops once the last three terms are each below rel_tol times the
    running total AND the geometric tail bound |t_n| * r / (1 - r), with
    r the largest recent term ratio, is below that threshold too.  The
    final summation is compensated, in index order, so results are
    deterministic.  Raises BudgetExceededError after max_terms.
    """
    terms = []
    total = 0.0
    small_streak = 0
    prev = None
    for n in range(1, max_terms + 1):
        t = float(term(n))
        terms.append(t)
        total += t
        scale = max(abs(total), 1e-300)
        if abs(t) <= rel_tol * scale:
            small_streak += 1
        else:
            small_streak = 0
        if small_streak >= min_terms and prev is not None and n >= min_terms + 1:
            ratios = [abs(terms[i]) / abs(terms[i - 1])
                      for i in range(len(terms) - min_terms, len(terms))
                      if abs(terms[i - 1]) > 0.0]
            r = max(ratios) if ratios else 0.0
            if r < 1.0:
                tail = abs(t) * r / (1.0 - r) if r > 0.0 else 0.0
                if tail <= rel_tol * scale:
                    return math.fsum(terms), tail + abs(t)
        prev = t
    raise BudgetExceededError(
        f"series failed to converge within {max_terms} terms",
        estimate=math.fsum(terms))
