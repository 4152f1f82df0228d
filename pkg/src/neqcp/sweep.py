"""Separation sweeps, zero-crossing search, CSV emission, result cache.

The table format is deliberately dumb: fixed columns, 9 significant
digits, '#'-prefixed metadata lines, no timestamps.  Identical
configurations therefore produce byte-identical files, which is what
the cache relies on: it stores the rendered CSV and replays it
verbatim on a hash hit.
"""

import hashlib
import io
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import __version__
from .constants import (C_LIGHT, FINE_STRUCTURE, HBAR, K_BOLTZMANN,
                        V_FERMI_DEFAULT)
from .equilibrium import (FORCE_REL_TOL, TENSOR_REL_TOL, NanoparticleSpec,
                          equilibrium_force)
from .errors import BracketError, ConfigError, NeqcpError
from .nonequilibrium import cross_check_representation, noneq_force

__all__ = [
    "RunConfig",
    "SweepRow",
    "SweepTable",
    "ZeroCrossing",
    "run_sweep",
    "find_zero_crossing",
    "render_csv",
    "emit_csv",
    "parse_csv",
    "config_hash",
    "cache_lookup",
    "cache_store",
]

CSV_COLUMNS = ("a_m", "F_neq_N", "F_eq_N", "ratio",
               "f_tilde_N", "delta_N", "err_N")

_SPACINGS = ("linear", "logarithmic")


@dataclass(frozen=True)
class RunConfig:
    """Everything a sweep run depends on, in SI units.

    ``t_sheet_values`` holds one sheet temperature per curve; a single
    temperature is the common case.  The two tolerances are relative:
    ``force_rel_tol`` for force-level integrals and series,
    ``tensor_rel_tol`` for the sheet response inside them.
    """

    spec: NanoparticleSpec
    t_environment: float                  # K
    t_sheet_values: tuple                 # K, one per curve
    a_min: float = 0.2e-6                 # m
    a_max: float = 2.0e-6                 # m
    points: int = 60
    spacing: str = "logarithmic"
    force_rel_tol: float = FORCE_REL_TOL
    tensor_rel_tol: float = TENSOR_REL_TOL
    v_fermi: float = None                 # m/s, None = default c/300
    verify: bool = False
    emit_ratio: bool = True

    def __post_init__(self):
        if not self.a_min < self.a_max:
            raise ConfigError(
                f"need a_min < a_max, got {self.a_min} >= {self.a_max}")
        if self.a_min <= 0.0:
            raise ConfigError(f"a_min must be positive, got {self.a_min}")
        if self.points < 2:
            raise ConfigError(f"grid needs at least 2 points, got "
                              f"{self.points}")
        if self.spacing not in _SPACINGS:
            raise ConfigError(f"spacing must be one of {_SPACINGS}, got "
                              f"{self.spacing!r}")
        for name in ("force_rel_tol", "tensor_rel_tol"):
            tol = getattr(self, name)
            if not 0.0 < tol <= 1e-2:
                raise ConfigError(f"{name} must lie in (0, 1e-2], got {tol}")
        if not self.t_sheet_values:
            raise ConfigError("at least one sheet temperature is required")
        object.__setattr__(self, "t_sheet_values",
                           tuple(float(t) for t in self.t_sheet_values))

    def grid(self):
        """Separation grid in m, ascending."""
        if self.spacing == "linear":
            step = (self.a_max - self.a_min) / (self.points - 1)
            return [self.a_min + i * step for i in range(self.points)]
        ratio = (self.a_max / self.a_min) ** (1.0 / (self.points - 1))
        return [self.a_min * ratio ** i for i in range(self.points)]


@dataclass(frozen=True)
class SweepRow:
    """One (separation, sheet temperature) result."""

    a_m: float
    t_sheet: float
    f_neq: float     # N
    f_eq: float      # N, equilibrium at the environment temperature
    ratio: float     # f_neq / f_eq
    f_tilde: float   # N, Matsubara term of the two-term split
    delta: float     # N, evanescent addition
    err: float       # N, combined absolute error bound


@dataclass(frozen=True)
class SweepTable:
    """Rows plus the metadata that identifies how they were produced."""

    rows: tuple
    meta: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ZeroCrossing:
    """Located sign change of the force along separation.

    ``separation`` is the bracket midpoint at termination;
    ``bracket`` the final enclosing interval and ``force_band`` the
    force values (with signs) still standing at its ends.
    """

    separation: float     # m
    bracket: tuple        # (lo, hi), m
    force_band: tuple     # (F(lo), F(hi)), N
    evaluations: int


def config_hash(config):
    """sha256 over every physics-relevant input, constants included.

    Changing any tolerance, the material, the constant table, or the
    code version changes the hash, so cached results can never leak
    across a physics-affecting difference.
    """
    parts = [
        f"version={__version__}",
        f"c={C_LIGHT!r}", f"hbar={HBAR!r}", f"kB={K_BOLTZMANN!r}",
        f"alpha={FINE_STRUCTURE!r}",
        f"v_fermi={(config.v_fermi or V_FERMI_DEFAULT)!r}",
        f"radius={config.spec.radius!r}",
        f"material={config.spec.material}",
        f"epsilon={config.spec.epsilon_static!r}",
        f"t_environment={config.t_environment!r}",
        "t_sheet=" + ",".join(repr(t) for t in config.t_sheet_values),
        f"a_min={config.a_min!r}", f"a_max={config.a_max!r}",
        f"points={config.points}", f"spacing={config.spacing}",
        f"force_rel_tol={config.force_rel_tol!r}",
        f"tensor_rel_tol={config.tensor_rel_tol!r}",
    ]
    return hashlib.sha256("\n".join(parts).encode()).hexdigest()


def _one_point(config, gap, t_sheet):
    """Compute a single sweep row; physics errors name the failing row."""
    try:
        neq = noneq_force(gap, config.t_environment, t_sheet, config.spec,
                          rel_tol=config.force_rel_tol,
                          v_fermi=config.v_fermi)
        eq = equilibrium_force(gap, config.t_environment, config.spec,
                               rel_tol=config.force_rel_tol,
                               v_fermi=config.v_fermi)
        if config.verify:
            report = cross_check_representation(
                gap, config.t_environment, t_sheet, config.spec,
                v_fermi=config.v_fermi)
            if not report.ok:
                raise NeqcpError(
                    "representation cross-check failed: force mismatch "
                    f"{report.force_mismatch:.3e}, half-difference mismatch "
                    f"{report.half_difference_mismatch:.3e} "
                    f"(tolerance {report.tolerance:.1e})")
    except NeqcpError as exc:
        exc.args = (f"[row a = {gap:.9e} m, T_g = {t_sheet:g} K] "
                    + str(exc),)
        raise
    parts = neq.breakdown
    return SweepRow(
        a_m=gap, t_sheet=t_sheet,
        f_neq=neq.force, f_eq=eq.force, ratio=neq.force / eq.force,
        f_tilde=parts.comb_term, delta=parts.evanescent_shift,
        err=neq.error + eq.error)


def _meta_for(config):
    vf = config.v_fermi if config.v_fermi is not None else V_FERMI_DEFAULT
    return {
        "tool": f"neqcp {__version__}",
        "config_hash": config_hash(config),
        "c_m_per_s": repr(C_LIGHT),
        "hbar_J_s": repr(HBAR),
        "k_B_J_per_K": repr(K_BOLTZMANN),
        "alpha_fine_structure": repr(FINE_STRUCTURE),
        "v_fermi_m_per_s": repr(vf),
        "force_rel_tol": repr(config.force_rel_tol),
        "tensor_rel_tol": repr(config.tensor_rel_tol),
        "T_E_K": repr(config.t_environment),
        "radius_m": repr(config.spec.radius),
        "material": config.spec.material
                    if config.spec.epsilon_static is None
                    else f"{config.spec.material}:"
                         f"{config.spec.epsilon_static!r}",
        "a_min_m": repr(config.a_min),
        "a_max_m": repr(config.a_max),
        "points": str(config.points),
        "spacing": config.spacing,
    }


def run_sweep(config, jobs=1):
    """Evaluate the force over the grid for every sheet temperature.

    Rows come back grouped by sheet temperature, ascending in
    separation within each group, regardless of ``jobs``.
    """
    tasks = [(t_sheet, gap)
             for t_sheet in config.t_sheet_values
             for gap in config.grid()]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_one_point,
                                 [config] * len(tasks),
                                 [gap for _, gap in tasks],
                                 [t for t, _ in tasks]))
    else:
        rows = [_one_point(config, gap, t_sheet) for t_sheet, gap in tasks]
    return SweepTable(rows=tuple(rows), meta=_meta_for(config))


def find_zero_crossing(config, bracket, force_fn=None):
    """Bisect for the separation where the force changes sign.

    ``force_fn(a) -> force`` or ``(force, error)`` substitutes the
    physics when given (used for self-tests).  Bisection is robust
    against quadrature noise: it stops once the bracket is narrower
    than max(1e-3 * a, the separation width the force error bounds can
    no longer resolve), and reports the residual band instead of
    pretending to more precision.
    """
    if len(config.t_sheet_values) != 1:
        raise ConfigError("zero-crossing search needs exactly one sheet "
                          f"temperature, got {config.t_sheet_values}")
    t_sheet = config.t_sheet_values[0]

    def evaluate(gap):
        if force_fn is not None:
            out = force_fn(gap)
            return out if isinstance(out, tuple) else (float(out), 0.0)
        result = noneq_force(gap, config.t_environment, t_sheet, config.spec,
                             rel_tol=config.force_rel_tol,
                             v_fermi=config.v_fermi)
        return result.force, result.error

    lo, hi = bracket
    if not 0.0 < lo < hi:
        raise ConfigError(f"bracket must satisfy 0 < lo < hi, got {bracket}")
    f_lo, e_lo = evaluate(lo)
    f_hi, e_hi = evaluate(hi)
    used = 2
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise BracketError(
            "no sign change inside the bracket: "
            f"F({lo:.6e} m) = {f_lo:.6e} N, F({hi:.6e} m) = {f_hi:.6e} N")

    while True:
        mid = 0.5 * (lo + hi)
        slope = (f_hi - f_lo) / (hi - lo)
        band = (e_lo + e_hi) / abs(slope) if slope != 0.0 else 0.0
        if hi - lo < max(1e-3 * mid, band):
            return ZeroCrossing(separation=mid, bracket=(lo, hi),
                                force_band=(f_lo, f_hi), evaluations=used)
        f_mid, e_mid = evaluate(mid)
        used += 1
        if f_mid == 0.0:
            return ZeroCrossing(separation=mid, bracket=(lo, hi),
                                force_band=(f_lo, f_hi), evaluations=used)
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo, e_lo = mid, f_mid, e_mid
        else:
            hi, f_hi, e_hi = mid, f_mid, e_mid


def _format(x):
    # 9 significant digits, decimal scientific notation
    return f"{x:.8e}"


def render_csv(table):
    """Render a sweep table to CSV text, deterministically."""
    out = io.StringIO()
    for key, value in table.meta.items():
        out.write(f"# {key} = {value}\n")
    out.write(",".join(CSV_COLUMNS) + "\n")
    current_t = None
    for row in table.rows:
        if row.t_sheet != current_t:
            current_t = float(row.t_sheet)
            out.write(f"# T_g_K = {current_t!r}\n")
        out.write(",".join(_format(v) for v in
                           (row.a_m, row.f_neq, row.f_eq, row.ratio,
                            row.f_tilde, row.delta, row.err)) + "\n")
    return out.getvalue()


def emit_csv(table, destination):
    """Write the rendered CSV to ``destination`` (path or file object)."""
    if not table.rows:
        raise ConfigError("refusing to emit an empty table")
    text = render_csv(table)
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write CSV to {destination}: {exc}") from exc


def parse_csv(text):
    """Parse CSV text produced by render_csv back into a SweepTable."""
    meta = {}
    rows = []
    current_t = None
    header_seen = False
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                raise ConfigError(f"malformed metadata line: {line!r}")
            key, _, value = body.partition("=")
            key, value = key.strip(), value.strip()
            if key == "T_g_K":
                current_t = float(value)
            else:
                meta[key] = value
            continue
        if not header_seen:
            if tuple(line.split(",")) != CSV_COLUMNS:
                raise ConfigError(f"unexpected CSV header: {line!r}")
            header_seen = True
            continue
        fields = line.split(",")
        if len(fields) != len(CSV_COLUMNS):
            raise ConfigError(f"wrong field count in row: {line!r}")
        if current_t is None:
            raise ConfigError("data row before any T_g_K marker")
        vals = [float(f) for f in fields]
        rows.append(SweepRow(a_m=vals[0], t_sheet=current_t, f_neq=vals[1],
                             f_eq=vals[2], ratio=vals[3], f_tilde=vals[4],
                             delta=vals[5], err=vals[6]))
    if not header_seen:
        raise ConfigError("no CSV header found")
    return SweepTable(rows=tuple(rows), meta=meta)


def _cache_dir(explicit=None):
    path = explicit or os.environ.get("NEQCP_CACHE_DIR")
    return path


def _cache_path(directory, key):
    return os.path.join(directory, f"{key}.csv")


def cache_lookup(key, cache_dir=None):
    """Return the cached table for ``key``, or None.

    Entries written by a different code version, or files that fail to
    parse, are treated as absent (the latter with a warning).
    """
    directory = _cache_dir(cache_dir)
    if directory is None:
        return None
    path = _cache_path(directory, key)
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        return None
    except OSError as exc:
        warnings.warn(f"cache read failed for {path}: {exc}; recomputing")
        return None
    try:
        table = parse_csv(text)
    except (ConfigError, ValueError) as exc:
        warnings.warn(f"corrupt cache entry {path}: {exc}; recomputing")
        return None
    if table.meta.get("tool") != f"neqcp {__version__}":
        return None
    return table


def cache_store(key, table, cache_dir=None):
    """Atomically store ``table`` under ``key``; silent no-op without a dir."""
    directory = _cache_dir(cache_dir)
    if directory is None:
        return
    os.makedirs(directory, exist_ok=True)
    path = _cache_path(directory, key)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(render_csv(table))
    os.replace(tmp, path)
