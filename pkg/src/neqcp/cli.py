"""Command-line interface: single points, sweeps, zero crossing, checks.

Configuration precedence is defaults < config file < command-line
flags.  The config file is flat ``key = value`` text, SI units, with
'#' comments; keys match the RunConfig field names (``t_e`` and
``t_g`` are accepted as shorthand).
"""

import argparse
import os
import sys

from . import __version__
from .equilibrium import (FORCE_REL_TOL, TENSOR_REL_TOL, NanoparticleSpec)
from .errors import (BracketError, BudgetExceededError, ConfigError,
                     DomainError, NeqcpError)
from .nonequilibrium import cross_check_representation
from .sweep import (RunConfig, SweepTable, cache_lookup, cache_store,
                    config_hash, emit_csv, find_zero_crossing, render_csv,
                    run_sweep, _one_point, _meta_for)

_CONFIG_KEYS = {
    "radius", "material", "t_environment", "t_e", "t_sheet_values", "t_g",
    "a_min", "a_max", "points", "spacing", "force_rel_tol",
    "tensor_rel_tol", "v_fermi", "verify", "emit_ratio",
}

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _parse_bool(text, key):
    low = text.lower()
    if low in _BOOL_TRUE:
        return True
    if low in _BOOL_FALSE:
        return False
    raise ConfigError(f"{key} must be a boolean, got {text!r}")


def _parse_temperature_list(text):
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad temperature list {text!r}: {exc}") from exc


def _parse_material(text):
    """'metal' or 'dielectric:EPS' -> (material, epsilon or None)."""
    if text == "metal":
        return "metal", None
    if text.startswith("dielectric:"):
        try:
            return "dielectric", float(text.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad permittivity in {text!r}") from exc
    raise ConfigError(
        f"material must be 'metal' or 'dielectric:EPS', got {text!r}")


def read_config_file(path):
    """Parse a flat key-value config file into a plain dict."""
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(
                f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def _build_config(args):
    """Merge defaults, config file, and flags into a RunConfig."""
    merged = {
        "radius": 2.5e-9,
        "material": "metal",
        "t_environment": 300.0,
        "t_sheet_values": None,
        "a_min": 0.2e-6,
        "a_max": 2.0e-6,
        "points": 60,
        "spacing": "logarithmic",
        "force_rel_tol": FORCE_REL_TOL,
        "tensor_rel_tol": TENSOR_REL_TOL,
        "v_fermi": None,
        "verify": False,
        "emit_ratio": True,
    }
    epsilon = None
    if args.config:
        for key, value in read_config_file(args.config).items():
            if key in ("t_e", "t_environment"):
                merged["t_environment"] = float(value)
            elif key in ("t_g", "t_sheet_values"):
                merged["t_sheet_values"] = _parse_temperature_list(value)
            elif key == "material":
                merged["material"], epsilon = _parse_material(value)
            elif key in ("radius", "a_min", "a_max", "v_fermi"):
                merged[key] = float(value)
            elif key == "points":
                merged[key] = int(value)
            elif key == "spacing":
                merged[key] = value
            elif key in ("force_rel_tol", "tensor_rel_tol"):
                merged[key] = float(value)
            elif key in ("verify", "emit_ratio"):
                merged[key] = _parse_bool(value, key)
    if args.radius is not None:
        merged["radius"] = args.radius
    if args.material is not None:
        merged["material"], epsilon = _parse_material(args.material)
    if args.te is not None:
        merged["t_environment"] = args.te
    if args.tg is not None:
        merged["t_sheet_values"] = _parse_temperature_list(args.tg)
    if args.amin is not None:
        merged["a_min"] = args.amin
    if args.amax is not None:
        merged["a_max"] = args.amax
    if args.points is not None:
        merged["points"] = args.points
    if args.spacing is not None:
        merged["spacing"] = args.spacing
    if args.tol is not None:
        merged["force_rel_tol"] = args.tol
    if args.vf is not None:
        merged["v_fermi"] = args.vf
    if args.verify:
        merged["verify"] = True
    if merged["t_sheet_values"] is None:
        merged["t_sheet_values"] = (merged["t_environment"],)
    try:
        spec = NanoparticleSpec(radius=merged["radius"],
                                material=merged["material"],
                                epsilon_static=epsilon)
        return RunConfig(
            spec=spec,
            t_environment=merged["t_environment"],
            t_sheet_values=merged["t_sheet_values"],
            a_min=merged["a_min"], a_max=merged["a_max"],
            points=merged["points"], spacing=merged["spacing"],
            force_rel_tol=merged["force_rel_tol"],
            tensor_rel_tol=merged["tensor_rel_tol"],
            v_fermi=merged["v_fermi"],
            verify=merged["verify"], emit_ratio=merged["emit_ratio"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def _deliver(text, out_path):
    if out_path:
        try:
            with open(out_path, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise ConfigError(f"cannot write {out_path}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _cached_sweep(config, args):
    key = config_hash(config)
    cached = cache_lookup(key, cache_dir=args.cache_dir)
    if cached is not None:
        return cached
    table = run_sweep(config, jobs=args.jobs)
    cache_store(key, table, cache_dir=args.cache_dir)
    return table


def _cmd_force(config, args):
    gap = args.a if args.a is not None else config.a_min
    rows = tuple(_one_point(config, gap, t) for t in config.t_sheet_values)
    _deliver(render_csv(SweepTable(rows=rows, meta=_meta_for(config))),
             args.out)
    return 0


def _cmd_sweep(config, args):
    _deliver(render_csv(_cached_sweep(config, args)), args.out)
    return 0


def _cmd_ratio(config, args):
    table = _cached_sweep(config, args)
    lines = ["a_m,T_g_K,ratio"]
    lines += [f"{row.a_m:.8e},{row.t_sheet:g},{row.ratio:.8e}"
              for row in table.rows]
    _deliver("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_zero_cross(config, args):
    crossing = find_zero_crossing(config, (config.a_min, config.a_max))
    lines = [
        f"separation_m = {crossing.separation:.8e}",
        f"bracket_m = {crossing.bracket[0]:.8e},{crossing.bracket[1]:.8e}",
        f"force_band_N = {crossing.force_band[0]:.8e},"
        f"{crossing.force_band[1]:.8e}",
        f"evaluations = {crossing.evaluations}",
    ]
    _deliver("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_verify(config, args):
    gap = args.a if args.a is not None else config.a_min
    status = 0
    lines = []
    for t_sheet in config.t_sheet_values:
        report = cross_check_representation(
            gap, config.t_environment, t_sheet, config.spec,
            v_fermi=config.v_fermi)
        lines += [
            f"T_g_K = {t_sheet:g}",
            f"  force_direct_N = {report.force_direct:.8e}",
            f"  force_via_split_N = {report.force_via_split:.8e}",
            f"  half_difference_sum_N = {report.half_difference_sum:.8e}",
            f"  half_difference_spectral_N = "
            f"{report.half_difference_spectral:.8e}",
            f"  force_mismatch = {report.force_mismatch:.3e}",
            f"  half_difference_mismatch = "
            f"{report.half_difference_mismatch:.3e}",
            f"  ok = {report.ok}",
        ]
        if not report.ok:
            status = 1
    _deliver("\n".join(lines) + "\n", args.out)
    return status


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the config code.

    argparse defaults to exit code 2, which this tool reserves for
    bracket failures; a bad flag value is a configuration problem.
    """

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(4, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(
        prog="neqcp",
        description="Casimir-Polder force on a small sphere above "
                    "free-standing graphene, in and out of thermal "
                    "equilibrium.  Sign convention: negative force = "
                    "attraction toward the sheet.")
    parser.add_argument("--version", action="version",
                        version=f"neqcp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "force": "single-separation force evaluation",
        "sweep": "force over a separation grid, CSV out",
        "zero-cross": "bisect for the attraction-to-repulsion sign "
                      "change (repulsion = positive force) between "
                      "--amin and --amax",
        "verify": "run both force representations and compare",
        "ratio": "nonequilibrium/equilibrium force ratio curves",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--jobs", type=int, default=1,
                       help="concurrent grid-point evaluations")
        p.add_argument("--tol", type=float,
                       help="relative force tolerance override")
        p.add_argument("--verify", action="store_true",
                       help="cross-check each point against the split "
                            "representation (slow)")
        p.add_argument("--cache-dir",
                       default=os.environ.get("NEQCP_CACHE_DIR"),
                       help="results cache directory (env NEQCP_CACHE_DIR)")
        p.add_argument("--vf", type=float,
                       help="graphene Fermi velocity override, m/s")
        p.add_argument("--tg", help="sheet temperature(s) K, comma list")
        p.add_argument("--te", type=float, help="environment temperature K")
        p.add_argument("--radius", type=float, help="sphere radius, m")
        p.add_argument("--material",
                       help="'metal' or 'dielectric:EPS' (static "
                            "permittivity)")
        p.add_argument("--amin", type=float, help="smallest separation, m")
        p.add_argument("--amax", type=float, help="largest separation, m")
        p.add_argument("--points", type=int, help="grid point count")
        p.add_argument("--spacing", choices=("linear", "logarithmic"),
                       help="grid spacing")
        p.add_argument("--a", type=float,
                       help="single separation, m (force/verify)")
    return parser


_DISPATCH = {
    "force": _cmd_force,
    "sweep": _cmd_sweep,
    "zero-cross": _cmd_zero_cross,
    "verify": _cmd_verify,
    "ratio": _cmd_ratio,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "ratio" and args.tg is None and args.config is None:
        args.tg = "77,500,700"
    try:
        config = _build_config(args)
        return _DISPATCH[args.command](config, args)
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BudgetExceededError as exc:
        print(f"error: quadrature budget exhausted: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NeqcpError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
