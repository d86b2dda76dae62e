"""Command-line interface: ``sdspec <command> [options]``.

Configuration is one JSON document; flags override its fields (flag > file >
default).  Without ``--config`` the unit sphere is used.

Exit codes: 0 ok, 1 configuration error, 2 profile assumption violated,
3 empty or unsolvable request, 4 oracle numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__, kernels
from .action import half_action, action_energy_derivative
from .errors import DomainError, NumericalError
from .localfield import glue, radial_residual
from .oracle import oracle_spectrum
from .quantize import (SpectralParams, classify_regime,
                       enumerate_spectrum)
from .surface import SurfaceProfile, validate_profile

EXIT_OK, EXIT_CONFIG, EXIT_ASSUMPTION, EXIT_EMPTY, EXIT_ORACLE = 0, 1, 2, 3, 4


class ConfigError(Exception):
    pass


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    z0: float = -1.0
    z1: float = 1.0
    omega_coefficients: list = field(default_factory=lambda: [1.0])
    h: float | None = 0.1
    h_list: list | None = None
    alpha: float | None = None
    alpha_over_h3: float | None = 1.0
    mode: str = "derived"
    E_window: tuple = (1e-3, 1.0)
    branch_range: tuple | None = None
    C: float = 1.0
    epsilon: float = 0.1
    tolerances: dict = field(default_factory=dict)
    format: str = "csv"
    path: str | None = None

    def profile(self):
        return SurfaceProfile.from_coefficients(self.z0, self.z1, self.omega_coefficients)

    def params(self, h=None):
        h = self.h if h is None else h
        if self.alpha is not None:
            return SpectralParams(h=h, alpha=self.alpha, E_window=self.E_window)
        return SpectralParams.from_ratio(h, self.alpha_over_h3, self.E_window)

    def echo(self):
        out = asdict(self)
        out["E_window"] = list(self.E_window)
        return out


def _number(section, key, where, required=False, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"{where}.{key}: required field is missing")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


def _pair(v, where):
    if isinstance(v, str):
        parts = v.split(":")
    else:
        parts = v
    try:
        a, b = (float(x) for x in parts)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected two numbers, got {v!r}") from None
    return a, b


def load_config(path):
    """Parse a JSON config file into a RunConfig."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return config_from_dict(doc)


def config_from_dict(doc):
    cfg = RunConfig()
    surf = doc.get("surface")
    if surf is not None:
        if not isinstance(surf, dict):
            raise ConfigError("surface: expected an object")
        cfg.z0 = _number(surf, "z0", "surface", required=True)
        cfg.z1 = _number(surf, "z1", "surface", required=True)
        coeffs = surf.get("omega_coefficients", [1.0])
        if not isinstance(coeffs, list) or not coeffs:
            raise ConfigError("surface.omega_coefficients: expected a non-empty list")
        cfg.omega_coefficients = [_number({"c": c}, "c", "surface.omega_coefficients")
                                  for c in coeffs]
    phys = doc.get("physics", {})
    if not isinstance(phys, dict):
        raise ConfigError("physics: expected an object")
    if "alpha" in phys and "alpha_over_h3" in phys:
        raise ConfigError("physics: give exactly one of alpha / alpha_over_h3")
    if "alpha" in phys:
        cfg.alpha = _number(phys, "alpha", "physics")
        cfg.alpha_over_h3 = None
    elif "alpha_over_h3" in phys:
        cfg.alpha_over_h3 = _number(phys, "alpha_over_h3", "physics")
    cfg.h = _number(phys, "h", "physics", default=cfg.h)
    if "h_list" in phys:
        hl = phys["h_list"]
        if not isinstance(hl, list) or not hl:
            raise ConfigError("physics.h_list: expected a non-empty list")
        cfg.h_list = [_number({"h": x}, "h", "physics.h_list") for x in hl]
    solver = doc.get("solver", {})
    if not isinstance(solver, dict):
        raise ConfigError("solver: expected an object")
    if "mode" in solver:
        cfg.mode = str(solver["mode"])
    if "E_window" in solver:
        cfg.E_window = _pair(solver["E_window"], "solver.E_window")
    if "branch_range" in solver:
        lo, hi = _pair(solver["branch_range"], "solver.branch_range")
        cfg.branch_range = (int(lo), int(hi))
    cfg.C = _number(solver, "C", "solver", default=cfg.C)
    cfg.epsilon = _number(solver, "epsilon", "solver", default=cfg.epsilon)
    tol = solver.get("tolerances", {})
    if not isinstance(tol, dict):
        raise ConfigError("solver.tolerances: expected an object")
    cfg.tolerances = dict(tol)
    out = doc.get("output", {})
    if not isinstance(out, dict):
        raise ConfigError("output: expected an object")
    cfg.format = str(out.get("format", cfg.format))
    cfg.path = out.get("path", cfg.path)
    return cfg


def _check(cfg):
    if cfg.mode not in ("paper", "derived"):
        raise ConfigError(f"solver.mode: expected paper or derived, got {cfg.mode!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"output.format: expected csv or json, got {cfg.format!r}")
    if not cfg.z0 < cfg.z1:
        raise ConfigError("surface: need z0 < z1")
    lo, hi = cfg.E_window
    if not 0 < lo < hi:
        raise ConfigError("solver.E_window: need 0 < E_min < E_max")
    for h in [cfg.h] + list(cfg.h_list or []):
        if h is None or not h > 0:
            raise ConfigError("physics.h: must be positive")
    if cfg.h_list and list(cfg.h_list) != sorted(cfg.h_list, reverse=True):
        raise ConfigError("physics.h_list: must be sorted in descending order")


def _threads():
    try:
        return max(1, int(os.environ.get("SDS_THREADS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(rows, columns, fmt, meta):
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": rows}, indent=2, allow_nan=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. piped into head); not an error for us
            sys.stdout = open(os.devnull, "w")


def _meta(cfg, command, **extra):
    meta = {"command": command, "config": cfg.echo(), "version": __version__,
            "numpy": np.__version__, "kernels": kernels.BACKEND}
    meta.update(extra)
    return meta


# --------------------------------------------------------------------------
# commands


def _validated_profile(cfg):
    profile = cfg.profile()
    report = validate_profile(profile)
    if not report.passed:
        raise CommandError("profile violates the surface assumptions:\n"
                           + "\n".join(report.lines()), EXIT_ASSUMPTION)
    return profile


def cmd_validate(cfg, args):
    report = validate_profile(cfg.profile())
    print("\n".join(report.lines()))
    return EXIT_OK if report.passed else EXIT_ASSUMPTION


def cmd_action(cfg, args):
    profile = _validated_profile(cfg)
    energies = [float(x) for x in args.energies.split(",")] if args.energies else \
        list(np.linspace(*cfg.E_window, 5))
    rows = []
    for E in energies:
        if not E > 0:
            raise ConfigError(f"--energies: E must be positive, got {E}")
        J = half_action(profile, E)
        rows.append({"E": E, "J": J.J, "dJ_dE": action_energy_derivative(profile, E),
                     "quadrature_error": J.quadrature_error_estimate})
    return rows, ["E", "J", "dJ_dE", "quadrature_error"], {}


def _spectrum(cfg, profile, params):
    series = enumerate_spectrum(profile, params, cfg.mode)
    entries = list(series)
    if cfg.branch_range is not None:
        lo, hi = cfg.branch_range
        entries = [e for e in entries if lo <= e.k <= hi]
    return entries


def cmd_spectrum(cfg, args):
    profile = _validated_profile(cfg)
    params = cfg.params()
    regime = classify_regime(params, cfg.C, cfg.epsilon)
    entries = _spectrum(cfg, profile, params)
    if not entries:
        raise CommandError("no eigenvalues in the energy window", EXIT_EMPTY)
    rows = [{"k": e.k, "E": e.E, "mode": cfg.mode, "regime": regime.tag,
             "phase": e.phase_at_root, "residual": e.residual} for e in entries]
    return rows, ["k", "E", "mode", "regime", "phase", "residual"], \
        {"regime": regime.tag, "maslov_index": regime.maslov_index(cfg.mode)}


def _oracle(cfg, profile, params):
    try:
        return oracle_spectrum(profile, params, threads=_threads(),
                               tol=float(cfg.tolerances.get("oracle", 1e-13)))
    except NumericalError as exc:
        raise CommandError(str(exc), EXIT_ORACLE) from None


def cmd_oracle(cfg, args):
    profile = _validated_profile(cfg)
    roots = _oracle(cfg, profile, cfg.params())
    if not roots:
        raise CommandError("oracle found no eigenvalues in the energy window", EXIT_EMPTY)
    rows = [{"index": i, "E_oracle": r.E, "bracket_lo": r.bracket[0],
             "bracket_hi": r.bracket[1], "mismatch_slope": r.mismatch_slope}
            for i, r in enumerate(roots)]
    return rows, ["index", "E_oracle", "bracket_lo", "bracket_hi", "mismatch_slope"], {}


def pair_nearest(oracle_E, sc_E):
    """Mutual nearest-neighbour pairs ``(i, j)`` plus unmatched indices of each list."""
    oracle_E, sc_E = np.asarray(oracle_E), np.asarray(sc_E)
    if not len(oracle_E) or not len(sc_E):
        return [], list(range(len(oracle_E))), list(range(len(sc_E)))
    near_sc = [int(np.argmin(np.abs(sc_E - e))) for e in oracle_E]
    near_or = [int(np.argmin(np.abs(oracle_E - e))) for e in sc_E]
    pairs = [(i, j) for i, j in enumerate(near_sc) if near_or[j] == i]
    used_o = {i for i, _ in pairs}
    used_s = {j for _, j in pairs}
    return (pairs, [i for i in range(len(oracle_E)) if i not in used_o],
            [j for j in range(len(sc_E)) if j not in used_s])


def _compare_rows(cfg, profile, params):
    entries = _spectrum(cfg, profile, params)
    roots = _oracle(cfg, profile, params)
    pairs, lost_o, lost_s = pair_nearest([r.E for r in roots], [e.E for e in entries])
    rows = []
    for i, j in pairs:
        err = abs(entries[j].E - roots[i].E)
        rows.append({"h": params.h, "k": entries[j].k, "E_oracle": roots[i].E,
                     "E_semiclassical": entries[j].E, "abs_err": err,
                     "err_over_h": err / params.h})
    unmatched = {"oracle": [roots[i].E for i in lost_o],
                 "semiclassical": [entries[j].E for j in lost_s]}
    return rows, entries, unmatched


def cmd_compare(cfg, args):
    profile = _validated_profile(cfg)
    rows, _, unmatched = _compare_rows(cfg, profile, cfg.params())
    if not rows:
        raise CommandError("no matched eigenvalue pairs in the energy window", EXIT_EMPTY)
    for side, vals in unmatched.items():
        for E in vals:
            print(f"unmatched {side} root: {E!r}", file=sys.stderr)
    cols = ["k", "E_oracle", "E_semiclassical", "abs_err", "err_over_h"]
    return [{c: r[c] for c in cols} for r in rows], cols, {"unmatched": unmatched}


def cmd_eigenfunction(cfg, args):
    profile = _validated_profile(cfg)
    params = cfg.params()
    entries = [e for e in enumerate_spectrum(profile, params, cfg.mode) if e.k == args.k]
    if not entries:
        raise CommandError(f"branch k={args.k} has no root in the energy window", EXIT_EMPTY)
    E = entries[0].E
    overlap = tuple(cfg.tolerances.get("overlap", (0.5, 1.0)))
    eig = glue(profile, params, E, cfg.mode, overlap=overlap)
    header = {"k": args.k, "E": E, "cut_inner": eig.cut_inner, "cut_outer": eig.cut_outer,
              "matching_residual": eig.matching_residual,
              "relative_matching_residual": eig.relative_residual, "warning": eig.warning}
    rows = [{"z": float(z), "s": float(s), "value": float(v), "branch": str(b)}
            for z, s, v, b in zip(eig.z, eig.s, eig.values, eig.branch)]
    return rows, ["z", "s", "value", "branch"], {"eigenfunction": header}


def cmd_sweep(cfg, args):
    profile = _validated_profile(cfg)
    hs = cfg.h_list or [cfg.h]
    overlap = tuple(cfg.tolerances.get("overlap", (0.5, 1.0)))
    rows = []
    unmatched = {}
    for h in hs:
        params = cfg.params(h)
        pairs, _, lost = _compare_rows(cfg, profile, params)
        unmatched[repr(h)] = lost
        for r in pairs:
            eig = glue(profile, params, r["E_semiclassical"], cfg.mode, overlap=overlap)
            rows.append({"h": h, "k": r["k"], "E_sc": r["E_semiclassical"],
                         "E_oracle": r["E_oracle"], "err": r["abs_err"],
                         "err_over_h": r["err_over_h"],
                         "matching_residual": eig.relative_residual,
                         "radial_residual": radial_residual(profile, params,
                                                            r["E_semiclassical"], eig)})
    if not rows:
        raise CommandError("sweep produced no matched eigenvalues", EXIT_EMPTY)
    cols = ["h", "k", "E_sc", "E_oracle", "err", "err_over_h", "matching_residual",
            "radial_residual"]
    return rows, cols, {"unmatched": unmatched}


COMMANDS = {
    "action": cmd_action,
    "spectrum": cmd_spectrum,
    "oracle": cmd_oracle,
    "compare": cmd_compare,
    "eigenfunction": cmd_eigenfunction,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    """Usage errors are configuration errors (exit 1), not argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON configuration file")
    common.add_argument("--mode", choices=["paper", "derived"])
    common.add_argument("--h", type=float, help="semiclassical parameter")
    common.add_argument("--h-list", help="comma-separated h values, descending (sweep)")
    coupling = common.add_mutually_exclusive_group()
    coupling.add_argument("--alpha", type=float)
    coupling.add_argument("--alpha-over-h3", type=float)
    common.add_argument("--window", metavar="E_MIN:E_MAX")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=["csv", "json"])

    parser = _Parser(
        prog="sdspec", description="Semiclassical s-wave spectrum of a point interaction "
        "on a surface of revolution.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the profile assumptions")
    p = sub.add_parser("action", parents=[common], help="half-period action J(E)")
    p.add_argument("--energies", help="comma-separated energies")
    sub.add_parser("spectrum", parents=[common], help="semiclassical eigenvalues")
    sub.add_parser("oracle", parents=[common], help="reference eigenvalues by shooting")
    sub.add_parser("compare", parents=[common], help="semiclassical vs reference")
    p = sub.add_parser("eigenfunction", parents=[common], help="glued eigenfunction samples")
    p.add_argument("--k", type=int, required=True, help="branch index")
    sub.add_parser("sweep", parents=[common], help="convergence table over h_list")
    return parser


def resolve_config(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    if args.mode:
        cfg.mode = args.mode
    if args.h is not None:
        cfg.h = args.h
    if args.h_list:
        try:
            cfg.h_list = [float(x) for x in args.h_list.split(",")]
        except ValueError:
            raise ConfigError(f"--h-list: cannot parse {args.h_list!r}") from None
    if args.alpha is not None:
        cfg.alpha, cfg.alpha_over_h3 = args.alpha, None
    if args.alpha_over_h3 is not None:
        cfg.alpha, cfg.alpha_over_h3 = None, args.alpha_over_h3
    if args.window:
        cfg.E_window = _pair(args.window, "--window")
    if args.out:
        cfg.path = args.out
    if args.format:
        cfg.format = args.format
    _check(cfg)
    return cfg


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        if args.command == "validate":
            return cmd_validate(cfg, args)
        rows, cols, extra = COMMANDS[args.command](cfg, args)
        meta = _meta(cfg, args.command, **extra)
        text = render(rows, cols, cfg.format, meta)
        if cfg.format == "csv" and "eigenfunction" in extra:
            text = "# " + json.dumps(extra["eigenfunction"]) + "\n" + text
        emit(text, cfg.path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (DomainError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
