"""``spinor-moment`` command line.

Every flag can also be given in the config file (``key = value``, flag name
with underscores); flags win. Exit codes: 0 success, 1 usage error, 2
numerical acceptance failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dirac import make_gaussian_packet, make_plane_wave
from .gordon import field_slice, gordon_residual, magnetization_current_field, write_slice_csv
from .moments import (BracketError, ConvergenceError, SphereSpec, TaylorValidityError, magnetic_moment_from_current,
                      solve_matching_width, sphere_current_field, sphere_moment_closed_form, sweep, total_moment,
                      write_sweep_csv)
from .quadrature import (DEFAULT_DET_BUDGET, DEFAULT_MC_BUDGET, DEFAULT_SEED, c_b_integrand, c_e_integrand,
                         c_i_integrand, integrate_6d_coulomb)
from .scales import PhysicalScales, load_config
from .selffield import NonRelativisticWarning, first_order_current_field

CONFIG_ENV = "SPINOR_MOMENT_CONFIG"
EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
AGREEMENT_SIGMA = 3.0
GORDON_TOL = 1e-10
SPHERE_TOL = 1e-6

# flag defaults; the config file may replace any of these
DEFAULTS = {
    "d_compton": 5.0,
    "method": "det",
    "budget": None,
    "det_budget": DEFAULT_DET_BUDGET,
    "seed": DEFAULT_SEED,
    "convention": "oracle",
    "out": None,
    "format": None,
    "d_min": 2.0,
    "d_max": 20.0,
    "steps": 10,
    "grid_n": 16,
    "extent": 3.0,
    "which": "JM",
    "Q": 1.0,
    "R": 1.0,
    "omega": 1.0,
    "waves": 20,
    "bracket_lo": 0.1,
    "bracket_hi": 100.0,
}
_INT_KEYS = {"budget", "det_budget", "seed", "steps", "grid_n", "waves"}
_FLOAT_KEYS = {"d_compton", "d_min", "d_max", "extent", "Q", "R", "omega", "bracket_lo", "bracket_hi"}


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Resolved settings of one command. Command-specific options sit in ``options``."""

    command: str
    scales: PhysicalScales
    config_path: str | None
    d_compton: float
    method: str
    budget: int | None
    seed: int
    convention: str
    out: str | None
    format: str | None
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not (self.d_compton > 0 and math.isfinite(self.d_compton)):
            raise UsageError("d must be positive")
        if self.budget is not None and self.budget <= 0:
            raise UsageError("budget must be positive")
        if self.method not in ("det", "mc") or self.convention not in ("paper", "oracle"):
            raise UsageError("method must be det|mc and convention paper|oracle")

    def __getitem__(self, key: str):
        if key in self.options:
            return self.options[key]
        return getattr(self, key)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    v = int(text, 0)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError("must be a positive number")
    return v


def _constant(text: str) -> tuple[str, float]:
    key, sep, val = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError("expected KEY=VALUE")
    return key.strip().replace("-", "_"), float(val)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("common options")
    g.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    g.add_argument("--set", dest="constants", action="append", type=_constant, default=[], metavar="KEY=VALUE",
                   help="override a physical constant (e, m, m_e, c, hbar)")
    g.add_argument("--d-compton", type=_positive_float, help="packet width in Compton radii")
    g.add_argument("--method", choices=("det", "mc"))
    g.add_argument("--budget", type=_positive_int, help="quadrature budget (nodes or samples)")
    g.add_argument("--seed", type=lambda t: int(t, 0))
    g.add_argument("--convention", choices=("paper", "oracle"))
    g.add_argument("--out", help="write primary output here instead of stdout")
    g.add_argument("--format", choices=("csv", "json"))

    parser = _Parser(prog="spinor-moment", description="State-dependent electron spin moment toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", parents=[common], help="C_E, C_I, C_B from both engines")
    p.add_argument("--det-budget", type=_positive_int, help="deterministic engine node budget")
    sub.add_parser("moment", parents=[common], help="moment breakdown at one width")
    p = sub.add_parser("sweep", parents=[common], help="moment over a range of widths")
    p.add_argument("--d-min", type=_positive_float)
    p.add_argument("--d-max", type=_positive_float)
    p.add_argument("--steps", type=int)
    p = sub.add_parser("fieldslice", parents=[common], help="J_M or J_1 on the z = 0 plane")
    p.add_argument("--grid-n", type=int)
    p.add_argument("--extent", type=_positive_float, help="half-width of the slice in units of d")
    p.add_argument("--which", choices=("JM", "J1"))
    p = sub.add_parser("dstar", parents=[common], help="width matching the first-order QED moment")
    p.add_argument("--bracket-lo", type=_positive_float)
    p.add_argument("--bracket-hi", type=_positive_float)
    p = sub.add_parser("gordon-check", parents=[common], help="Gordon identity on random plane waves")
    p.add_argument("--waves", type=_positive_int)
    p = sub.add_parser("sphere-oracle", parents=[common], help="rotating charged sphere moment")
    p.add_argument("--Q", type=float)
    p.add_argument("--R", type=_positive_float)
    p.add_argument("--omega", type=float)
    return parser


def _coerce(key: str, value: str):
    if key in _INT_KEYS:
        return int(value, 0)
    if key in _FLOAT_KEYS:
        return float(value)
    return value


def resolve(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, config file and flags (flags win)."""
    path = args.config or os.environ.get(CONFIG_ENV) or None
    overrides = dict(args.constants)
    try:
        scales, extra = load_config(path, overrides)
    except (OSError, ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    settings = dict(DEFAULTS)
    for key, val in extra.items():
        if key not in DEFAULTS:
            raise UsageError(f"unknown config key {key!r}")
        try:
            settings[key] = _coerce(key, val)
        except ValueError as exc:
            raise UsageError(f"bad value for {key!r}: {val!r}") from exc
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    common = {k: settings.pop(k) for k in ("d_compton", "method", "budget", "seed", "convention", "out", "format")}
    return RunConfig(args.command, scales, path, options=settings, **common)


def _emit(text: str, settings) -> None:
    if settings["out"]:
        with open(settings["out"], "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _table(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def cmd_constants(scales, st) -> int:
    mc_budget = st["budget"] or DEFAULT_MC_BUDGET
    rows, ok = [], True
    for name, factory in (("C_E", c_e_integrand), ("C_I", c_i_integrand), ("C_B", c_b_integrand)):
        det = integrate_6d_coulomb(factory(), "det", st["det_budget"])
        mc = integrate_6d_coulomb(factory(), "mc", mc_budget, seed=st["seed"])
        sigma = math.hypot(det.uncertainty, mc.uncertainty)
        agree = abs(det.value - mc.value) <= AGREEMENT_SIGMA * sigma
        ok &= agree
        rows.append({"constant": name, "det": det.value, "det_error": det.uncertainty, "mc": mc.value,
                     "mc_std_error": mc.std_error, "mc_samples": mc.budget, "seed": st["seed"], "agree": agree})
    if (st["format"] or "csv") == "json":
        _emit(_dump_json(rows), st)
    else:
        header = list(rows[0])
        _emit(_table(header, [[r[k] for k in header] for r in rows]), st)
    return EXIT_OK if ok else EXIT_NUMERICAL


def _packet(scales, st):
    return make_gaussian_packet(st["d_compton"] * scales.dressed().compton_radius(), scales=scales)


def cmd_moment(scales, st) -> int:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonRelativisticWarning)
        b = total_moment(_packet(scales, st), st["convention"], st["method"], st["budget"], st["seed"])
    d = b.to_dict()
    if (st["format"] or "json") == "csv":
        _emit(_table(list(d), [[json.dumps(v) if isinstance(v, list) else v for v in d.values()]]), st)
    else:
        _emit(_dump_json(d), st)
    return EXIT_OK


def cmd_sweep(scales, st) -> int:
    d_min, d_max, steps = st["d_min"], st["d_max"], st["steps"]
    if not (0 < d_min < d_max) or steps < 2:
        raise UsageError("sweep needs 0 < d-min < d-max and steps >= 2")
    rows = sweep(d_min, d_max, steps, st["convention"], scales.dressed(),
                 method=st["method"], budget=st["budget"], seed=st["seed"])
    if (st["format"] or "csv") == "json":
        from .moments import SWEEP_HEADER
        _emit(_dump_json([dict(zip(SWEEP_HEADER, r)) for r in rows]), st)
    else:
        _emit(write_sweep_csv(rows), st)
    return EXIT_OK


def cmd_fieldslice(scales, st) -> int:
    if st["grid_n"] < 8:
        raise UsageError("grid-n must be at least 8")
    packet = _packet(scales, st)
    field = magnetization_current_field(packet) if st["which"] == "JM" else first_order_current_field(packet)
    rows = field_slice(field, st["extent"] * packet.d, st["grid_n"])
    if (st["format"] or "csv") == "json":
        _emit(_dump_json({"which": st["which"], "d_cm": packet.d, "rows": rows.tolist()}), st)
    else:
        _emit(write_slice_csv(rows), st)
    return EXIT_OK


def cmd_dstar(scales, st) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonRelativisticWarning)
        root = solve_matching_width(st["convention"], scales.dressed(), bracket=(st["bracket_lo"], st["bracket_hi"]),
                                    method=st["method"], budget=st["budget"], seed=st["seed"])
    report = {"convention": st["convention"], "d_star_over_compton": root,
              "target_anomaly": scales.alpha() / (2.0 * math.pi),
              "warnings": [str(w.message) for w in caught if issubclass(w.category, NonRelativisticWarning)]}
    if (st["format"] or "json") == "csv":
        _emit(_table(["convention", "d_star_over_compton"], [[st["convention"], root]]), st)
    else:
        _emit(_dump_json(report), st)
    return EXIT_OK


def cmd_gordon_check(scales, st) -> int:
    rng = np.random.default_rng(st["seed"])
    s = scales
    mc = s.m * s.c
    lam = s.hbar / mc
    rows, worst = [], 0.0
    for i in range(st["waves"]):
        p = rng.normal(size=3) * mc
        A = rng.normal(size=3) * mc * s.c / s.e * 0.3
        spin = rng.normal(size=2) + 1j * rng.normal(size=2)
        wave = make_plane_wave(p, spin, s, A)
        pts = rng.normal(size=(8, 3)) * 10.0 * lam
        r = float(np.max(gordon_residual(wave, A, pts)))
        worst = max(worst, r)
        rows.append([i, *map(float, p), r])
    if (st["format"] or "csv") == "json":
        _emit(_dump_json({"max_relative_residual": worst, "tolerance": GORDON_TOL,
                          "waves": [dict(zip(("index", "px", "py", "pz", "max_relative_residual"), r)) for r in rows]}),
              st)
    else:
        _emit(_table(["index", "px", "py", "pz", "max_relative_residual"], rows), st)
    return EXIT_OK if worst <= GORDON_TOL else EXIT_NUMERICAL


def cmd_sphere_oracle(scales, st) -> int:
    spec = SphereSpec(st["Q"], st["R"], st["omega"])
    num = magnetic_moment_from_current(sphere_current_field(spec), scales.c)
    exact = sphere_moment_closed_form(spec, scales.c)
    rel = float(np.linalg.norm(num - exact) / np.linalg.norm(exact)) if np.any(exact) else float(np.linalg.norm(num))
    report = {"Q": spec.Q, "R": spec.R, "omega": spec.omega, "numeric": num.tolist(), "closed_form": exact.tolist(),
              "relative_error": rel, "tolerance": SPHERE_TOL}
    if (st["format"] or "json") == "csv":
        _emit(_table(["mz_numeric", "mz_closed_form", "relative_error"], [[float(num[2]), float(exact[2]), rel]]), st)
    else:
        _emit(_dump_json(report), st)
    return EXIT_OK if rel <= SPHERE_TOL else EXIT_NUMERICAL


COMMANDS = {
    "constants": cmd_constants,
    "moment": cmd_moment,
    "sweep": cmd_sweep,
    "fieldslice": cmd_fieldslice,
    "dstar": cmd_dstar,
    "gordon-check": cmd_gordon_check,
    "sphere-oracle": cmd_sphere_oracle,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        return COMMANDS[cfg.command](cfg.scales, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"spinor-moment: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BracketError, ConvergenceError, TaylorValidityError, NumericalFailure, FloatingPointError) as exc:
        print(f"spinor-moment: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
