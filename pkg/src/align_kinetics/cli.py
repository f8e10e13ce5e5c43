"""Command-line driver: coefficient tables, spectra, rates and simulations.

Parameters come from built-in defaults, then an optional JSON config file,
then explicit flags (flags win).  Every command writes one table, as CSV by
default, to ``--out`` or stdout.

Exit codes: 0 success, 1 usage, 2 numerical failure, 3 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import AlignKineticsError, ConfigurationError, InvalidInputError
from .tables import TableIOError, emit_json, emit_table

CONFIG_VERSION = 1

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _float_list(text):
    return [float(t) for t in str(text).replace(",", " ").split()]


def _int_list(text):
    return [int(t) for t in str(text).replace(",", " ").split()]


# name -> (type, default, help); shared keys first, then per command
_COMMON = {
    "n": (int, 3, "dimension of the velocity sphere"),
    "grid_N": (int, None, "angular grid size (command default if omitted)"),
    "out": (str, None, "output path (stdout if omitted)"),
    "format": (str, "csv", "csv or json"),
}
_RHO_RANGE = {
    "rho_min": (float, None, "first density of the sweep"),
    "rho_max": (float, None, "last density of the sweep"),
    "rho_steps": (int, None, "number of densities in the sweep"),
}
_COMMANDS = {
    "coeffs": dict(
        _RHO_RANGE,
        help="closure coefficients kappa, c, c_tilde, lambda, gamma, theta_c over a density grid",
    ),
    "spectrum": {
        "kappa": (_float_list, None, "concentrations (default 0 .. 10 step 0.25)"),
        "help": "Poincare constants lambda_0, lambda_1 and their minimum",
    },
    "rates": dict(
        _RHO_RANGE,
        eps=(float, 1.0, "time-scale parameter"),
        all_n=(bool, False, "sweep n = 2, 3, 4 instead of a single n"),
        help="relaxation rate r(rho) toward equilibrium",
    ),
    "kinetic": {
        "rho": (float, 2.0, "density"),
        "T": (float, 8.0, "final time"),
        "dt": (float, 1e-3, "time step"),
        "init": (str, "perturbed", "perturbed, zero-flux or vmf"),
        "amplitude": (float, 0.1, "perturbation amplitude"),
        "kappa": (_float_list, None, "concentration of the vmf initial state"),
        "record_every": (int, 10, "steps between recorded rows"),
        "help": "homogeneous kinetic relaxation run with a fitted decay rate",
    },
    "particles": {
        "rho": (float, 4.0, "density"),
        "Np": (int, 20000, "number of particles"),
        "T": (float, 40.0, "final time"),
        "dt": (float, 0.005, "time step"),
        "burn_in": (float, None, "start of the averaging window (default T/2)"),
        "init": (str, "uniform", "uniform or aligned"),
        "seed": (int, 0, "random seed"),
        "record_every": (int, 20, "steps between recorded rows"),
        "help": "homogeneous particle simulation with the order parameter time series",
    },
    "hyper-map": dict(
        _RHO_RANGE,
        theta_steps=(int, 50, "number of direction cells on [0, pi/2]"),
        eps=(float, 1e-3, "scaling parameter setting the threshold buffer"),
        help="map of (rho, theta) to the applicable macroscopic regime",
    ),
    "diffusion": {
        "eps": (float, 1.0, "scaling parameter"),
        "rho0": (float, 1.0, "background density"),
        "amplitude": (float, 0.1, "amplitude of the cosine perturbation"),
        "cells": (int, 128, "number of periodic cells"),
        "length": (float, 2 * math.pi, "domain length"),
        "T": (float, 1.0, "final time"),
        "dt": (float, 1e-3, "time step"),
        "dumps": (int, 5, "number of output times after the initial one"),
        "help": "disordered-region nonlinear diffusion on a periodic interval",
    },
    "hydro": {
        "rho0": (float, 6.0, "background density"),
        "theta0": (float, 0.3, "background angle to the axis"),
        "amplitude": (float, 0.05, "amplitude of the density bump"),
        "cells": (int, 400, "number of periodic cells"),
        "length": (float, 20.0, "domain length"),
        "T": (float, 2.0, "final time"),
        "cfl": (float, 0.5, "CFL number"),
        "dumps": (int, 4, "number of output times after the initial one"),
        "help": "ordered-region hydrodynamics in one space dimension",
    },
    "validate": {
        "only": (_int_list, None, "criterion numbers to run (default all)"),
        "help": "run the acceptance criteria and print a pass/fail table",
    },
}


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    version: int = CONFIG_VERSION

    def __getitem__(self, key):
        return self.params[key]

    def get(self, key, default=None):
        v = self.params.get(key)
        return default if v is None else v


def _param_table(command):
    table = dict(_COMMON)
    table.update({k: v for k, v in _COMMANDS[command].items() if k != "help"})
    return table


def _flag(name):
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="align-kinetics", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True
    for command, entries in _COMMANDS.items():
        p = sub.add_parser(command, help=entries["help"], description=entries["help"])
        p.add_argument("--config", default=argparse.SUPPRESS, help="JSON file with parameters")
        for name, (typ, default, text) in _param_table(command).items():
            label = f"{text} [default: {default}]" if default is not None else text
            if typ is bool:
                p.add_argument(_flag(name), dest=name, action="store_true", default=argparse.SUPPRESS, help=text)
            elif typ in (_float_list, _int_list):
                p.add_argument(_flag(name), dest=name, nargs="+", default=argparse.SUPPRESS, help=label)
            else:
                p.add_argument(_flag(name), dest=name, type=typ, default=argparse.SUPPRESS, help=label)
    return parser


def _coerce(name, typ, value):
    try:
        if typ is bool:
            if not isinstance(value, bool):
                raise ValueError
            return value
        if typ in (_float_list, _int_list):
            items = value if isinstance(value, list) else [value]
            return [x for item in items for x in typ(item)]
        if typ is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return typ(value)
    except (TypeError, ValueError):
        raise UsageError(f"invalid value for {name!r}: {value!r}") from None


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise TableIOError(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"config {path} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def resolve_config(command: str, flags: dict, config_path=None) -> RunConfig:
    """Merge defaults, the JSON file and flags; unknown keys are usage errors."""
    table = _param_table(command)
    params = {k: v[1] for k, v in table.items()}
    version = CONFIG_VERSION
    if config_path is not None:
        data = load_config(config_path)
        version = data.pop("version", CONFIG_VERSION)
        if version != CONFIG_VERSION:
            raise UsageError(f"unsupported config version {version!r}")
        data.pop("command", None)
        for raw_key, value in data.items():
            key = raw_key.replace("-", "_")
            if key not in table:
                raise UsageError(f"unknown config key {raw_key!r} for command {command!r}")
            params[key] = _coerce(raw_key, table[key][0], value)
    for key, value in flags.items():
        params[key] = _coerce(key, table[key][0], value)
    if params["format"] not in ("csv", "json"):
        raise UsageError(f"invalid value for 'format': {params['format']!r} (choose csv or json)")
    return RunConfig(command, params, version)


# ---------------------------------------------------------------- commands


def _rho_grid(cfg: RunConfig, lo: float, hi: float, steps: int) -> np.ndarray:
    lo = cfg.get("rho_min", lo)
    hi = cfg.get("rho_max", hi)
    steps = cfg.get("rho_steps", steps)
    if steps < 1 or hi < lo or (steps > 1 and hi == lo):
        raise UsageError(f"empty density range: rho_min={lo}, rho_max={hi}, rho_steps={steps}")
    return np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])


def _cmd_coeffs(cfg):
    from .gci import coefficient_arrays

    n = cfg["n"]
    rho = _rho_grid(cfg, n + 0.05, 10.0 * n, 100)
    if rho[0] <= n:
        raise UsageError(f"closure coefficients need rho_min > n = {n}")
    d = coefficient_arrays(n, rho, cfg.get("grid_N", 3000))
    schema = ("kappa", "rho", "c", "c_tilde", "lambda", "gamma", "theta_c")
    rows = zip(d["kappa"], d["rho"], d["c"], d["c_tilde"], d["lam"], d["gamma"], d["theta_c"])
    return schema, list(rows), f"closure coefficients of the ordered hydrodynamics, n={n}"


def _cmd_spectrum(cfg):
    from .spectrum import poincare_constant

    n = cfg["n"]
    kappas = cfg.get("kappa") or list(np.linspace(0.0, 10.0, 41))
    if any(k < 0 for k in kappas):
        raise UsageError("kappa values must be >= 0")
    N = cfg.get("grid_N", 300)
    rows = []
    for k in kappas:
        s = poincare_constant(n, float(k), N)
        rows.append((float(k), s.lambda_0, s.lambda_1, s.poincare))
    return ("kappa", "lambda_0", "lambda_1", "Lambda"), rows, f"Poincare constants of the VMF-weighted Laplacian, n={n}, N={N}"


def _cmd_rates(cfg):
    from .spectrum import convergence_rate

    dims = (2, 3, 4) if cfg.get("all_n") else (cfg["n"],)
    rho = _rho_grid(cfg, 0.0, 3.0 * max(dims), 121)
    if rho[0] < 0:
        raise UsageError("densities must be >= 0")
    eps = cfg["eps"]
    N = cfg.get("grid_N", 300)
    rows = []
    for n in dims:
        for r in rho:
            res = convergence_rate(n, float(r), eps, N=N)
            rows.append((n, float(r), res.rate, res.kind.value))
    return ("n", "rho", "rate", "kind"), rows, f"relaxation rate toward equilibrium, eps={eps:g}"


def _cmd_kinetic(cfg):
    from .kinetic import CSV_COLUMNS, KINETIC_N, AxisymState, perturbed_uniform, relax_and_fit

    n, N = cfg["n"], cfg.get("grid_N", KINETIC_N)
    init = cfg["init"]
    if init == "perturbed":
        g0 = perturbed_uniform(n, cfg["amplitude"], N)
    elif init == "zero-flux":
        g0 = perturbed_uniform(n, cfg["amplitude"], N, degree=2)
    elif init == "vmf":
        kappa = cfg.get("kappa") or [1.0]
        if len(kappa) != 1:
            raise UsageError("vmf initial state takes a single kappa")
        g0 = AxisymState.vmf(n, kappa[0], N)
    else:
        raise UsageError(f"invalid value for 'init': {init!r}")
    r = relax_and_fit(n, cfg["rho"], g0, cfg["T"], cfg["dt"], record_every=cfg["record_every"])
    comment = (
        f"homogeneous kinetic relaxation, n={n}, rho={cfg['rho']:g}, N={N}, dt={cfg['dt']:g}\n"
        f"fit kind={r.kind.value} value={r.value:.8g} mass_drift={r.mass_drift:.3e}"
    )
    return CSV_COLUMNS, r.rows(), comment


def _cmd_particles(cfg):
    from .equilibria import kappa_of_rho
    from .particles import run_homogeneous
    from .quadrature import order_parameter

    if cfg["init"] not in ("uniform", "aligned"):
        raise UsageError(f"invalid value for 'init': {cfg['init']!r}")
    n = cfg["n"]
    run = run_homogeneous(
        n, cfg["Np"], cfg["rho"], cfg["T"], cfg["dt"], cfg["seed"],
        burn_in=cfg.get("burn_in"), init=cfg["init"], record_every=cfg["record_every"],
    )
    k = kappa_of_rho(cfg["rho"], n).kappa
    target = float(order_parameter(k, n)) if k > 0 else 0.0
    schema = ("time", "order", *(f"dir_{i}" for i in range(n)))
    comment = (
        f"homogeneous particle run, n={n}, Np={cfg['Np']}, rho={cfg['rho']:g}, dt={cfg['dt']:g}, seed={cfg['seed']}\n"
        f"stationary order={run.stationary_order:.8g} kinetic prediction={target:.8g}"
    )
    return schema, run.rows(), comment


def _cmd_hyper_map(cfg):
    from .macro import region_map

    n = cfg["n"]
    lo, hi, steps = cfg.get("rho_min", 0.0), cfg.get("rho_max", 4.0 * n), cfg.get("rho_steps", 50)
    _rho_grid(cfg, lo, hi, steps)
    m = region_map(
        n, (lo, hi), (0.0, math.pi / 2), eps=cfg["eps"], rho_cells=steps,
        theta_cells=cfg["theta_steps"], N=cfg.get("grid_N", 3000),
    )
    comment = f"macroscopic regimes over density and direction angle, n={n}, eps={cfg['eps']:g}, buffer={m.buffer:.6g}"
    return ("rho", "theta", "label"), m.rows(), comment


def _dump_times(T, dumps):
    if not T > 0 or dumps < 1:
        raise UsageError("T must be > 0 and dumps >= 1")
    return [T * k / dumps for k in range(dumps + 1)]


def _cmd_diffusion(cfg):
    from .macro import DiffusionState1D, diffusion_step

    n, cells, L = cfg["n"], cfg["cells"], cfg["length"]
    if cells < 3 or not L > 0:
        raise UsageError("need cells >= 3 and length > 0")
    x = (np.arange(cells) + 0.5) * L / cells
    rho = cfg["rho0"] + cfg["amplitude"] * np.cos(2 * math.pi * x / L)
    s = DiffusionState1D(rho, L / cells, n, cfg["eps"])
    rows = []
    for t_out in _dump_times(cfg["T"], cfg["dumps"]):
        while s.time < t_out - 1e-12:
            s = diffusion_step(s, min(cfg["dt"], t_out - s.time))
        rows.extend((s.time, xi, ri) for xi, ri in zip(s.x, s.rho))
    comment = f"disordered-region diffusion, n={n}, eps={cfg['eps']:g}, cells={cells}, dt={cfg['dt']:g}, mass={s.mass:.12g}"
    return ("time", "x", "rho"), rows, comment


def _cmd_hydro(cfg):
    from .macro import CoefficientTable, HydroState1D, hydro_step_1d, max_hydro_dt

    n, cells, L = cfg["n"], cfg["cells"], cfg["length"]
    if cells < 3 or not L > 0:
        raise UsageError("need cells >= 3 and length > 0")
    table = CoefficientTable(n, N=cfg.get("grid_N", 3000))
    s = HydroState1D.uniform(n, cells, L, cfg["rho0"], cfg["theta0"])
    bump = cfg["amplitude"] * np.exp(-0.5 * ((s.x - 0.5 * L) / (0.05 * L)) ** 2)
    s = HydroState1D(s.rho + bump, s.u, s.v, s.dx)
    rows = []
    for t_out in _dump_times(cfg["T"], cfg["dumps"]):
        while s.time < t_out - 1e-12:
            s = hydro_step_1d(s, table, min(max_hydro_dt(s, table, cfg["cfl"]), t_out - s.time))
        rows.extend((s.time, xi, ri, ui, *vi) for xi, ri, ui, vi in zip(s.x, s.rho, s.u, s.v))
    schema = ("time", "x", "rho", "u", *(f"v_{i}" for i in range(s.v.shape[1])))
    comment = f"ordered-region hydrodynamics, n={n}, rho0={cfg['rho0']:g}, theta0={cfg['theta0']:g}, cells={cells}"
    return schema, rows, comment


def _cmd_validate(cfg):
    from .acceptance import CRITERIA, run_criteria

    only = cfg.get("only")
    if only:
        unknown = sorted(set(only) - set(CRITERIA))
        if unknown:
            raise UsageError(f"unknown criteria {unknown}; choose from 1..{max(CRITERIA)}")
    results = run_criteria(only)
    for r in results:
        print(r.summary(), file=sys.stderr if cfg.get("out") is None else sys.stdout)
        for line in r.lines:
            print(f"    {line}", file=sys.stderr if cfg.get("out") is None else sys.stdout)
    rows = [(r.number, r.title, r.passed) for r in results]
    passed = all(r.passed for r in results)
    return ("criterion", "title", "passed"), rows, f"acceptance criteria, all passed={str(passed).lower()}"


_HANDLERS = {
    "coeffs": _cmd_coeffs,
    "spectrum": _cmd_spectrum,
    "rates": _cmd_rates,
    "kinetic": _cmd_kinetic,
    "particles": _cmd_particles,
    "hyper-map": _cmd_hyper_map,
    "diffusion": _cmd_diffusion,
    "hydro": _cmd_hydro,
    "validate": _cmd_validate,
}


def run_command(cfg: RunConfig) -> int:
    schema, rows, comment = _HANDLERS[cfg.command](cfg)
    out = cfg.get("out")
    if cfg["format"] == "json":
        emit_json(rows, schema, out, comment)
    else:
        emit_table(rows, schema, out, comment)
    if cfg.command == "validate" and not all(r[2] for r in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = vars(parser.parse_args(argv))
        command = ns.pop("command")
        config_path = ns.pop("config", None)
        cfg = resolve_config(command, ns, config_path)
        return run_command(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidInputError, ConfigurationError) as exc:
        print(f"usage error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TableIOError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AlignKineticsError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
