"""Batch command-line front end.

Exit codes: 0 success, 1 usage or validation error, 2 numerical contract
violation.  Every output embeds the resolved configuration; CSV files carry it
as a ``# config:`` comment line above the header.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import typing
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import cpcheck, decoherence, qnd, scattering, states, symmap
from .csvio import render_csv
from .decoherence import ContractViolation
from .pairspace import DimensionError
from .verify import run_suites

THREADS_ENV = "SYMFLOW_THREADS"

_FLAG_NAMES = {"F_n": "--f-n", "F_minus_n": "--f-minus-n"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _scalar_type(ann):
    args = [a for a in typing.get_args(ann) if a is not type(None)]
    if typing.get_origin(ann) is typing.Literal:
        return type(args[0])
    if typing.get_origin(ann) is typing.Union and len(args) == 1:
        return _scalar_type(args[0])
    return ann if ann in (int, float, str) else str


def _add_model_flags(parser, model):
    for name, info in model.model_fields.items():
        if name == "subcommand":
            continue
        flag = _FLAG_NAMES.get(name, "--" + name.replace("_", "-"))
        kw = {"dest": name, "default": None, "help": f"default: {info.get_default(call_default_factory=True)!r}"}
        if name == "elements":
            parser.add_argument(flag, nargs=2, type=int, action="append", metavar=("I", "J"), **kw)
        elif name in ("F_n", "F_minus_n"):
            parser.add_argument(flag, nargs=2, type=float, metavar=("RE", "IM"), **kw)
        elif name in ("delta_grid", "m_grid", "values"):
            parser.add_argument(flag, nargs="+", type=float, **kw)
        elif name == "scan":
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, **kw)
        elif name == "base":
            parser.add_argument(flag, type=json.loads, **kw)
        else:
            parser.add_argument(flag, type=_scalar_type(info.annotation), **kw)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="symflow", description="Environment-induced symmetrization toolkit.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)
    for name, model in cfgmod.MODELS.items():
        p = sub.add_parser(name, help=(model.__doc__ or "").strip().split("\n")[0] or None)
        p.add_argument("--config", default=None, help="JSON scenario file; flags override its values")
        _add_model_flags(p, model)
    return parser


def resolve(args) -> tuple:
    """Merge the config file with explicit flags; returns (config, overrides)."""
    data = {}
    if args.config:
        loaded = cfgmod.load_config(args.config)
        if loaded.subcommand != args.subcommand:
            raise cfgmod.ConfigError(
                f"subcommand: config file is for {loaded.subcommand!r}, not {args.subcommand!r}"
            )
        data = loaded.model_dump()
    overrides = {k: v for k, v in vars(args).items()
                 if k not in ("subcommand", "config") and v is not None}
    if args.config:
        overrides = {k: v for k, v in overrides.items() if data.get(k) != v}
    cfg = cfgmod.scenario(args.subcommand, data, overrides)
    return cfg, overrides


def provenance(cfg, overrides=None) -> dict:
    return {"config": cfg.model_dump(mode="json"),
            "overrides": sorted(overrides or ())}


# -- scenario runners: each returns (header, rows) ---------------------------------

def _initial_state(cfg):
    return states.random_density(cfg.seed, cfg.d, cfg.kind)


def rows_semigroup(cfg):
    rho = _initial_state(cfg)
    taus = np.linspace(0.0, cfg.tau_max, cfg.samples)
    out = [decoherence.apply_semigroup_symmetrizer(rho, t).matrix for t in taus]
    traj = decoherence.Trajectory(taus, out, rho.basis)
    return decoherence.trajectory_header(cfg.elements), decoherence.trajectory_rows(traj, cfg.elements)


def _random_hamiltonian(cfg):
    n = cfg.d * cfg.d
    if cfg.hamiltonian == "zero" or cfg.h_scale == 0:
        return np.zeros((n, n), dtype=complex)
    rng = np.random.default_rng([cfg.seed, 1])
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = states.operator_symmetrize(0.5 * (g + g.conj().T))
    return h * (cfg.h_scale / np.linalg.norm(h, 2))


def rows_master(cfg):
    rho = _initial_state(cfg)
    params = decoherence.EvolutionParams(_random_hamiltonian(cfg), cfg.gamma, cfg.dt,
                                         cfg.t_max, cfg.sample_every)
    traj = decoherence.integrate_master_equation(rho, params).check()
    return decoherence.trajectory_header(cfg.elements), decoherence.trajectory_rows(traj, cfg.elements)


def rows_qnd(cfg):
    lo = cfg.theta_min if cfg.theta_min is not None else cfg.theta_max / cfg.samples
    thetas = np.linspace(lo, cfg.theta_max, cfg.samples)
    model = qnd.SpectralModel(cfg.g, cfg.b, cfg.cutoff)
    return qnd.CURVE_HEADER, qnd.curve_rows(model, thetas)


def rows_symmap(cfg):
    if cfg.state == "balanced_paos":
        sigma = symmap.balanced_paos(cfg.seed, cfg.d)
    else:
        sigma = states.random_density(cfg.seed, cfg.d, cfg.state)
    sched = symmap.builtin_schedule(cfg.schedule, cfg.kappa)
    report = symmap.entropy_trajectory(sigma, sched, np.linspace(0.0, cfg.t_max, cfg.samples))
    if report.max_trace_drift > 1e-10:
        raise ContractViolation(f"trace drift {report.max_trace_drift:.3e} exceeds 1e-10")
    if min(report.min_eigenvalue) < -1e-9:
        raise ContractViolation(f"negative eigenvalue {min(report.min_eigenvalue):.3e}")
    return symmap.MapReport.HEADER, report.rows()


def collision_config(cfg) -> scattering.CollisionConfig:
    if cfg.F_n is None:
        fn, fm = scattering.amplitudes_from_unitary(scattering.random_exchange_unitary(cfg.seed))
    else:
        fn, fm = complex(*cfg.F_n), complex(*cfg.F_minus_n)
    rate = cfg.tau_rate if cfg.tau_rate is not None else 2 * math.pi * cfg.g / cfg.b
    return scattering.CollisionConfig(cfg.spin_s, cfg.epsilon, fn, fm,
                                      symmap.builtin_schedule(cfg.schedule, cfg.kappa),
                                      scattering.LinearTau(rate))


def rows_scatter(cfg):
    times = np.linspace(0.0, cfg.t_max, cfg.samples)
    return scattering.SCATTER_HEADER, scattering.scatter_rows(collision_config(cfg), times)


def rows_cpcheck(cfg):
    if cfg.scan:
        return cpcheck.SCAN_HEADER, cpcheck.scan(cfg.delta_grid, cfg.m_grid)
    return cpcheck.SCAN_HEADER, [cpcheck.scan_cell(cfg.delta, cfg.m)]


ROWS = {
    "evolve-semigroup": rows_semigroup,
    "evolve-master": rows_master,
    "qnd": rows_qnd,
    "symmap": rows_symmap,
    "scatter": rows_scatter,
    "cpcheck": rows_cpcheck,
}


def worker_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return min(4, os.cpu_count() or 1)
    try:
        n = int(raw)
    except ValueError:
        raise cfgmod.ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise cfgmod.ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return n


def rows_sweep(cfg):
    scenarios = [cfgmod.scenario(cfg.target, cfg.base, {cfg.param: v}) for v in cfg.values]
    runner = ROWS[cfg.target]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        # map yields in submission order, so the merge follows parameter order
        results = list(pool.map(runner, scenarios))
    header = (cfg.param,) + tuple(results[0][0])
    rows = [[v] + list(r) for v, (_, rs) in zip(cfg.values, results) for r in rs]
    return header, rows


ROWS["sweep"] = rows_sweep


def execute(cfg, overrides=None) -> tuple[str, int]:
    """Run a resolved scenario; returns (text output, exit code)."""
    prov = provenance(cfg, overrides)
    if cfg.subcommand == "verify":
        report = run_suites(cfg.d, cfg.seed)
        report.update(prov)
        return json.dumps(report, indent=2, sort_keys=True) + "\n", 0 if report["passed"] else 2
    if cfg.subcommand == "cpcheck" and not cfg.scan:
        cert = cpcheck.certify(cpcheck.build_witness(cfg.delta, cfg.m))
        cert.update(prov)
        code = 0 if cert["verdicts"]["formulas_match"] else 2
        return json.dumps(cert, indent=2, sort_keys=True) + "\n", code
    header, rows = ROWS[cfg.subcommand](cfg)
    return render_csv(header, rows, prov), 0


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg, overrides = resolve(args)
        text, code = execute(cfg, overrides)
    except UsageError as err:
        print(err, file=sys.stderr)
        return 1
    except ContractViolation as err:
        print(f"contract violation: {err}", file=sys.stderr)
        return 2
    except (cfgmod.ConfigError, states.PreconditionError, states.InvalidStateError,
            DimensionError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    if cfg.out:
        with open(Path(cfg.out), "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
