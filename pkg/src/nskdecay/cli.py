"""Command-line front end: ``nskdecay <subcommand> --config cfg.json --out DIR``.

Exit codes: 0 success, 1 an asserted check failed (or was inconclusive
under ``--strict``), 2 configuration error, 3 numerical/runtime error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import spectral
from .experiments import (
    high_band_experiment,
    kernel_experiment,
    linear_decay_experiment,
    modecheck,
    nonlinear_decay_experiment,
)
from .io import RunManifest, write_json, write_rows, write_series_csv, write_state
from .kernels import kernel_slice
from .params import ParameterError, VacuumError, derive_constants, parameters_from_mapping
from .spectral import Band, Grid

log = logging.getLogger("nskdecay")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def _require(cfg: dict, dotted: str):
    node = cfg
    for part in dotted.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"missing required config field '{dotted}'")
        node = node[part]
    return node


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def effective_config(args) -> dict:
    cfg = load_config(args.config)
    for key in ("seed", "threads"):
        val = getattr(args, key)
        if val is not None:
            cfg[key] = val
    cfg.setdefault("seed", 0)
    return cfg


def _physics(cfg):
    try:
        phys = parameters_from_mapping(_require(cfg, "params"))
    except KeyError as exc:
        raise ConfigError(f"missing required config field 'params.{exc.args[0]}'") from exc
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc
    return phys


def _grid(cfg, n):
    N = int(_require(cfg, "grid.N"))
    L = float(_require(cfg, "grid.L"))
    try:
        return Grid(n, N, L)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _validate(command: str, cfg: dict):
    """Parse every field the command needs before any computation."""
    if command == "modecheck":
        return {}
    phys = _physics(cfg)
    grid = _grid(cfg, phys.n)
    run = cfg.get("run", {})
    if command in ("linear-decay", "nonlinear", "kernel"):
        _require(cfg, "run.T")
    try:
        grid.check_bands_representable(derive_constants(phys))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return {"phys": phys, "grid": grid, "run": run}


def _window(run):
    w = run.get("window")
    return tuple(w) if w else None


def _emit_report(rep, out: Path, manifest: RunManifest, cfg: dict):
    d = rep.to_dict()
    d["effective_config"] = cfg
    manifest.add(write_json(out / "report.json", d))
    for s in rep.series:
        manifest.add(write_series_csv(out / f"series_{s.quantity}.csv", s))
    manifest.add(write_rows(out / "checks.csv", ["name", "measured", "expected", "bound", "tol", "r2", "verdict"],
                            [(c.name, c.measured, c.expected, c.bound, c.tol, c.r2, c.verdict.value)
                             for c in rep.checks]))
    for c in rep.checks:
        print(f"{c.verdict.value:12s} {c.name}: measured={c.measured:.4g} expected={c.expected}")


def cmd_linear_decay(cfg, ctx, out, manifest):
    run = ctx["run"]
    rep = linear_decay_experiment(ctx["phys"], ctx["grid"], float(run["T"]), run.get("ic"),
                                  int(run.get("samples", 40)), float(run.get("t_start", 1.0)),
                                  _window(run), int(cfg["seed"]),
                                  tuple(run["quantities"]) if "quantities" in run else None)
    _emit_report(rep, out, manifest, cfg)
    return rep


def cmd_nonlinear(cfg, ctx, out, manifest):
    run = ctx["run"]
    rep = nonlinear_decay_experiment(
        ctx["phys"], ctx["grid"], float(run["T"]), float(run.get("dt", 0.5)), float(run.get("eps", 1e-3)),
        run.get("ic"), int(cfg["seed"]), _window(run), float(run.get("log_every", 1.0)),
        bool(run.get("halve_amplitude", True)))
    _emit_report(rep, out, manifest, cfg)
    return rep


def cmd_kernel(cfg, ctx, out, manifest):
    run = ctx["run"]
    grid, phys = ctx["grid"], ctx["phys"]
    rep = kernel_experiment(phys, grid, float(run["T"]), float(run.get("t_start", 2.0)),
                            int(run.get("samples", 16)), _window(run))
    _emit_report(rep, out, manifest, cfg)
    ks = kernel_slice(run.get("component", "K_psi"), Band.LOW, float(run["T"]), grid=grid,
                      dp=derive_constants(phys))
    r, v = ks.radial_profile()
    manifest.add(write_rows(out / "kernel_radial_profile.csv", ["r", "value"], zip(r.tolist(), v.tolist())))
    st = spectral.State(grid, ks.values, np.zeros((grid.n,) + grid.shape))
    manifest.add(write_state(out / "kernel_slice.bin", st))
    return rep


def cmd_highband(cfg, ctx, out, manifest):
    run = ctx["run"]
    rep = high_band_experiment(ctx["phys"], ctx["grid"], float(run.get("T", 20.0)), int(cfg["seed"]),
                               float(run.get("t_min", 1e-3)), int(run.get("samples", 30)),
                               float(run.get("sigma0", 0.25)))
    _emit_report(rep, out, manifest, cfg)
    table = rep.extras["smoothing_table"]
    manifest.add(write_rows(out / "smoothing_table.csv", ["variant", "exponent", "sup", "sup_halved", "drift"],
                            [(r["variant"], r["exponent"], r["sup"], r["sup_halved"], r["drift"]) for r in table]))
    return rep


def cmd_modecheck(cfg, ctx, out, manifest):
    run = cfg.get("run", {})
    res = modecheck(int(run.get("samples", 10_000)), int(cfg["seed"]), int(run.get("n", 3)))
    res["effective_config"] = cfg
    manifest.add(write_json(out / "report.json", res))
    print(f"max relative error vs oracle: {res['max_rel_err_oracle']:.3e} "
          f"({'PASS' if res['passed'] else 'FAIL'})")
    return res


COMMANDS = {
    "linear-decay": cmd_linear_decay,
    "nonlinear": cmd_nonlinear,
    "kernel": cmd_kernel,
    "highband": cmd_highband,
    "modecheck": cmd_modecheck,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", default="out", help="output directory")
    common.add_argument("--seed", type=int, help="random seed (overrides config)")
    common.add_argument("--threads", type=int, help="FFT worker threads (overrides config)")
    common.add_argument("--dry-run", action="store_true", help="validate and write the manifest only")
    common.add_argument("--strict", action="store_true", help="treat INCONCLUSIVE as failure")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="nskdecay", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    out = Path(args.out)
    try:
        cfg = effective_config(args)
        ctx = _validate(args.command, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    spectral.FFT_WORKERS = int(cfg.get("threads", os.cpu_count() or 1))
    manifest = RunManifest(args.command, args.config, out, int(cfg["seed"]))
    manifest.write()
    if args.dry_run:
        manifest.finalize("dry-run")
        return EXIT_OK
    try:
        result = COMMANDS[args.command](cfg, ctx, out, manifest)
    except (VacuumError, FloatingPointError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        manifest.finalize("error")
        return EXIT_RUNTIME
    if isinstance(result, dict):
        failed = not result["passed"]
    else:
        failed = result.failed(strict=args.strict)
    manifest.finalize("failed" if failed else "passed")
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
