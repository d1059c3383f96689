"""Command-line front end.

Exit codes: 0 on success, 1 on invalid input (the message names the field
or path), 2 when ``solve-instance`` finds the instance infeasible.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from .channel import ChannelSet, ConfigError, SystemConfig, sample_network
from .dualsolver import CanonicalProblem, solve_canonical
from .experiments import (DEFAULT_OUTAGE_TRIALS, DEFAULT_RATE_TRIALS, REGION_SCHEMES, SCHEMES,
                          SweepSpec, emit_table, region_table, run_sweep, solve_link,
                          table_to_csv)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SUBCOMMANDS = ("rate-region", "sweep-power", "sweep-noise", "outage", "antenna-config",
               "solve-canonical", "solve-instance")
SWEEP_KEYS = ("variable", "values", "schemes", "n_trials", "seed", "metric", "n_points",
              "workers")

_SWEEP_DEFAULTS = {
    "sweep-power": dict(variable="pc_db", values=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0],
                        schemes=["HD-AF", "HD-DF", "FD-AF", "FD-DF", "HYBRID-AF",
                                 "HYBRID-DF", "ORTHOGONAL"],
                        metric="mean_cu_rate", n_trials=DEFAULT_RATE_TRIALS),
    "sweep-noise": dict(variable="eps2", values=[1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1],
                        schemes=["HD-AF", "HD-DF", "FD-AF", "FD-DF", "HYBRID-AF",
                                 "HYBRID-DF"],
                        metric="mean_cu_rate", n_trials=DEFAULT_RATE_TRIALS),
    "outage": dict(variable="pc_db", values=[0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
                   schemes=["HD-AF", "HD-DF", "FD-AF", "FD-DF", "HYBRID-AF", "HYBRID-DF",
                            "DIRECT"],
                   metric="pu_outage", n_trials=DEFAULT_OUTAGE_TRIALS),
    "antenna-config": dict(variable="antenna_split", values=None,
                           schemes=["FD-AF", "FD-DF", "HD-AF", "HD-DF"],
                           metric="mean_cu_rate", n_trials=DEFAULT_RATE_TRIALS),
}


class UsageError(Exception):
    """Invalid invocation; reported on stderr with exit code 1."""


def default_config_text() -> str:
    def val(v):
        return json.dumps(v)

    lines = ["[system]"]
    for f in dataclasses.fields(SystemConfig):
        lines.append(f"{f.name} = {val(getattr(SystemConfig(), f.name))}")
    lines += ["", "[sweep]", "seed = 0", "# n_trials = 1000", "# values = [0.0, 10.0, 20.0]",
              '# schemes = ["HD-DF", "FD-DF"]', "# n_points = 41", "# workers = 1"]
    return "\n".join(lines) + "\n"


def load_config(path: str | None) -> tuple[SystemConfig, dict]:
    if path is None:
        return SystemConfig(), {}
    p = Path(path)
    try:
        with p.open("rb") as fh:
            doc = tomllib.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {p}") from None
    except OSError as exc:
        raise UsageError(f"cannot read config file {p}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config file {p} is not valid TOML: {exc}") from None
    unknown = set(doc) - {"system", "sweep"}
    if unknown:
        raise ConfigError(sorted(unknown)[0], f"unknown section in {p}")
    system = doc.get("system", {})
    sweep = doc.get("sweep", {})
    for k in sweep:
        if k not in SWEEP_KEYS:
            raise ConfigError(f"sweep.{k}", "unknown sweep key")
    try:
        cfg = SystemConfig.from_dict(system)
    except ConfigError as exc:
        raise ConfigError(f"system.{exc.field}", str(exc).split(": ", 1)[-1]) from None
    except TypeError as exc:
        raise ConfigError("system", str(exc)) from None
    return cfg, sweep


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cogrelay",
                                 description="Cognitive relay beamforming simulator.")
    ap.add_argument("--print-default-config", action="store_true",
                    help="print the default configuration as TOML and exit")
    sub = ap.add_subparsers(dest="subcommand")
    for name in SUBCOMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="TOML file with [system] and [sweep] sections")
        sp.add_argument("--out", help="output path (CSV for tables, JSON for solves)")
        sp.add_argument("--seed", type=int, help="base random seed")
        sp.add_argument("--trials", type=int, help="Monte Carlo trials per point")
        sp.add_argument("--print-default-config", action="store_true",
                        help="print the default configuration as TOML and exit")
        if name == "solve-canonical":
            sp.add_argument("--input", required=False,
                            help="JSON file with a two-user problem (h1, h2, c, gamma1, p_total)")
        if name == "solve-instance":
            sp.add_argument("--scheme", default="HD-DF",
                            choices=[s for s in SCHEMES if s not in ("ORTHOGONAL", "DIRECT")])
            sp.add_argument("--channels", help="JSON channel set; default draws one from --seed")
    return ap


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from None


def _sweep_spec(cmd: str, cfg: SystemConfig, sweep: dict, args) -> tuple[SweepSpec, int | None]:
    d = dict(_SWEEP_DEFAULTS[cmd])
    if cmd == "antenna-config":
        d["values"] = list(range(1, cfg.n_total))
    for k in ("values", "schemes", "n_trials", "seed"):
        if k in sweep:
            d[k] = sweep[k]
    if "metric" in sweep:
        d["metric"] = sweep["metric"]
    if "variable" in sweep and sweep["variable"] != d["variable"]:
        raise ConfigError("sweep.variable", f"{cmd} sweeps {d['variable']}, "
                                            f"got {sweep['variable']!r}")
    if args.trials is not None:
        d["n_trials"] = args.trials
    if args.seed is not None:
        d["seed"] = args.seed
    d.setdefault("seed", 0)
    if not isinstance(d["values"], list):
        raise ConfigError("sweep.values", "must be a list")
    if not isinstance(d["schemes"], list):
        raise ConfigError("sweep.schemes", "must be a list")
    try:
        spec = SweepSpec(variable=d["variable"], values=d["values"], schemes=d["schemes"],
                         n_trials=d["n_trials"], seed=d["seed"], metric=d["metric"])
    except ConfigError as exc:
        raise ConfigError(f"sweep.{exc.field}", str(exc).split(": ", 1)[-1]) from None
    if cmd == "antenna-config":
        for v in spec.values:
            if not (isinstance(v, int) and 1 <= v < cfg.n_total):
                raise ConfigError("sweep.values",
                                  f"antenna split {v!r} must be an integer in [1, {cfg.n_total - 1}]")
    workers = sweep.get("workers")
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise ConfigError("sweep.workers", "must be an integer >= 1")
    return spec, workers


def _vec_json(v) -> list:
    return [[float(z.real), float(z.imag)] for z in np.ravel(v)]


def _run(argv) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    if args.print_default_config:
        sys.stdout.write(default_config_text())
        return 0
    if args.subcommand is None:
        ap.print_usage(sys.stderr)
        raise UsageError("a subcommand is required")
    if args.trials is not None and args.trials < 1:
        raise ConfigError("--trials", "must be >= 1")
    cmd = args.subcommand

    if cmd == "solve-canonical":
        src = args.input or args.config
        if src is None:
            raise UsageError("solve-canonical needs --input <problem.json>")
        try:
            doc = json.loads(Path(src).read_text())
        except FileNotFoundError:
            raise UsageError(f"problem file not found: {src}") from None
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot parse problem file {src}: {exc}") from None
        try:
            prob = CanonicalProblem.from_dict(doc)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"invalid problem in {src}: {exc}") from None
        sol = solve_canonical(prob)
        _write(json.dumps(sol.to_dict(), indent=2) + "\n", args.out)
        return 0

    cfg, sweep = load_config(args.config)
    seed = args.seed if args.seed is not None else sweep.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed", f"must be a nonnegative integer, got {seed!r}")

    if cmd == "solve-instance":
        if args.channels:
            try:
                ch = ChannelSet.from_json(Path(args.channels).read_text())
            except FileNotFoundError:
                raise UsageError(f"channel file not found: {args.channels}") from None
            except (OSError, ValueError, KeyError, TypeError) as exc:
                raise UsageError(f"invalid channel file {args.channels}: {exc}") from None
            if ch.n_total != cfg.n_total or ch.n_tx != cfg.n_tx_fd:
                raise ConfigError("channels", "antenna counts do not match the configuration")
        else:
            ch = sample_network(cfg, seed)
        sol = solve_link(ch, cfg, args.scheme)
        doc = {"scheme": args.scheme, "seed": seed, **sol.to_dict()}
        _write(json.dumps(doc, indent=2) + "\n", args.out)
        return 0 if sol.feasible else 2

    if cmd == "rate-region":
        schemes = sweep.get("schemes", list(REGION_SCHEMES))
        if not isinstance(schemes, list) or any(s not in REGION_SCHEMES for s in schemes):
            raise ConfigError("sweep.schemes", f"rate regions support {REGION_SCHEMES}")
        n_points = sweep.get("n_points", 41)
        if not isinstance(n_points, int) or n_points < 2:
            raise ConfigError("sweep.n_points", "must be an integer >= 2")
        table = region_table(sample_network(cfg, seed), cfg, schemes, n_points, seed)
    else:
        spec, workers = _sweep_spec(cmd, cfg, sweep, args)
        table = run_sweep(cfg, spec, workers=workers)

    if args.out is None:
        sys.stdout.write(table_to_csv(table))
    else:
        emit_table(table, args.out)
    return 0


def run(argv=None) -> int:
    """Entry point returning the process exit code."""
    try:
        return _run(argv)
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse reports its own errors; map them onto the validation code
        return 0 if exc.code in (0, None) else 1


def main() -> None:
    sys.exit(run())
