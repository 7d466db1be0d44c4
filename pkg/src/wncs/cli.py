"""Command-line front end: JSON configs, presets, sweeps, CSV emission.

Config schema (JSON object; see README for the full reference):

    preset        "table1" | "table2" (ignored when "subsystems" is given)
    subsystems    list of {"A": [[..]], "B", "K", "Q", "P", "R", "x0": [..]}
    m, p          resource budget and channel success probability (required)
    t             horizon in slots (default 5000)
    policy        one of the five policy names (default "offset-greedy")
    seed          master seed (default 0)
    replications  seeds per sweep point (default 10)
    divergence_limit  state magnitude guard (default 1e100)
"""

import argparse
import csv
import json
import sys
from pathlib import Path

from .experiment import (
    PRESETS,
    DivergenceError,
    ExperimentConfig,
    run_simulation,
    sweep,
)
from .model import SubsystemSpec
from .offset import OffsetWeightTable
from .policies import POLICY_NAMES


class ConfigError(ValueError):
    pass


_TOP_KEYS = {"preset", "subsystems", "m", "p", "t", "policy", "seed",
             "replications", "divergence_limit"}
_SUBSYSTEM_KEYS = {"A", "B", "K", "Q", "P", "R", "x0"}


def _subsystems_from_entries(entries) -> tuple:
    if not isinstance(entries, list) or not entries:
        raise ConfigError("'subsystems' must be a nonempty list")
    specs = []
    for pos, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ConfigError(f"subsystems[{pos}] must be an object")
        unknown = set(entry) - _SUBSYSTEM_KEYS
        if unknown:
            raise ConfigError(f"subsystems[{pos}]: unknown key {sorted(unknown)[0]!r}")
        missing = _SUBSYSTEM_KEYS - set(entry)
        if missing:
            raise ConfigError(f"subsystems[{pos}]: missing key {sorted(missing)[0]!r}")
        try:
            specs.append(SubsystemSpec(index=pos, **entry))
        except ValueError as err:
            raise ConfigError(f"subsystems[{pos}]: {err}") from err
    return tuple(specs)


def config_from_dict(data: dict) -> ExperimentConfig:
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config key {sorted(unknown)[0]!r}")
    if "subsystems" in data:
        subsystems = _subsystems_from_entries(data["subsystems"])
    else:
        preset = data.get("preset", "table1")
        if preset not in PRESETS:
            raise ConfigError(
                f"preset={preset!r} is not one of {', '.join(sorted(PRESETS))}"
            )
        subsystems = PRESETS[preset]()
    for key in ("m", "p"):
        if key not in data:
            raise ConfigError(f"missing required config key {key!r}")
    try:
        return ExperimentConfig(
            subsystems=subsystems,
            m=data["m"],
            p=data["p"],
            t=data.get("t", 5000),
            policy=data.get("policy", "offset-greedy"),
            master_seed=data.get("seed", 0),
            replications=data.get("replications", 10),
            divergence_limit=data.get("divergence_limit", 1e100),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err


def parse_config(text: str) -> ExperimentConfig:
    """Validated config from JSON text."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    return config_from_dict(data)


def config_to_json(config: ExperimentConfig) -> str:
    """JSON text that parse_config() reads back to an equal config."""
    data = {
        "subsystems": [
            {name: getattr(s, name).tolist() for name in ("A", "B", "K", "Q", "P", "R", "x0")}
            for s in config.subsystems
        ],
        "m": config.m,
        "p": config.p,
        "t": config.t,
        "policy": config.policy,
        "seed": config.master_seed,
        "replications": config.replications,
        "divergence_limit": config.divergence_limit,
    }
    return json.dumps(data, indent=2)


def emit_csv(results, path) -> None:
    """Per-run result rows with the fixed header; full float precision."""
    results = list(results)
    if not results:
        raise ValueError(f"no results to write to {path}")
    n = len(results[0].per_subsystem_lq)
    header = ["policy", "p", "M", "seed", "empiric_offset", "empiric_lq"]
    header += [f"J_{i + 1}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in results:
            if len(r.per_subsystem_lq) != n:
                raise ValueError("results mix different subsystem counts")
            row = [r.policy, r.p, r.m, r.seed, r.empiric_offset, r.empiric_lq]
            row += list(r.per_subsystem_lq)
            writer.writerow(row)


def emit_trace_csv(trace, path) -> None:
    """Per-slot trace rows (k, i, delta, alpha, beta, offset_term, lq_term)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "i", "delta", "alpha", "beta", "offset_term", "lq_term"])
        t, n = trace.delta.shape
        for k in range(t):
            for i in range(n):
                writer.writerow([
                    k, i + 1, int(trace.delta[k, i]),
                    int(trace.alpha[k, i]), int(trace.beta[k, i]),
                    float(trace.offset_term[k, i]), float(trace.lq_term[k, i]),
                ])


def emit_weights_csv(subsystems, max_age: int, path) -> None:
    """Offset weights and their running sums for ages 0..max_age."""
    table = OffsetWeightTable(subsystems)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "weight", "cumulative"])
        for i in range(len(table.specs)):
            for j in range(max_age + 1):
                writer.writerow([i + 1, j, table.weight(i, j),
                                 table.cumulative_offset(i, j + 1)])


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wncs",
        description="Multi-loop wireless networked control: simulation and scheduling sweeps.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, sweep_mode: bool):
        p.add_argument("--config", type=Path, help="JSON config file")
        p.add_argument("--preset", choices=sorted(PRESETS), help="subsystem table preset")
        p.add_argument("--policy", action="append" if sweep_mode else "store",
                       choices=POLICY_NAMES,
                       help="scheduling policy" + (" (repeatable)" if sweep_mode else ""))
        p.add_argument("--p", action="append", type=float, dest="p_values",
                       help="channel success probability (repeatable for sweeps)")
        p.add_argument("--m", action="append", type=int, dest="m_values",
                       help="per-slot resource budget (repeatable for sweeps)")
        p.add_argument("--t", type=int, help="horizon in slots")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--reps", type=int, help="replication count (seed, seed+1, ...)")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")

    run_p = sub.add_parser("run", help="single simulation; writes results.csv and trace.csv")
    add_common(run_p, sweep_mode=False)
    sweep_p = sub.add_parser("sweep", help="policy/p/M/seed grid; writes results.csv")
    add_common(sweep_p, sweep_mode=True)
    weights_p = sub.add_parser("dump-weights", help="write the per-age weight table as CSV")
    weights_p.add_argument("--config", type=Path)
    weights_p.add_argument("--preset", choices=sorted(PRESETS))
    weights_p.add_argument("--max-age", type=int, default=20)
    weights_p.add_argument("--out", type=Path, default=Path("."))
    presets_p = sub.add_parser("presets", help="print a preset as config JSON")
    presets_p.add_argument("--preset", choices=sorted(PRESETS), default="table1")
    presets_p.add_argument("--m", type=int, default=3)
    presets_p.add_argument("--p", type=float, default=0.7)
    return parser


def _load_config_dict(args) -> dict:
    data = {}
    if args.config is not None:
        text = Path(args.config).read_text()
        try:
            parsed = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigError(f"config is not valid JSON: {err}") from err
        if not isinstance(parsed, dict):
            raise ConfigError("config must be a JSON object")
        data = parsed
    if getattr(args, "preset", None):
        data["preset"] = args.preset
        data.pop("subsystems", None)
    if getattr(args, "t", None) is not None:
        data["t"] = args.t
    if getattr(args, "seed", None) is not None:
        data["seed"] = args.seed
    if getattr(args, "reps", None) is not None:
        data["replications"] = args.reps
    return data


def _cmd_run(args) -> int:
    data = _load_config_dict(args)
    if args.policy:
        data["policy"] = args.policy
    for name, values in (("p", args.p_values), ("m", args.m_values)):
        if values:
            if len(values) > 1:
                raise ConfigError(f"run takes a single --{name}; use sweep for grids")
            data[name] = values[0]
    config = config_from_dict(data)
    result = run_simulation(config, record_trace=True)
    args.out.mkdir(parents=True, exist_ok=True)
    emit_csv([result], args.out / "results.csv")
    emit_trace_csv(result.trace, args.out / "trace.csv")
    print(f"empiric_offset={result.empiric_offset!r} empiric_lq={result.empiric_lq!r}")
    print(f"wrote {args.out / 'results.csv'} and {args.out / 'trace.csv'}")
    return 0


def _cmd_sweep(args) -> int:
    data = _load_config_dict(args)
    p_values = args.p_values or ([data["p"]] if "p" in data else None)
    m_values = args.m_values or ([data["m"]] if "m" in data else None)
    if p_values is None:
        raise ConfigError("missing required config key 'p'")
    if m_values is None:
        raise ConfigError("missing required config key 'm'")
    data.setdefault("p", p_values[0])
    data.setdefault("m", m_values[0])
    policies = args.policy or list(POLICY_NAMES)
    base = config_from_dict(data)
    seeds = [base.master_seed + r for r in range(base.replications)]
    results = sweep(base, p_values, m_values, policies, seeds)
    args.out.mkdir(parents=True, exist_ok=True)
    emit_csv(results.values(), args.out / "results.csv")
    print(f"wrote {len(results)} runs to {args.out / 'results.csv'}")
    return 0


def _cmd_dump_weights(args) -> int:
    data = _load_config_dict(args)
    if "subsystems" in data:
        subsystems = _subsystems_from_entries(data["subsystems"])
    else:
        subsystems = PRESETS[data.get("preset", "table1")]()
    if args.max_age < 0:
        raise ConfigError("--max-age must be nonnegative")
    args.out.mkdir(parents=True, exist_ok=True)
    emit_weights_csv(subsystems, args.max_age, args.out / "weights.csv")
    print(f"wrote {args.out / 'weights.csv'}")
    return 0


def _cmd_presets(args) -> int:
    config = config_from_dict({"preset": args.preset, "m": args.m, "p": args.p})
    print(config_to_json(config))
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "dump-weights":
            return _cmd_dump_weights(args)
        if args.command == "presets":
            return _cmd_presets(args)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except DivergenceError as err:
        print(f"diverged: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
