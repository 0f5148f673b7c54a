"""Command line front end.

    pvflock run <config> [--out trace.csv] [--seed N] [--quiet]
    pvflock metrics <trace> [--epsilon E] [--comfort-low L] [--comfort-high H]
                            [--transient-hours T]
    pvflock gen-profile <kind> <out> [--horizon H] [--peak P]

Seeds resolve as: --seed flag, then the PVFLOCK_SEED environment variable,
then the config file's scenario.seed.  Errors print one diagnostic line to
stderr and exit nonzero.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

from .errors import PvflockError
from .scenario import (
    DisturbanceParams,
    ScenarioConfig,
    load_config,
    synth_disturbances,
    synth_pv,
)
from .simulate import compute_metrics, read_trace, run_simulation, write_trace

PROFILE_KINDS = ("pv", "outdoor", "solar", "internal")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pvflock",
        description="Model-free HVAC fleet control tracking a PV profile.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a scenario and write the trace")
    run.add_argument("config", nargs="?", help="scenario config file")
    run.add_argument("--config", dest="config_flag", metavar="PATH",
                     help="alternative way to pass the config file")
    run.add_argument("--out", metavar="PATH", help="trace output path (default from config)")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--quiet", action="store_true", help="suppress the metrics summary")

    met = sub.add_parser("metrics", help="summarize an existing trace CSV")
    met.add_argument("trace", help="trace file produced by `pvflock run`")
    met.add_argument("--epsilon", type=float, default=1.0, help="tracking band half-width (kW)")
    met.add_argument("--comfort-low", type=float, default=22.0)
    met.add_argument("--comfort-high", type=float, default=24.0)
    met.add_argument("--transient-hours", type=float, default=6.0)

    gen = sub.add_parser("gen-profile", help="write a synthetic profile CSV")
    gen.add_argument("kind", choices=PROFILE_KINDS)
    gen.add_argument("out", help="output CSV path")
    gen.add_argument("--horizon", type=float, default=72.0, help="hours to cover")
    gen.add_argument("--peak", type=float, default=None,
                     help="peak value (pv/solar kinds; defaults from the scenario)")
    return parser


def _resolve_seed(flag_seed: int | None) -> int | None:
    if flag_seed is not None:
        return flag_seed
    env = os.environ.get("PVFLOCK_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise PvflockError(f"PVFLOCK_SEED must be an integer, got {env!r}") from None
    return None


def _cmd_run(args: argparse.Namespace) -> int:
    paths = [p for p in (args.config, args.config_flag) if p]
    if len(paths) != 1:
        raise PvflockError("run needs exactly one config file (positional or --config)")
    cfg = load_config(paths[0])
    seed = _resolve_seed(args.seed)
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    trace = run_simulation(cfg)
    out = args.out or cfg.output_path
    write_trace(trace, out)
    if not args.quiet:
        for line in compute_metrics(trace, cfg).lines():
            print(line)
        print(f"trace={out}")
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    trace = read_trace(args.trace)
    cfg = ScenarioConfig(
        comfort_low=args.comfort_low,
        comfort_high=args.comfort_high,
        transient_hours=args.transient_hours,
    )
    cfg = replace(cfg, fleet=replace(cfg.fleet, epsilon=args.epsilon))
    for line in compute_metrics(trace, cfg).lines():
        print(line)
    return 0


def _cmd_gen_profile(args: argparse.Namespace) -> int:
    if args.horizon <= 0:
        raise PvflockError("--horizon must be positive")
    dist = DisturbanceParams()
    if args.kind == "pv":
        peak = 12.0 if args.peak is None else args.peak
        value = lambda t: synth_pv(t, peak)
    elif args.kind == "solar":
        if args.peak is not None:
            dist = replace(dist, d2_peak=args.peak)
        value = lambda t: synth_disturbances(t, dist).d2
    elif args.kind == "outdoor":
        value = lambda t: synth_disturbances(t, dist).d1
    else:  # internal
        value = lambda t: synth_disturbances(t, dist).d3
    dt = 1.0 / 6.0
    steps = round(args.horizon / dt)
    lines = ["t_hours,value"]
    for k in range(steps + 1):
        t = k * dt
        lines.append(f"{t:.6g},{value(t):.6g}")
    with open(args.out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "metrics":
            return _cmd_metrics(args)
        return _cmd_gen_profile(args)
    except PvflockError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
