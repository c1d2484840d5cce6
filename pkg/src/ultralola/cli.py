"""Command-line interface.

Exit status: 0 on success, 1 on a configuration error, 2 when the requested
deadline or reliability target cannot be met.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import channel, config
from . import optimizer as opt
from .errors import ConfigError, InfeasibleDeadline, TargetUnreachable
from .optimizer import Scenario
from .simulator import SweepVar, simulate, sweep, to_csv

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2

# name -> (preset, scenario, sweep variable, (lo, hi, step), methods)
FIGURES = {
    "tradeoff-ms": ("fast-sensing-lowgain", "ms", "packet_length", (1, 200, 1), ()),
    "tradeoff-mv": ("fast-sensing", "mv", "packet_length", (1, 196, 1), ()),
    "ms-optimizer-snr": ("fast-sensing-lowgain", "ms", "snr_db", (0, 20, 2), ("ultralola", "brute")),
    "mv-optimizer-snr": ("fast-sensing", "mv", "snr_db", (2, 20, 2), ("ultralola", "brute")),
    "snr-sweep-ms": ("synthetic", "ms", "snr_db", (0, 20, 1), ("ultralola", "brute", "urllc", "shannon")),
    "snr-sweep-mv": ("synthetic", "mv", "snr_db", (0, 20, 1), ("ultralola", "brute", "urllc", "shannon")),
    "deadline-sweep-ms": ("synthetic", "ms", "deadline_s", (5e-4, 2e-3, 1e-4), ("ultralola", "brute", "urllc", "shannon")),
    "deadline-sweep-mv": ("synthetic", "mv", "deadline_s", (5e-4, 2e-3, 1e-4), ("ultralola", "brute", "urllc", "shannon")),
}

METHOD_CHOICES = ("ultralola", "urllc", "shannon", "brute", "table")


def parse_range(text: str) -> list[float]:
    """``lo:hi:step`` -> inclusive grid."""
    try:
        lo, hi, step = (float(p) for p in text.split(":"))
    except ValueError:
        raise ConfigError(f"range {text!r} is not lo:hi:step")
    return make_grid(lo, hi, step)


def make_grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0 or hi < lo:
        raise ConfigError(f"bad range {lo}:{hi}:{step}")
    n = math.floor((hi - lo) / step + 1e-9) + 1
    return [round(lo + i * step, 12) for i in range(n)]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="experiment JSON (default: --preset)")
    p.add_argument("--preset", choices=sorted(config.PRESETS), help="built-in config (default synthetic)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key; repeatable; VALUE is parsed as JSON, null removes the key")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultralola", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("eval-epsilon", help="decoding error, success probability and dispersion at one D")
    _common(p)
    p.add_argument("--d", type=int, required=True, help="packet length in channel uses")

    p = sub.add_parser("optimize", help="choose a packet length; prints a PacketPlan")
    _common(p)
    p.add_argument("--scenario", choices=["ms", "mv"], default="ms")
    p.add_argument("--method", choices=METHOD_CHOICES, default="ultralola")
    p.add_argument("--table", metavar="PATH", help="AccuracyTable JSON for --method table")
    p.add_argument("--target-eps", type=float, default=1e-5, help="URLLC decoding-error target")

    p = sub.add_parser("simulate", help="Monte Carlo accuracy at one packet length")
    _common(p)
    p.add_argument("--scenario", choices=["ms", "mv"], default="ms")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sweep", help="plan and simulate over a grid; emits CSV")
    _common(p)
    p.add_argument("--scenario", choices=["ms", "mv"], default="ms")
    p.add_argument("--var", choices=[v.value for v in SweepVar], required=True)
    p.add_argument("--range", dest="grid", required=True, metavar="LO:HI:STEP")
    p.add_argument("--method", dest="methods", action="append", choices=METHOD_CHOICES[:-1],
                   help="repeatable; default all four")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("reproduce-figure", help="run a named figure sweep; emits CSV")
    _common(p)
    p.add_argument("--figure", choices=sorted(FIGURES), required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _header(exp: config.Experiment, **extra) -> list[str]:
    lines = [f"config={json.dumps(exp.effective(), sort_keys=True)}"]
    lines += [f"{k}={v}" for k, v in extra.items()]
    return lines


def _cmd_eval(args, exp) -> str:
    link = exp.scenario.link
    return _json({
        "packet_len": args.d,
        "epsilon": channel.decode_error_prob(link, args.d),
        "rho": channel.success_prob(link, args.d),
        "dispersion": link.dispersion,
        "capacity_bits": link.capacity,
        "config": exp.effective(),
    })


def _cmd_optimize(args, exp) -> str:
    cfg, scenario = exp.scenario, Scenario(args.scenario)
    if args.method == "table":
        if not args.table:
            raise ConfigError("--method table needs --table PATH")
        try:
            table = opt.AccuracyTable.from_dict(json.loads(Path(args.table).read_text()))
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"bad accuracy table: {exc}") from exc
        plan = opt.lookup_table_optimize(table, cfg.link)
    elif args.method == "ultralola":
        plan = opt.optimize_ms(cfg) if scenario is Scenario.MS else opt.optimize_mv(cfg)
    elif args.method == "brute":
        plan = opt.brute_force(cfg, scenario)
    elif args.method == "urllc":
        plan = opt.urllc_baseline(cfg, scenario, args.target_eps)
    else:
        plan = opt.shannon_baseline(cfg, scenario)
    return _json({**plan.to_dict(), "scenario": scenario.value, "config": exp.effective()})


def _cmd_simulate(args, exp) -> str:
    res = simulate(exp.model, exp.scenario, args.scenario, args.d, args.trials, args.seed, args.workers)
    return _json({**res.to_dict(), "scenario": args.scenario, "packet_len": args.d, "config": exp.effective()})


def _cmd_sweep(args, exp) -> str:
    grid = parse_range(args.grid)
    methods = args.methods or ("ultralola", "brute", "urllc", "shannon")
    rows = sweep(exp.model, exp.scenario, args.scenario, args.var, grid, methods,
                 args.trials, args.seed, args.workers)
    return to_csv(rows, _header(exp, scenario=args.scenario, var=args.var))


def _cmd_figure(args, exp) -> str:
    _, scenario, var, (lo, hi, step), methods = FIGURES[args.figure]
    rows = sweep(exp.model, exp.scenario, scenario, var, make_grid(lo, hi, step),
                 methods, args.trials, args.seed, args.workers)
    return to_csv(rows, _header(exp, figure=args.figure, scenario=scenario, var=var))


COMMANDS = {
    "eval-epsilon": _cmd_eval,
    "optimize": _cmd_optimize,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "reproduce-figure": _cmd_figure,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        preset = args.preset
        if args.verb == "reproduce-figure" and not args.config and not preset:
            preset = FIGURES[args.figure][0]
        exp = config.load(args.config, preset, args.overrides)
        text = COMMANDS[args.verb](args, exp)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleDeadline, TargetUnreachable) as exc:
        print(f"infeasible: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _emit(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
