"""Command line interface: run, sweep, preset, converge, list-presets.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(trace drift or step-convergence), 4 unknown preset.
"""

from __future__ import annotations

import argparse
import json
import sys

from ..dynamics import ConvergenceError, TraceDriftError
from ..states import TruncationError
from .config import ConfigError, ExperimentConfig, SweepConfig, load_config
from .io import (gnuplot_script, run_to_csv, run_to_json, sweep_to_csv,
                 sweep_to_json, write_text)
from .presets import UnknownPresetError, list_presets, preset
from .runner import convergence_study, run, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_UNKNOWN_PRESET = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thermoent",
        description=("Simulate thermally induced entanglement between trapped-ion "
                     "vibrational modes and write deterministic CSV/JSON tables."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_io(p):
        p.add_argument("--out", help="output file; stdout when omitted")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--epsilon", type=float, default=None,
                       help="override the truncation-tail tolerance")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; the pipeline is deterministic and seed-free")
        p.add_argument("--gnuplot", action="store_true",
                       help="also write a companion plotting script (needs --out)")

    p_run = sub.add_parser("run", help="run a single config file")
    p_run.add_argument("config")
    add_io(p_run)

    p_sweep = sub.add_parser("sweep", help="run a sweep config file")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help="worker processes; default runs in-process")
    add_io(p_sweep)

    p_preset = sub.add_parser("preset", help="describe a named preset")
    p_preset.add_argument("name")
    p_preset.add_argument("--emit-config", action="store_true",
                          help="print the full config JSON instead of the summary")
    p_preset.add_argument("--out", help="write the emitted config to a file")

    p_conv = sub.add_parser("converge", help="dimension-convergence study of a config")
    p_conv.add_argument("config")
    p_conv.add_argument("--dims", required=True,
                        help="comma-separated increasing Fock dimensions, e.g. 12,16,20")
    add_io(p_conv)

    sub.add_parser("list-presets", help="list available preset names")
    return parser


def _apply_overrides(config, args):
    if args.epsilon is not None:
        if isinstance(config, SweepConfig):
            raw = config.to_dict()
            dims = raw["base"].get("dims", {})
            dims = dict(dims) if isinstance(dims, dict) else {}
            dims["epsilon"] = args.epsilon
            raw["base"]["dims"] = dims
            return SweepConfig.from_dict(raw)
        raw = config.to_dict()
        dims = raw.get("dims", {})
        dims = dict(dims) if isinstance(dims, dict) else {}
        dims["epsilon"] = args.epsilon
        raw["dims"] = dims
        return ExperimentConfig.from_dict(raw)
    return config


def _emit(args, text: str, columns):
    if args.out:
        write_text(args.out, text)
        if getattr(args, "gnuplot", False) and args.format == "csv":
            write_text(args.out + ".gp", gnuplot_script(args.out, columns))
    else:
        sys.stdout.write(text)


def _record_seed(result, args):
    if args.seed is not None:
        result.metadata["seed"] = int(args.seed)


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if isinstance(config, SweepConfig):
        raise ConfigError("this is a sweep config; use the sweep subcommand")
    config = _apply_overrides(config, args)
    result = run(config)
    _record_seed(result, args)
    text = run_to_csv(result) if args.format == "csv" else run_to_json(result)
    _emit(args, text, result.column_names)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    if isinstance(config, ExperimentConfig):
        raise ConfigError("this is a run config; use the run subcommand")
    config = _apply_overrides(config, args)
    result = sweep(config, jobs=args.jobs)
    _record_seed(result, args)
    text = sweep_to_csv(result) if args.format == "csv" else sweep_to_json(result)
    _emit(args, text, list(result.columns))
    return EXIT_OK


def _cmd_preset(args) -> int:
    spec = preset(args.name)
    if args.emit_config:
        text = json.dumps(spec.raw, indent=2, sort_keys=True) + "\n"
        if args.out:
            write_text(args.out, text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    lines = [f"name: {spec.name}", f"kind: {spec.kind}",
             f"description: {spec.description}"]
    if spec.reconstructed:
        lines.append("note: grid values are a reconstruction, not published numbers")
    if spec.dim_list:
        lines.append(f"dim_list: {','.join(str(d) for d in spec.dim_list)}")
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_converge(args) -> int:
    config = load_config(args.config)
    if isinstance(config, SweepConfig):
        raise ConfigError("convergence studies take a run config")
    config = _apply_overrides(config, args)
    try:
        dims = [int(v) for v in args.dims.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"--dims: {exc}") from exc
    result = convergence_study(config, dims)
    _record_seed(result, args)
    text = sweep_to_csv(result) if args.format == "csv" else sweep_to_json(result)
    _emit(args, text, list(result.columns))
    return EXIT_OK


def _cmd_list(_args) -> int:
    for name, kind, description in list_presets():
        sys.stdout.write(f"{name:22s} {kind:12s} {description}\n")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep, "preset": _cmd_preset,
                "converge": _cmd_converge, "list-presets": _cmd_list}
    try:
        return handlers[args.command](args)
    except UnknownPresetError as exc:
        sys.stderr.write(f"error: {exc.args[0]}\n")
        return EXIT_UNKNOWN_PRESET
    except (ConfigError, TruncationError, FileNotFoundError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except (ConvergenceError, TraceDriftError, ArithmeticError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
