#!/usr/bin/env python3
"""
Main Entry Point for the G-Anti-SAT Locking Toolkit
Subcommands: gen (build blocks, lock hosts), attack (SAT attack, approximate
keys, profiles), analyze (census, SPS/ADS, probes, bypass cost).
"""

import argparse
import logging
import os
import sys

from rich.console import Console
from rich.logging import RichHandler

# Add the Locking directory to the Python path for imports
sys.path.append(os.path.join(os.path.dirname(__file__), 'Locking'))

from command_providers import AnalyzeCommandProvider, AttackCommandProvider, GenCommandProvider
from command_providers.command_provider import EXIT_IO, EXIT_VALIDATION
from config import TOOL_VERSION, build_config
from errors import ConfigError

PROVIDERS = {
    "gen": GenCommandProvider,
    "attack": AttackCommandProvider,
    "analyze": AnalyzeCommandProvider,
}


def build_parser() -> argparse.ArgumentParser:
    """Every option defaults to None so a --config file can supply it."""
    parser = argparse.ArgumentParser(prog="glock", description="G-Anti-SAT logic locking toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {TOOL_VERSION}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML experiment file; explicit flags override it")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--format", dest="output_format", choices=["json", "csv"])
    common.add_argument("--threads", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("-v", "--verbose", action="count", default=0)
    common.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", parents=[common], help="build a locking block")
    gen.add_argument("--kind", choices=["antisat", "comp", "noncomp", "consecutive"])
    gen.add_argument("-n", type=int)
    gen.add_argument("-t", type=int)
    gen.add_argument("--type", dest="block_type", type=int, choices=[0, 1])
    gen.add_argument("--f-column", dest="f_column", type=int)
    gen.add_argument("--common-row", dest="common_row", type=int)
    gen.add_argument("--q", type=int)
    gen.add_argument("--columns", dest="included_columns", type=int, nargs="+")
    gen.add_argument("--dividing-column", dest="dividing_column", type=int)
    gen.add_argument("--cell-row", dest="cell_row", type=int)
    gen.add_argument("--single-cell-in", dest="single_cell_in", choices=["g", "f"])
    gen.add_argument("-p", type=int)
    gen.add_argument("--host", help="c17, const0, const1 or a bench path")
    gen.add_argument("--target-output", dest="target_output")

    attack = sub.add_parser("attack", parents=[common], help="attack a locked bench")
    attack.add_argument("--locked", dest="locked_file")
    attack.add_argument("--key-file", dest="key_file")
    attack.add_argument("--oracle-bench", dest="oracle_bench")
    attack.add_argument("--budget", type=int)
    attack.add_argument("--profile-step", dest="profile_step", type=int)
    attack.add_argument("--max-iters", dest="max_iters", type=int)
    attack.add_argument("--seeds", type=int, nargs="+")
    attack.add_argument("--solver", choices=["embedded", "external"])
    attack.add_argument("--solver-cmd", dest="solver_cmd")
    attack.add_argument("--conflict-cap", dest="conflict_cap", type=int)
    attack.add_argument("--iteration-cap", dest="iteration_cap", type=int)
    attack.add_argument("--export-cnf", dest="export_cnf", action="store_true", default=None,
                        help="also write the miter as miter.cnf with variable_map.json")

    analyze = sub.add_parser("analyze", parents=[common], help="analyze a block or locked bench")
    analyze.add_argument("--block", dest="block_file")
    analyze.add_argument("--locked", dest="locked_file")
    analyze.add_argument("--key-file", dest="key_file")
    analyze.add_argument("--oracle-bench", dest="oracle_bench")
    analyze.add_argument("--census", action="store_true", default=None)
    analyze.add_argument("--sampled", dest="sample_count", type=int,
                         help="sampled census with this many keys")
    analyze.add_argument("--sps", action="store_true", default=None)
    analyze.add_argument("--exact", dest="sps_exact", action="store_true", default=None)
    analyze.add_argument("--cas-probe", dest="cas_probe", action="store_true", default=None)
    analyze.add_argument("--bypass", dest="bypass_key", metavar="K_F,K_G")
    analyze.add_argument("--distinct", action="store_true", default=None)
    analyze.add_argument("--constraints", action="store_true", default=None)
    analyze.add_argument("--wk-array", dest="wk_array", action="store_true", default=None)
    analyze.add_argument("--removal", action="store_true", default=None)
    return parser


def configure_logging(args) -> None:
    level = args.log_level or ("DEBUG" if args.verbose >= 2 else "INFO" if args.verbose == 1 else "WARNING")
    logging.basicConfig(level=level, format="%(message)s", datefmt="[%X]",
                        handlers=[RichHandler(rich_tracebacks=True, show_path=False)], force=True)


def main(argv=None, console: Console = None) -> int:
    """Parse arguments, build the configuration and dispatch the subcommand."""
    console = console or Console()
    args = build_parser().parse_args(argv)
    configure_logging(args)

    overrides = {k: v for k, v in vars(args).items() if k not in ("config", "verbose", "log_level")}
    if args.command == "analyze" and args.sample_count is not None:
        overrides["census_mode"] = "sampled"
    try:
        config = build_config(overrides, args.config)
    except ConfigError as e:
        console.print(f"❌ {e}")
        return EXIT_VALIDATION
    except OSError as e:
        console.print(f"❌ Cannot read configuration: {e}")
        return EXIT_IO

    console.print(f"🔐 G-Anti-SAT toolkit {TOOL_VERSION}: {config.command} (config {config.config_hash[:12]})")
    provider = PROVIDERS[config.command](config, console)
    return provider.run()


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)
