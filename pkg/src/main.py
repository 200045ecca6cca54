#!/usr/bin/env python3
"""
Impurity Entanglement - Command Line Entry Point
================================================

Runs one scenario (equilibrium-gc, equilibrium-canonical, relax, junction)
from a YAML config or a shipped preset, applies ``--set key=value``
overrides, and writes the result CSV with its embedded config echo.

Exit codes: 0 success, 2 configuration or usage error, 3 computation
error, 4 output error.
"""

import argparse
import logging
import sys
from pathlib import Path

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from scenarios.runners import run_scenario
from scenarios.sweep_engine import WORKERS_ENV, SweepError
from utils.config_loader import SUBCOMMANDS, ConfigError, ConfigLoader, list_presets
from utils.data_logger import RunManifest, emit_csv, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPUTATION = 3
EXIT_OUTPUT = 4

SUBCOMMAND_HELP = {
    'equilibrium-gc': 'partial negativities of the grand-canonical Gibbs state',
    'equilibrium-canonical': 'negativity of the fixed particle number Gibbs state',
    'relax': 'relaxation after a quench into a single bath',
    'junction': 'impurity between two voltage-biased baths',
}


def build_arg_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--log-level', default='INFO', help='Logging level (default: INFO).')

    parser = argparse.ArgumentParser(
        prog='impurity-entanglement',
        description='Entanglement negativity between a fermionic level and discretized baths.',
        parents=[common],
    )
    sub = parser.add_subparsers(dest='command', required=True)
    for name, text in SUBCOMMAND_HELP.items():
        p = sub.add_parser(name, help=text, parents=[common])
        p.add_argument('--config', help='YAML config file or preset name (see `presets`).')
        p.add_argument('--out', help='Output CSV path (default: stdout).')
        p.add_argument('--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                       help='Override a config value, e.g. --set V=15 or --set sweep.values=[1,2].')
        p.add_argument('--workers', type=int, default=None,
                       help=f'Parallel sweep workers (default: ${WORKERS_ENV} or cpu count).')
    sub.add_parser('presets', help='list shipped figure-reproduction configs', parents=[common])
    return parser


def _list_presets(stream):
    presets = list_presets()
    width = max((len(name) for name in presets), default=0)
    for name, description in presets.items():
        stream.write(f"{name:<{width}}  {description}\n")


def _run_scenario(args):
    scenario = SUBCOMMANDS[args.command]
    loader = ConfigLoader(args.config, scenario)
    for assignment in args.overrides:
        loader.apply_override(assignment)
    config = loader.resolve()
    if config.output.log_file:
        setup_logging(args.log_level, config.output.log_file)

    result = run_scenario(config, args.workers)

    manifest = RunManifest.from_result(result, config_path=args.config, output_path=args.out)
    destination = args.out if args.out else sys.stdout
    emit_csv(result, destination, manifest)


def run(subcommand, flags=()):
    """Parse and execute one CLI invocation; returns the exit status."""
    argv = [subcommand, *flags] if subcommand else list(flags)
    try:
        args = build_arg_parser().parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG
    setup_logging(args.log_level)

    try:
        if args.command == 'presets':
            _list_presets(sys.stdout)
        else:
            _run_scenario(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (SweepError, ValueError) as e:
        logger.error(f"Computation failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_COMPUTATION
    except OSError as e:
        logger.error(f"Output failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_OUTPUT
    return EXIT_OK


def main(argv=None):
    """Main entry point."""
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        build_arg_parser().print_usage(sys.stderr)
        sys.exit(EXIT_CONFIG)
    sys.exit(run(argv[0], argv[1:]))


if __name__ == "__main__":
    main()
