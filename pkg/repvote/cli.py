# coding: utf-8
# Distributed under the terms of the MIT License.

import argparse
import logging
import sys

from repvote.errors import RepeatVotingError, ConfigError, BadSpec, IoError
from repvote.simulate.harness import MonteCarloHarness
from repvote.simulate.inputs import parse_config
from repvote.simulate.outputs import (emit_report, emit_reports,
                                      render_comparison, CSV, JSON)
from repvote.utils.log import get_logger, set_level

"""
Command line front end.

    repvote run     --config cookbook/threshold_viability.cfg --seed 42
    repvote compare --config cookbook/collapse.cfg --format json
    repvote sweep   --config cookbook/closeness_mobilization.cfg --out sweep.csv
"""

__author__ = "Repvote Developers"
__version__ = "0.1"
__status__ = "Alpha"
__date__ = "October 2026"

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_IO = 4
EXIT_ERROR = 5

EPILOG = """exit codes:
  0  success
  2  bad invocation (unknown subcommand, missing --config, bad flag value)
  3  invalid scenario config
  4  config unreadable or output unwritable
  5  any other simulation error

environment:
  REPEATVOTE_THREADS  worker processes for replications (unset or 0: one per
                      CPU; 1: serial)
"""


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, metavar="PATH",
                        help="Scenario config file")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="Master seed; overrides the config")
    common.add_argument("--reps", type=int, metavar="N",
                        help="Number of replications; overrides the config")
    common.add_argument("--out", metavar="PATH", default="-",
                        help="Output file (default: stdout)")
    common.add_argument("--format", choices=(CSV, JSON), default=CSV,
                        help="Report format (default: csv)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true",
                           help="Log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true",
                           help="Log warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="repvote",
        description="Simulate repeat voting against single-round elections.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    subparsers.add_parser("run", parents=[common], epilog=EPILOG,
                          formatter_class=argparse.RawDescriptionHelpFormatter,
                          help="Run one scenario and report every metric")
    subparsers.add_parser("compare", parents=[common], epilog=EPILOG,
                          formatter_class=argparse.RawDescriptionHelpFormatter,
                          help="Run one scenario and compare each variant "
                               "with the single-round baseline")
    subparsers.add_parser("sweep", parents=[common], epilog=EPILOG,
                          formatter_class=argparse.RawDescriptionHelpFormatter,
                          help="Run every point of the config's $sweep grid")
    return parser


def _load(args):
    config = parse_config(args.config)
    return config.with_overrides(master_seed=args.seed,
                                 replications=args.reps)


def run(args):
    config = _load(args)
    if config.sweep:
        logger.warning("Ignoring the $sweep grid; use 'repvote sweep' to "
                       "run it")
    report = MonteCarloHarness(config).run_scenario()
    emit_report(report, args.format, args.out)


def compare(args):
    config = _load(args)
    harness = MonteCarloHarness(config)
    report = harness.run_scenario()
    table = harness.compare_procedures(report)
    logger.info("Comparison for '%s':\n%s", config.name,
                render_comparison(table))
    emit_report(report, args.format, args.out)


def sweep(args):
    config = _load(args)
    if not config.sweep:
        raise ConfigError("sweep", "the config declares no $sweep grid")
    points = MonteCarloHarness(config).sweep()
    emit_reports([report for _, report in points], args.format, args.out)


COMMANDS = {"run": run, "compare": compare, "sweep": sweep}


def main(argv=None):
    """
    Entry point of the repvote command.

    :param argv: Argument list; defaults to sys.argv[1:].
    :return: Process exit code.
    """

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if args.verbose:
        set_level(logging.DEBUG)
    elif args.quiet:
        set_level(logging.WARNING)
    else:
        set_level(logging.INFO)

    try:
        COMMANDS[args.command](args)
    except (ConfigError, BadSpec) as exc:
        logger.error("Invalid config: %s", exc)
        return EXIT_CONFIG
    except IoError as exc:
        logger.error("%s", exc)
        return EXIT_IO
    except RepeatVotingError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
