"""Command-line front end."""
import argparse
import logging
import sys
from typing import List, Optional

from ..const import COMMANDS, EXIT_NUMERICAL, EXIT_USAGE, LOGGER_NAME, VERSION
from ..exceptions import ConfigError, RotorSimError
from .commands import COMMAND_HANDLERS, CommandOptions, CommandOutcome
from .config import load_config

_LOGGER = logging.getLogger(LOGGER_NAME)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

COMMAND_HELP = {
    "spectrum": "simulate a sideband spectrum",
    "rabi": "simulate Rabi oscillations on one sideband",
    "ramsey": "simulate a Ramsey fringe on one sideband",
    "spinup": "run the spin-up and release Monte-Carlo ensemble",
    "fit": "fit trace files and write a report",
    "lines": "list individual transition lines",
}


class _Parser(argparse.ArgumentParser):
    """Argument parser reporting usage errors as ConfigError."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    """Parser for all subcommands."""
    parser = _Parser(prog="rotorsim", description="Two-ion quantum rotor simulation and fitting.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    subparsers.required = True

    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=COMMAND_HELP[command])
        sub.add_argument("--config", required=True, help="RunConfig JSON file")
        sub.add_argument("--seed", type=int, default=0, help="run seed (default 0)")
        sub.add_argument("--out", default=None, help="output directory, overrides output.dir")
        sub.add_argument("--svg", action="store_true", help="also write SVG plots")
        sub.add_argument("--threads", type=int, default=None, help="worker threads for the spin-up ensemble")
        verbosity = sub.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Root handler on stderr; DEBUG with verbose, WARNING with quiet, INFO otherwise."""
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def run(command: str, config_path: str, options: CommandOptions) -> CommandOutcome:
    """Load a config and run one subcommand."""
    config = load_config(command, config_path)
    _LOGGER.info("Running %s with %s (seed %d)", command, config_path, options.seed)
    outcome = COMMAND_HANDLERS[command](config, options)
    for path in outcome.written:
        _LOGGER.info("Wrote %s", path)
    return outcome


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as err:
        _LOGGER.error("Usage error: %s", err)
        return EXIT_USAGE

    configure_logging(args.verbose, args.quiet)
    options = CommandOptions(seed=args.seed, out=args.out, svg=args.svg, threads=args.threads)
    try:
        outcome = run(args.command, args.config, options)
    except RotorSimError as err:
        _LOGGER.error("%s failed: %s", args.command, err)
        return err.exit_code
    except Exception as ex:  # pylint: disable=broad-except
        _LOGGER.exception("Unexpected error in %s: %s", args.command, ex)
        return EXIT_NUMERICAL
    return outcome.exit_code
