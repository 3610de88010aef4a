"""Command line argument parser."""
import argparse
from typing import List, Optional

from attrs import define, field

from .constants import ARGPARSE_ARGS, COMMAND_ARGS, COMMANDS, SWEEP_CHI_PARTS

__all__ = ["ArgumentError", "CommandLine", "CliParser", "parse_sweep", "parse_sizes"]


class ArgumentError(ValueError):
    """Command arguments are not valid."""


class NoExitParser(argparse.ArgumentParser):
    """Raise ArgumentError instead of printing usage and exiting."""

    def error(self, message):
        raise ArgumentError(message) from None


@define
class CommandLine:
    """Parsed command line."""

    command: str
    config: Optional[str] = None
    out: Optional[str] = None
    seed: Optional[int] = None
    workers: Optional[int] = None
    dry_run: bool = False
    format: str = "json"
    verbose: bool = False
    options: dict = field(factory=dict)


def parse_sweep(value: str):
    """START:STOP:NUM into (start, stop, num)."""
    parts = value.split(":")
    if len(parts) != SWEEP_CHI_PARTS:
        raise ArgumentError(f"--sweep-chi takes START:STOP:NUM, got {value!r}")
    try:
        start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as err:
        raise ArgumentError(f"--sweep-chi: {err}") from None
    if num < 2 or not 0 <= start < stop:
        raise ArgumentError("--sweep-chi needs 0 <= START < STOP and NUM >= 2")
    return start, stop, num


def parse_sizes(value: str):
    try:
        sizes = sorted({int(part) for part in value.split(",") if part})
    except ValueError as err:
        raise ArgumentError(f"--trend: {err}") from None
    if len(sizes) < 2 or sizes[0] < 1:
        raise ArgumentError("--trend needs at least two particle counts >= 1")
    return sizes


class CliParser:
    """kslab command line."""

    def __init__(self):
        self.parser = NoExitParser(prog="kslab", add_help=False)
        commands = self.parser.add_subparsers(dest="command")
        for command in COMMANDS:
            subparser = commands.add_parser(command, add_help=False)
            for arg, spec in {**ARGPARSE_ARGS, **COMMAND_ARGS[command]}.items():
                subparser.add_argument(f"--{arg}", **spec)

    def parse(self, argv: List[str]) -> CommandLine:
        if not argv or argv[0] not in COMMANDS:
            raise ArgumentError(f"expected one of {', '.join(COMMANDS)}")
        vals = vars(self.parser.parse_args(argv))
        common = {spec["dest"]: vals.pop(spec["dest"]) for spec in ARGPARSE_ARGS.values()}
        command = vals.pop("command")
        if common["workers"] is not None and common["workers"] < 1:
            raise ArgumentError("--workers must be >= 1")
        if common["seed"] is not None and not 0 <= common["seed"] < 2**64:
            raise ArgumentError("--seed must be an unsigned 64-bit integer")
        options = dict(vals)
        if options.get("sweep_chi"):
            options["sweep_chi"] = parse_sweep(options["sweep_chi"])
        if options.get("trend"):
            options["trend"] = parse_sizes(options["trend"])
        return CommandLine(command=command, options=options, **common)
