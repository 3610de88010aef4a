"""kslab command line entry point."""
import asyncio
import logging
import sys
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler

from .commands import Commands, Format
from .constants import EXIT_CONFIG_ERROR
from .parsers import ArgumentError
from .parsers.constants import COMMANDS


def setup_logging(verbose: bool = False):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True)],
        force=True,
    )
    logging.captureWarnings(True)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    commands = Commands()
    try:
        line = commands.parser.parse(argv)
    except ArgumentError as err:
        setup_logging()
        logging.getLogger("kslab").error("%s (commands: %s)", err, ", ".join(COMMANDS))
        return EXIT_CONFIG_ERROR
    setup_logging(line.verbose)
    commands.format = Format(line.format)
    result = asyncio.run(commands.run(line))
    if result.text:
        sys.stdout.write(result.text)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
