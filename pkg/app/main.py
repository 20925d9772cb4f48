"""
Command-line entry point.
Configures logging, builds the argument parser and dispatches commands.

Usage: python -m app.main <command> [flags]
"""

import argparse
import logging
import sys
from typing import List, Optional

from app.cli.commands import add_commands

from .config import settings
from .utils.exceptions import CommandExit

# Configure logging
logging.basicConfig(
    level=logging.DEBUG if settings.DEBUG else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="app.main",
        description=f"{settings.APP_NAME} v{settings.VERSION}: context-aware sensor intrusion detection",
    )
    parser.add_argument(
        "--log-level",
        default=None,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help=f"Log verbosity (default: {settings.LOG_LEVEL})",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    add_commands(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run one command; returns 0 (benign/success), 10 (malicious) or 2 (error)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad flags and 0 on --help
        return int(e.code or 0)

    if args.log_level:
        logging.getLogger().setLevel(args.log_level)

    try:
        return args.handler(args)
    except CommandExit as e:
        print(f"error: {e.message}", file=sys.stderr)
        return e.exit_code
    except Exception as e:
        logger.error(f"Unhandled error in '{args.command}': {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
