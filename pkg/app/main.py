"""
Command-line entry point with logging configuration and exit-status mapping.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel

from app.commands import algebra, common_options, groupoid, homotopy, transfer
from app.config import settings
from app.dependencies import Workspace
from app.errors import InputError, McGroupoidError
from app.models import ErrorDocument

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2


def configure_logging() -> None:
    """Logs go to stderr (and optionally a file); stdout carries the documents."""
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(sys.stderr),
            logging.FileHandler(settings.LOG_FILE) if settings.LOG_TO_FILE else logging.NullHandler()
        ]
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcgroupoid",
        description="Exact computations with filtered shifted L∞-algebras and their MC ∞-groupoids",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    parents = [common_options()]
    for module in (algebra, groupoid, transfer, homotopy):
        module.register(subparsers, parents)
    return parser


def render(document: BaseModel) -> str:
    """Byte-deterministic JSON for a document."""
    return json.dumps(document.model_dump(exclude_none=True), sort_keys=True, indent=settings.JSON_INDENT,
                      ensure_ascii=False) + "\n"


def emit(document: BaseModel, output: Optional[str]) -> None:
    text = render(document)
    if output:
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse the command line, run one subcommand and emit its document.

    Returns:
        0 on success or a passing check, 1 on a failed check, precondition or
        refuted hypothesis, 2 on an input error (usage errors included)
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INPUT

    workspace = Workspace(args.truncation)
    try:
        for path in args.input:
            workspace.load(path)
        status, document = args.handler(args, workspace)
    except InputError as e:
        logger.error(f"{args.command}: input error: {e}")
        status, document = EXIT_INPUT, ErrorDocument.from_exception(e)
    except McGroupoidError as e:
        logger.warning(f"{args.command}: {type(e).__name__}: {e}")
        status, document = EXIT_FAILED, ErrorDocument.from_exception(e)

    try:
        emit(document, args.output)
    except OSError as e:
        logger.error(f"Cannot write {args.output}: {e}")
        return EXIT_INPUT
    return status


def main() -> None:
    configure_logging()
    sys.exit(run())


if __name__ == "__main__":
    main()
