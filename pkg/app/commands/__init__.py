"""
Subcommands of the mcgroupoid command line.

Each module exposes ``register(subparsers, parents)``; every subcommand sets a
``handler(args, workspace) -> (exit_status, document)``.
"""
import argparse
from typing import Optional

from app.dependencies import parse_element
from app.errors import InputError
from app.services.slie import Element, SLieAlgebra


def common_options() -> argparse.ArgumentParser:
    """Options shared by every subcommand."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--input", action="append", default=[], metavar="FILE",
                        help="JSON document to load (repeatable)")
    parent.add_argument("--truncation", type=int, default=None, metavar="N",
                        help="override the truncation depth of every loaded algebra")
    parent.add_argument("--output", default=None, metavar="FILE", help="write the result document here")
    parent.add_argument("--format", choices=["json"], default="json", help="output format")
    return parent


def element_option(args: argparse.Namespace, attr: str, algebra: SLieAlgebra,
                   default_zero: bool = False) -> Element:
    """
    Parse an inline element option and check its names against the algebra.

    Raises:
        InputError: If the option is missing (and not defaulted) or invalid
    """
    text: Optional[str] = getattr(args, attr, None)
    if text is None:
        if default_zero:
            return Element()
        raise InputError(f"--{attr.replace('_', '-')} is required")
    element = parse_element(text)
    algebra.check_element(element)
    return element
