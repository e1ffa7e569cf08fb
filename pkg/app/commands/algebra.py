"""
Subcommands on algebras and morphisms: validate, curv, twist, pushforward, shift.
"""
import argparse
import logging
from typing import Tuple

from app.commands import element_option
from app.dependencies import Workspace
from app.errors import InputError
from app.models import AlgebraDocument, Convention, ReportDocument, ResultDocument, SimplexDocument, Status
from app.services.gm import get_gm_service
from app.services.mc import pushforward_simplex
from app.services.slie import get_algebra_service

logger = logging.getLogger(__name__)


def validate(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """Structure checks of every loaded algebra and morphism, plus the graded check on request."""
    service = get_algebra_service()
    result = ResultDocument(operation="validate")
    for name in workspace.algebra_names:
        report = service.validate_algebra(workspace.algebra(name, checked=False))
        result.reports.append(ReportDocument.from_check("slie", report))
    for name in workspace.morphism_names:
        morphism = workspace.morphism(name, checked=False)
        report = service.validate_morphism(morphism)
        result.reports.append(ReportDocument.from_check("morphism", report))
        if args.qiso:
            result.reports.append(ReportDocument.from_qiso(get_gm_service().check(morphism)))
    if not result.reports:
        raise InputError("Nothing to validate: load an algebra or morphism with --input")
    if any(r.status != Status.PASS for r in result.reports):
        result.status = Status.FAIL
        return 1, result
    return 0, result


def curv(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    algebra = workspace.algebra(args.algebra)
    alpha = element_option(args, "element", algebra)
    curvature = get_algebra_service().curv(algebra, alpha)
    result = ResultDocument(operation="curv")
    result.add_element("element", alpha, algebra.name)
    result.add_element("curvature", curvature, algebra.name)
    result.numbers["is_mc"] = int(curvature.is_zero())
    return 0, result


def twist(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    algebra = workspace.algebra(args.algebra)
    alpha = element_option(args, "element", algebra)
    twisted = get_algebra_service().twist(algebra, alpha)
    if args.name:
        twisted.name = args.name
    return 0, ResultDocument(operation="twist", algebra=AlgebraDocument.from_algebra(twisted))


def pushforward(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """U_* of an inline element, or of every loaded simplex of the source."""
    morphism = workspace.morphism(args.morphism)
    result = ResultDocument(operation="pushforward")
    if args.element is not None:
        alpha = element_option(args, "element", morphism.source)
        result.add_element("pushforward", get_algebra_service().pushforward(morphism, alpha), morphism.target.name)
        return 0, result
    simplices = workspace.simplices()
    if not simplices:
        raise InputError("pushforward needs --element or a simplex document")
    for k, simplex in enumerate(simplices):
        if simplex.algebra.name != morphism.source.name:
            raise InputError(f"Simplex {k} lives in '{simplex.algebra.name}', not in the source of {morphism.name}")
        result.simplices[f"simplex_{k}"] = SimplexDocument.from_simplex(pushforward_simplex(morphism, simplex))
    return 0, result


def shift(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """Re-emit an algebra in the shifted or the ordinary convention."""
    algebra = workspace.algebra(args.algebra, checked=False)
    document = AlgebraDocument.from_algebra(algebra, Convention(args.to))
    logger.info(f"Converted {algebra.name} to the {args.to} convention")
    return 0, ResultDocument(operation="shift", algebra=document)


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("validate", parents=parents, help="check algebras and morphisms")
    p.add_argument("--qiso", action="store_true", help="also check the filtered quasi-isomorphism condition")
    p.set_defaults(handler=validate)

    p = subparsers.add_parser("curv", parents=parents, help="curvature of a degree-0 element")
    p.add_argument("--algebra", default=None, help="algebra name")
    p.add_argument("--element", default=None, help="inline element JSON")
    p.set_defaults(handler=curv)

    p = subparsers.add_parser("twist", parents=parents, help="twist an algebra by an MC element")
    p.add_argument("--algebra", default=None, help="algebra name")
    p.add_argument("--element", default=None, help="inline MC element JSON")
    p.add_argument("--name", default=None, help="name of the twisted algebra")
    p.set_defaults(handler=twist)

    p = subparsers.add_parser("pushforward", parents=parents, help="push MC elements along a morphism")
    p.add_argument("--morphism", default=None, help="morphism name")
    p.add_argument("--element", default=None, help="inline element JSON")
    p.set_defaults(handler=pushforward)

    p = subparsers.add_parser("shift", parents=parents, help="convert between sign conventions")
    p.add_argument("--algebra", default=None, help="algebra name")
    p.add_argument("--to", choices=[c.value for c in Convention], default=Convention.SHIFTED.value,
                   help="convention to emit")
    p.set_defaults(handler=shift)
