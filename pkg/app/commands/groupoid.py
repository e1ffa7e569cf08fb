"""
Subcommands on MC simplices: reconstruct, rectify, compose, concatenate.
"""
import argparse
from typing import Tuple

from app.commands import element_option
from app.dependencies import Workspace
from app.errors import InputError
from app.models import ResultDocument, SimplexDocument
from app.services.mc import get_groupoid_service


def reconstruct(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """Rebuild a simplex from its vertex value (--element) and its stub (the loaded simplex document)."""
    stub = workspace.simplex(0)
    algebra = stub.algebra
    mu = element_option(args, "element", algebra)
    simplex = get_groupoid_service().reconstruct(algebra, stub.dim, args.vertex, mu, stub.value)
    result = ResultDocument(operation="reconstruct")
    result.simplices["simplex"] = SimplexDocument.from_simplex(simplex)
    return 0, result


def rectify(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    edge = workspace.simplex(0)
    rectified = get_groupoid_service().rectify(edge.algebra, edge, args.weight_floor)
    result = ResultDocument(operation="rectify")
    result.simplices["edge"] = SimplexDocument.from_simplex(rectified)
    return 0, result


def compose(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """Fill the horn of two loaded edges, the first ending where the second starts."""
    simplices = workspace.simplices()
    if len(simplices) != 2:
        raise InputError(f"compose needs exactly two edges, got {len(simplices)}")
    left, right = simplices
    if left.algebra is not right.algebra:
        raise InputError("compose needs two edges of the same algebra")
    composition = get_groupoid_service().compose(left.algebra, left, right)
    result = ResultDocument(operation="compose")
    result.simplices["triangle"] = SimplexDocument.from_simplex(composition.triangle)
    result.simplices["composite"] = SimplexDocument.from_simplex(composition.composite)
    return 0, result


def concatenate(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    edges = workspace.simplices()
    if not edges:
        raise InputError("concatenate needs at least one edge")
    if any(e.algebra is not edges[0].algebra for e in edges):
        raise InputError("concatenate needs edges of one algebra")
    edge = get_groupoid_service().concatenate(edges[0].algebra, edges)
    result = ResultDocument(operation="concatenate")
    result.simplices["edge"] = SimplexDocument.from_simplex(edge)
    result.numbers["edges"] = len(edges)
    return 0, result


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("reconstruct", parents=parents, help="rebuild an MC simplex from vertex value and stub")
    p.add_argument("--element", default=None, help="inline vertex value μ")
    p.add_argument("--vertex", type=int, default=0, help="vertex i")
    p.set_defaults(handler=reconstruct)

    p = subparsers.add_parser("rectify", parents=parents, help="rectify an edge")
    p.add_argument("--weight-floor", dest="weight_floor", type=int, default=1, help="weight floor of β_1")
    p.set_defaults(handler=rectify)

    p = subparsers.add_parser("compose", parents=parents, help="fill the horn of two chained edges")
    p.set_defaults(handler=compose)

    p = subparsers.add_parser("concatenate", parents=parents, help="concatenate a weight-scheduled chain of edges")
    p.set_defaults(handler=concatenate)
