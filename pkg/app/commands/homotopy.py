"""
Homotopy subcommands for abelian algebras: pi-abelian, moore-homology.
"""
import argparse
from typing import Tuple

from app.dependencies import Workspace
from app.errors import InputError
from app.models import ResultDocument
from app.services.exact_linalg import format_rational
from app.services.gm import abelian_homotopy, cochain_simplicial_space, constant_simplicial_space, moore_homology


def pi_abelian(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    algebra = workspace.algebra(args.algebra)
    found = abelian_homotopy(algebra, args.degree, cross_check=args.cross_check)
    result = ResultDocument(operation="pi-abelian")
    result.numbers["degree"] = found.degree
    result.numbers["dimension"] = found.dimension
    if found.moore_dimension is not None:
        result.numbers["moore_dimension"] = found.moore_dimension
    return 0, result


def moore(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """H_i of the Moore complex of Z^0(L ⊗ C_•), or of a constant space with --constant."""
    levels = args.levels if args.levels is not None else args.degree + 2
    if args.constant is not None:
        if args.constant < 0:
            raise InputError("--constant must be a non-negative dimension")
        space = constant_simplicial_space(args.constant, levels)
    else:
        space = cochain_simplicial_space(workspace.algebra(args.algebra), levels)
    homology = moore_homology(space, args.degree, levels)
    result = ResultDocument(operation="moore-homology")
    result.numbers["degree"] = homology.degree
    result.numbers["dimension"] = homology.dimension
    result.numbers["levels"] = levels
    result.vectors["basis"] = [[format_rational(c) for c in v] for v in homology.basis]
    return 0, result


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("pi-abelian", parents=parents, help="π_i of the MC space of an abelian algebra")
    p.add_argument("--algebra", default=None, help="algebra name")
    p.add_argument("--degree", type=int, default=0, help="homotopy degree i")
    p.add_argument("--cross-check", dest="cross_check", action="store_true",
                   help="compare with the Moore complex of the cochain model")
    p.set_defaults(handler=pi_abelian)

    p = subparsers.add_parser("moore-homology", parents=parents, help="homology of a Moore complex")
    p.add_argument("--algebra", default=None, help="abelian algebra whose cochain model to use")
    p.add_argument("--constant", type=int, default=None, metavar="DIM",
                   help="use the constant simplicial vector space of this dimension instead")
    p.add_argument("--degree", type=int, default=0, help="homology degree i")
    p.add_argument("--levels", type=int, default=None, help="number of simplicial levels (default i + 2)")
    p.set_defaults(handler=moore)
