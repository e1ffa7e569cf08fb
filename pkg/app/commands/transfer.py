"""
Goldman–Millson subcommands: preimage, transfer-connect, verify.
"""
import argparse
import logging
from typing import Tuple

from app.commands import element_option
from app.dependencies import Workspace
from app.errors import InputError
from app.models import CertificateDocument, ReportDocument, ResultDocument, Status
from app.services.gm import get_gm_service
from app.services.mc import is_mc

logger = logging.getLogger(__name__)


def preimage(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    morphism = workspace.morphism(args.morphism)
    alpha_tilde = element_option(args, "element", morphism.target)
    certificate = get_gm_service().preimage(morphism, alpha_tilde)
    return 0, ResultDocument(operation="preimage", certificate=CertificateDocument.from_certificate(certificate))


def transfer_connect(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """Connect --element and --element2 in the source, given a target edge between their images."""
    morphism = workspace.morphism(args.morphism)
    alpha = element_option(args, "element", morphism.source, default_zero=True)
    alpha_prime = element_option(args, "element2", morphism.source, default_zero=True)
    edge = workspace.simplex(0)
    if edge.algebra is not morphism.target:
        raise InputError(f"The edge must live in the target '{morphism.target.name}' of {morphism.name}")
    certificate = get_gm_service().connect(morphism, alpha, alpha_prime, edge)
    return 0, ResultDocument(operation="transfer-connect",
                             certificate=CertificateDocument.from_certificate(certificate))


def verify(args: argparse.Namespace, workspace: Workspace) -> Tuple[int, ResultDocument]:
    """Re-validate loaded certificates and simplices without re-running any construction."""
    result = ResultDocument(operation="verify")
    if workspace.certificate_docs:
        morphism, certificate = workspace.certificate()
        report = get_gm_service().verify(morphism, certificate)
        result.reports.append(ReportDocument.from_verification(morphism.name, report))
    for k, simplex in enumerate(workspace.simplices()):
        check = is_mc(simplex.algebra, simplex.value)
        document = ReportDocument(check="simplex", subject=f"simplex_{k}",
                                  status=Status.PASS if check.ok else Status.FAIL, checked=1)
        result.reports.append(document)
    if not result.reports:
        raise InputError("Nothing to verify: load a certificate or simplex with --input")
    if any(r.status != Status.PASS for r in result.reports):
        result.status = Status.FAIL
        logger.warning("Verification failed")
        return 1, result
    return 0, result


def register(subparsers, parents) -> None:
    p = subparsers.add_parser("preimage", parents=parents, help="MC preimage along a filtered quasi-isomorphism")
    p.add_argument("--morphism", default=None, help="morphism name")
    p.add_argument("--element", default=None, help="inline MC element α̃ of the target")
    p.set_defaults(handler=preimage)

    p = subparsers.add_parser("transfer-connect", parents=parents,
                              help="lift a target edge to an edge in the source")
    p.add_argument("--morphism", default=None, help="morphism name")
    p.add_argument("--element", default=None, help="inline MC element α of the source (default 0)")
    p.add_argument("--element2", default=None, help="inline MC element α' of the source (default 0)")
    p.set_defaults(handler=transfer_connect)

    p = subparsers.add_parser("verify", parents=parents, help="re-validate certificates and simplices")
    p.set_defaults(handler=verify)
