"""
Workspace of documents loaded from the command line.
"""
import json
import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import ValidationError

from app.config import settings
from app.errors import InputError, PreconditionError
from app.models import AlgebraDocument, CertificateDocument, ElementDocument, MorphismDocument, SimplexDocument
from app.services.gm import TransferCertificate
from app.services.mc import MCSimplex
from app.services.slie import Element, InftyMorphism, SLieAlgebra, get_algebra_service

logger = logging.getLogger(__name__)


def _parse(model, data: dict, origin: str):
    try:
        return model(**data)
    except ValidationError as e:
        raise InputError(f"{origin}: invalid {model.__name__}: {e}")


def _document_kind(data: dict) -> str:
    if "kind" in data and "morphism" in data:
        return "certificate"
    if "taylor" in data:
        return "morphism"
    if "basis" in data:
        return "algebra"
    if "dim" in data and "terms" in data:
        return "simplex"
    raise InputError("Cannot tell the document type (expected an algebra, morphism, simplex or certificate)")


def parse_element(text: str) -> Element:
    """
    Parse an inline element document such as '{"terms": [{"coef": "1", "basis": "x"}]}'.

    Raises:
        InputError: If the text is not a valid element document
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"Inline element is not valid JSON: {e}")
    if not isinstance(data, dict):
        raise InputError("Inline element must be a JSON object")
    return _parse(ElementDocument, data, "inline element").to_element()


class Workspace:
    """
    Named algebras, morphisms, simplices and certificates loaded from files.

    Objects are built on first use so that morphisms may be loaded before the
    algebras they reference. Algebras and morphisms pass their structure check
    before any operation sees them.
    """

    def __init__(self, truncation: Optional[int] = None):
        self.truncation = truncation if truncation is not None else settings.DEFAULT_TRUNCATION
        self._algebra_docs: Dict[str, AlgebraDocument] = {}
        self._morphism_docs: Dict[str, MorphismDocument] = {}
        self.simplex_docs: List[SimplexDocument] = []
        self.certificate_docs: List[CertificateDocument] = []
        self._algebras: Dict[Tuple[str, bool], SLieAlgebra] = {}
        self._morphisms: Dict[Tuple[str, bool], InftyMorphism] = {}

    def load(self, path: str) -> str:
        """
        Load one JSON document and return its kind.

        Raises:
            InputError: If the file is missing, not JSON, or not a valid document
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"Cannot read {path}: {e}")
        except UnicodeDecodeError as e:
            raise InputError(f"{path} is not UTF-8 text: {e}")
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise InputError(f"{path} is not valid JSON: {e}")
        if not isinstance(data, dict):
            raise InputError(f"{path} must hold a JSON object")
        kind = _document_kind(data)
        self.add(kind, data, path)
        logger.debug(f"Loaded {kind} from {path}")
        return kind

    def add(self, kind: str, data: dict, origin: str = "document") -> None:
        if kind == "algebra":
            doc = _parse(AlgebraDocument, data, origin)
            if doc.name in self._algebra_docs:
                raise InputError(f"Algebra '{doc.name}' loaded twice")
            self._algebra_docs[doc.name] = doc
        elif kind == "morphism":
            doc = _parse(MorphismDocument, data, origin)
            if doc.name in self._morphism_docs:
                raise InputError(f"Morphism '{doc.name}' loaded twice")
            self._morphism_docs[doc.name] = doc
        elif kind == "simplex":
            self.simplex_docs.append(_parse(SimplexDocument, data, origin))
        elif kind == "certificate":
            self.certificate_docs.append(_parse(CertificateDocument, data, origin))
        else:
            raise InputError(f"Unknown document kind '{kind}'")

    @staticmethod
    def _pick(names: List[str], name: Optional[str], what: str) -> str:
        if name is not None:
            if name not in names:
                raise InputError(f"No {what} named '{name}' was loaded")
            return name
        if len(names) != 1:
            raise InputError(f"Expected exactly one {what}, found {len(names)}; name the one to use")
        return names[0]

    @property
    def algebra_names(self) -> List[str]:
        return list(self._algebra_docs)

    @property
    def morphism_names(self) -> List[str]:
        return list(self._morphism_docs)

    def algebra(self, name: Optional[str] = None, checked: bool = True) -> SLieAlgebra:
        """
        Raises:
            InputError: If the name is unknown or ambiguous
            PreconditionError: If checked and the algebra fails its structure check
        """
        name = self._pick(self.algebra_names, name, "algebra")
        key = (name, checked)
        if key not in self._algebras:
            algebra = self._algebra_docs[name].to_algebra(self.truncation)
            if checked:
                report = get_algebra_service().validate_algebra(algebra)
                if not report.ok:
                    first = report.violations[0]
                    raise PreconditionError(
                        f"Algebra '{name}' fails {first.rule} on {list(first.inputs)}",
                        residual=first.residual)
            self._algebras[key] = algebra
        return self._algebras[key]

    def morphism(self, name: Optional[str] = None, checked: bool = True) -> InftyMorphism:
        """
        Raises:
            InputError: If the name or one of its algebras is unknown
            PreconditionError: If checked and the morphism fails its structure check
        """
        name = self._pick(self.morphism_names, name, "morphism")
        key = (name, checked)
        if key not in self._morphisms:
            doc = self._morphism_docs[name]
            morphism = doc.to_morphism(self.algebra(doc.source, checked), self.algebra(doc.target, checked))
            if checked:
                report = get_algebra_service().validate_morphism(morphism)
                if not report.ok:
                    first = report.violations[0]
                    raise PreconditionError(
                        f"Morphism '{name}' fails {first.rule} on {list(first.inputs)}",
                        residual=first.residual)
            self._morphisms[key] = morphism
        return self._morphisms[key]

    def simplices(self) -> List[MCSimplex]:
        """Every loaded simplex, in load order, bound to its algebra."""
        return [doc.to_simplex(self.algebra(doc.algebra)) for doc in self.simplex_docs]

    def simplex(self, index: int = 0) -> MCSimplex:
        simplices = self.simplices()
        if index >= len(simplices):
            raise InputError(f"Expected at least {index + 1} simplex documents, found {len(simplices)}")
        return simplices[index]

    def certificate(self) -> Tuple[InftyMorphism, TransferCertificate]:
        if len(self.certificate_docs) != 1:
            raise InputError(f"Expected exactly one certificate, found {len(self.certificate_docs)}")
        doc = self.certificate_docs[0]
        morphism = self.morphism(doc.morphism)
        return morphism, doc.to_certificate(morphism)
