"""
Pydantic models for transfer certificates.
"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config import settings
from app.errors import InputError
from app.models.algebra import TermModel, _check_schema_version, terms_to_vector, vector_to_terms
from app.models.simplex import SimplexDocument
from app.services.gm import Layer, TransferCertificate
from app.services.slie import Element, InftyMorphism


class CertificateKind(str, Enum):
    """Which transfer construction produced a certificate."""
    PREIMAGE = "preimage"
    CONNECT = "connect"


_REQUIRED_INPUTS = {
    CertificateKind.PREIMAGE: ("alpha_tilde",),
    CertificateKind.CONNECT: ("alpha", "alpha_prime"),
}


class LayerModel(BaseModel):
    """Witnesses chosen on one filtration layer."""
    weight: int = Field(..., description="Layer weight n", ge=1)
    witnesses: Dict[str, List[TermModel]] = Field(default_factory=dict, description="Named witness vectors")

    model_config = ConfigDict(extra="forbid")


class CertificateDocument(BaseModel):
    """A transfer certificate that ``verify`` re-checks without re-running the construction."""
    schema_version: int = Field(..., description="Document schema version")
    kind: CertificateKind = Field(..., description="Construction that produced the certificate")
    morphism: str = Field(..., description="Name of the ∞-morphism")
    inputs: Dict[str, List[TermModel]] = Field(..., description="MC elements the construction started from")
    result: Dict[str, List[TermModel]] = Field(default_factory=dict, description="MC elements produced")
    edge: SimplexDocument = Field(..., description="Produced edge")
    input_edge: Optional[SimplexDocument] = Field(None, description="Target edge a connecting run started from")
    layers: List[LayerModel] = Field(default_factory=list, description="Per-layer witnesses")

    model_config = ConfigDict(extra="forbid")

    @field_validator('schema_version')
    @classmethod
    def validate_schema_version(cls, v):
        """Validate the schema version."""
        return _check_schema_version(v)

    def to_certificate(self, morphism: InftyMorphism) -> TransferCertificate:
        """
        Raises:
            InputError: If the certificate names another morphism or lacks an input
        """
        if self.morphism != morphism.name:
            raise InputError(f"Certificate is for '{self.morphism}', not '{morphism.name}'")
        missing = [k for k in _REQUIRED_INPUTS[self.kind] if k not in self.inputs]
        if missing:
            raise InputError(f"Certificate lacks inputs {missing}")
        edge_algebra = morphism.target if self.kind == CertificateKind.PREIMAGE else morphism.source
        return TransferCertificate(
            kind=self.kind.value,
            morphism=self.morphism,
            inputs={k: Element.from_vector(terms_to_vector(v)) for k, v in self.inputs.items()},
            result={k: Element.from_vector(terms_to_vector(v)) for k, v in self.result.items()},
            edge=self.edge.to_simplex(edge_algebra),
            input_edge=self.input_edge.to_simplex(morphism.target) if self.input_edge else None,
            layers=[Layer(layer.weight, {k: Element.from_vector(terms_to_vector(v))
                                         for k, v in layer.witnesses.items()})
                    for layer in self.layers],
        )

    @classmethod
    def from_certificate(cls, certificate: TransferCertificate) -> "CertificateDocument":
        def encode(values: Dict[str, Element]) -> Dict[str, List[TermModel]]:
            return {k: vector_to_terms(v.to_vector()) for k, v in sorted(values.items())}

        return cls(
            schema_version=settings.SCHEMA_VERSION,
            kind=CertificateKind(certificate.kind),
            morphism=certificate.morphism,
            inputs=encode(certificate.inputs),
            result=encode(certificate.result),
            edge=SimplexDocument.from_simplex(certificate.edge),
            input_edge=SimplexDocument.from_simplex(certificate.input_edge) if certificate.input_edge else None,
            layers=[LayerModel(weight=layer.weight, witnesses=encode(layer.witnesses))
                    for layer in certificate.layers],
        )
