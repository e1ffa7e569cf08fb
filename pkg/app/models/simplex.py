"""
Pydantic models for MC simplex documents.
"""
from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config import settings
from app.errors import InputError
from app.services.forms import PolyForm
from app.services.mc import MCSimplex
from app.services.slie import Element, SLieAlgebra
from app.models.algebra import TermModel, _check_schema_version


class FormTermModel(TermModel):
    """One monomial term c · t^e dt_I of a basis symbol's coefficient form."""
    t: List[int] = Field(default_factory=list, description="Exponents of t_1..t_n")
    dt: List[int] = Field(default_factory=list, description="Strictly increasing 1-based dt indices")

    @field_validator('t')
    @classmethod
    def validate_exponents(cls, v):
        """Validate exponents."""
        if any(e < 0 for e in v):
            raise ValueError('Exponents must be non-negative')
        return v


class SimplexDocument(BaseModel):
    """An element of L ⊗ Ω_n; certified only after an independent curvature check."""
    schema_version: int = Field(..., description="Document schema version")
    algebra: str = Field(..., description="Name of the algebra", min_length=1)
    dim: int = Field(..., description="Simplex dimension n", ge=0)
    terms: List[FormTermModel] = Field(default_factory=list, description="Form terms per basis symbol")
    certified: bool = Field(False, description="Whether the value passed an independent MC check")

    model_config = ConfigDict(extra="forbid")

    @field_validator('schema_version')
    @classmethod
    def validate_schema_version(cls, v):
        """Validate the schema version."""
        return _check_schema_version(v)

    def to_element(self) -> Element:
        grouped: Dict[str, List[dict]] = {}
        for term in self.terms:
            grouped.setdefault(term.basis, []).append({"coef": term.coef, "t": term.t, "dt": term.dt})
        for name, terms in grouped.items():
            for term in terms:
                if any(i < 1 or i > self.dim for i in term["dt"]):
                    raise InputError(f"dt index out of range in the coefficient of '{name}'")
        return Element(self.dim, {name: PolyForm.from_terms(self.dim, terms) for name, terms in grouped.items()})

    def to_simplex(self, algebra: SLieAlgebra) -> MCSimplex:
        """
        Raises:
            InputError: If the document names another algebra
        """
        if self.algebra != algebra.name:
            raise InputError(f"Simplex belongs to '{self.algebra}', not '{algebra.name}'")
        value = self.to_element()
        algebra.check_element(value)
        return MCSimplex(algebra, value)

    @classmethod
    def from_element(cls, value: Element, algebra: str, certified: bool = False) -> "SimplexDocument":
        terms = []
        for name in sorted(value.terms):
            for term in value.terms[name].to_terms():
                terms.append(FormTermModel(basis=name, **term))
        return cls(schema_version=settings.SCHEMA_VERSION, algebra=algebra, dim=value.dim,
                   terms=terms, certified=certified)

    @classmethod
    def from_simplex(cls, simplex: MCSimplex) -> "SimplexDocument":
        return cls.from_element(simplex.value, simplex.algebra.name, simplex.certified)
