"""
Pydantic models for algebra, morphism and element documents.
"""
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.config import settings
from app.services.exact_linalg import Vector, clean, format_rational, parse_rational
from app.services.slie import (
    BasisSymbol,
    Element,
    InftyMorphism,
    OrdinaryLInfinity,
    SLieAlgebra,
    shift_convention,
    unshift_convention,
)


def _check_schema_version(v: int) -> int:
    if v != settings.SCHEMA_VERSION:
        raise ValueError(f"Unsupported schema_version {v} (expected {settings.SCHEMA_VERSION})")
    return v


class Convention(str, Enum):
    """Sign and degree convention of an algebra document."""
    SHIFTED = "shifted"
    ORDINARY = "ordinary"


class TermModel(BaseModel):
    """One coefficient of a vector in L."""
    coef: str = Field(..., description="Rational coefficient as 'p/q' or 'p'")
    basis: str = Field(..., description="Basis symbol name", min_length=1)

    model_config = ConfigDict(extra="forbid")

    @field_validator('coef')
    @classmethod
    def validate_coef(cls, v):
        """Validate the rational format."""
        parse_rational(v)
        return v


def terms_to_vector(terms: List[TermModel]) -> Vector:
    out: Vector = {}
    for term in terms:
        out[term.basis] = out.get(term.basis, Fraction(0)) + parse_rational(term.coef)
    return clean(out)


def vector_to_terms(vector: Vector) -> List[TermModel]:
    return [TermModel(coef=format_rational(c), basis=name) for name, c in sorted(clean(vector).items())]


class BasisEntry(BaseModel):
    """A homogeneous basis symbol with its degree and filtration weight."""
    name: str = Field(..., description="Unique symbol name", min_length=1)
    degree: int = Field(..., description="Cohomological degree")
    weight: int = Field(..., description="Filtration weight (at least 1)", ge=1)

    model_config = ConfigDict(extra="forbid")


class TableEntry(BaseModel):
    """One bracket or Taylor coefficient on a word of basis symbols."""
    inputs: List[str] = Field(..., description="Input symbol names")
    output: List[TermModel] = Field(default_factory=list, description="Image vector")

    model_config = ConfigDict(extra="forbid")


class AlgebraDocument(BaseModel):
    """A truncated filtered L∞-algebra given by its structure tables."""
    schema_version: int = Field(..., description="Document schema version")
    name: str = Field("L", description="Name other documents use to refer to this algebra", min_length=1)
    convention: Convention = Field(Convention.SHIFTED, description="Shifted or ordinary convention")
    truncation: int = Field(..., description="Truncation depth N", ge=0)
    max_arity: int = Field(..., description="Largest bracket arity A", ge=0)
    basis: List[BasisEntry] = Field(default_factory=list, description="Homogeneous basis")
    differential: Dict[str, List[TermModel]] = Field(default_factory=dict, description="Images of ∂")
    brackets: List[TableEntry] = Field(default_factory=list, description="Bracket table")

    model_config = ConfigDict(extra="forbid")

    @field_validator('schema_version')
    @classmethod
    def validate_schema_version(cls, v):
        """Validate the schema version."""
        return _check_schema_version(v)

    @field_validator('brackets')
    @classmethod
    def validate_brackets(cls, v):
        """Validate bracket arities."""
        for entry in v:
            if len(entry.inputs) < 2:
                raise ValueError(f"Bracket {entry.inputs} has arity below 2")
        return v

    def to_algebra(self, truncation: Optional[int] = None) -> SLieAlgebra:
        """Build the algebra, converting ordinary documents and applying a truncation override."""
        symbols = [BasisSymbol(b.name, b.degree, b.weight) for b in self.basis]
        differential = {name: terms_to_vector(terms) for name, terms in self.differential.items()}
        brackets = {tuple(e.inputs): terms_to_vector(e.output) for e in self.brackets}
        depth = self.truncation if truncation is None else truncation
        if self.convention == Convention.ORDINARY:
            ordinary = OrdinaryLInfinity(symbols, differential, brackets, depth, self.max_arity, self.name)
            return shift_convention(ordinary)
        return SLieAlgebra(symbols, differential, brackets, depth, self.max_arity, self.name)

    @classmethod
    def from_algebra(cls, algebra: SLieAlgebra, convention: Convention = Convention.SHIFTED) -> "AlgebraDocument":
        source = unshift_convention(algebra) if convention == Convention.ORDINARY else algebra
        return cls(
            schema_version=settings.SCHEMA_VERSION,
            name=algebra.name,
            convention=convention,
            truncation=source.truncation,
            max_arity=source.max_arity,
            basis=[BasisEntry(name=s.name, degree=s.degree, weight=s.weight) for s in source.symbols],
            differential={name: vector_to_terms(image) for name, image in sorted(source.differential.items())},
            brackets=[TableEntry(inputs=list(key), output=vector_to_terms(image))
                      for key, image in sorted(source.brackets.items(), key=lambda kv: _word_order(source, kv[0]))],
        )


def _word_order(algebra, key):
    return len(key), [algebra.index_of[n] for n in key]


class MorphismDocument(BaseModel):
    """An ∞-morphism between two named algebras, given by its Taylor coefficients."""
    schema_version: int = Field(..., description="Document schema version")
    name: str = Field("U", description="Morphism name", min_length=1)
    source: str = Field(..., description="Name of the source algebra")
    target: str = Field(..., description="Name of the target algebra")
    max_arity: Optional[int] = Field(None, description="Largest Taylor arity (default: longest entry)", ge=1)
    taylor: List[TableEntry] = Field(default_factory=list, description="Taylor coefficients")

    model_config = ConfigDict(extra="forbid")

    @field_validator('schema_version')
    @classmethod
    def validate_schema_version(cls, v):
        """Validate the schema version."""
        return _check_schema_version(v)

    def to_morphism(self, source: SLieAlgebra, target: SLieAlgebra) -> InftyMorphism:
        taylor = {tuple(e.inputs): terms_to_vector(e.output) for e in self.taylor}
        return InftyMorphism(source, target, taylor, self.max_arity, self.name)

    @classmethod
    def from_morphism(cls, morphism: InftyMorphism) -> "MorphismDocument":
        return cls(
            schema_version=settings.SCHEMA_VERSION,
            name=morphism.name,
            source=morphism.source.name,
            target=morphism.target.name,
            max_arity=morphism.max_arity,
            taylor=[TableEntry(inputs=list(key), output=vector_to_terms(image))
                    for key, image in sorted(morphism.taylor.items(),
                                             key=lambda kv: _word_order(morphism.source, kv[0]))],
        )


class ElementDocument(BaseModel):
    """An element of L, as given inline on the command line or emitted in results."""
    schema_version: int = Field(settings.SCHEMA_VERSION, description="Document schema version")
    algebra: Optional[str] = Field(None, description="Name of the algebra the element lives in")
    terms: List[TermModel] = Field(default_factory=list, description="Coefficients")

    model_config = ConfigDict(extra="forbid")

    @field_validator('schema_version')
    @classmethod
    def validate_schema_version(cls, v):
        """Validate the schema version."""
        return _check_schema_version(v)

    def to_element(self) -> Element:
        return Element.from_vector(terms_to_vector(self.terms))

    @classmethod
    def from_element(cls, element: Element, algebra: Optional[str] = None) -> "ElementDocument":
        return cls(schema_version=settings.SCHEMA_VERSION, algebra=algebra,
                   terms=vector_to_terms(element.to_vector()))
