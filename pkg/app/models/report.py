"""
Pydantic models for check reports, operation results and error documents.
"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.errors import ContractViolation, HypothesisRefuted, McGroupoidError, PreconditionError
from app.models.algebra import AlgebraDocument, ElementDocument, TermModel, vector_to_terms
from app.models.certificate import CertificateDocument
from app.models.simplex import SimplexDocument
from app.services.gm import QisoReport, VerificationReport
from app.services.slie import CheckReport, Element


class Status(str, Enum):
    """Outcome of a command."""
    PASS = "pass"
    FAIL = "fail"
    ERROR = "error"


class ViolationModel(BaseModel):
    """One failed identity or graded check."""
    rule: str = Field(..., description="Name of the failed rule")
    inputs: List[str] = Field(default_factory=list, description="Basis word the rule was checked on")
    detail: str = Field("", description="Human-readable detail")
    residual: List[TermModel] = Field(default_factory=list, description="Nonzero residual or witness")
    weight: Optional[int] = Field(None, description="Filtration weight of a graded failure")
    degree: Optional[int] = Field(None, description="Degree of a graded failure")

    model_config = ConfigDict(extra="forbid")


class ReportDocument(BaseModel):
    """Report of a structure, quasi-isomorphism or certificate check."""
    schema_version: int = Field(settings.SCHEMA_VERSION, description="Document schema version")
    check: str = Field(..., description="Which check ran")
    subject: str = Field(..., description="Name of the checked object")
    status: Status = Field(..., description="pass or fail")
    checked: int = Field(0, description="Number of individual checks evaluated")
    violations: List[ViolationModel] = Field(default_factory=list, description="Failures found")

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_check(cls, check: str, report: CheckReport) -> "ReportDocument":
        return cls(
            check=check,
            subject=report.subject,
            status=Status.PASS if report.ok else Status.FAIL,
            checked=report.checked,
            violations=[ViolationModel(rule=v.rule, inputs=list(v.inputs), detail=v.detail,
                                       residual=vector_to_terms(v.residual))
                        for v in report.violations],
        )

    @classmethod
    def from_qiso(cls, report: QisoReport) -> "ReportDocument":
        return cls(
            check="qiso",
            subject=report.morphism,
            status=Status.PASS if report.ok else Status.FAIL,
            checked=report.checked,
            violations=[ViolationModel(rule="graded-cohomology-isomorphism", detail=f.reason,
                                       residual=vector_to_terms(f.witness), weight=f.weight, degree=f.degree)
                        for f in report.failures],
        )

    @classmethod
    def from_verification(cls, subject: str, report: VerificationReport) -> "ReportDocument":
        return cls(
            check="certificate",
            subject=subject,
            status=Status.PASS if report.ok else Status.FAIL,
            checked=1,
            violations=[ViolationModel(rule="certificate", detail=message) for message in report.failures],
        )


class ResultDocument(BaseModel):
    """Output of an operation: named elements, simplices and numbers."""
    schema_version: int = Field(settings.SCHEMA_VERSION, description="Document schema version")
    operation: str = Field(..., description="Operation that produced the result")
    status: Status = Field(Status.PASS, description="Outcome")
    elements: Dict[str, ElementDocument] = Field(default_factory=dict, description="Elements of L")
    simplices: Dict[str, SimplexDocument] = Field(default_factory=dict, description="MC simplices")
    numbers: Dict[str, int] = Field(default_factory=dict, description="Integer results")
    vectors: Dict[str, List[List[str]]] = Field(default_factory=dict, description="Lists of rational vectors")
    algebra: Optional[AlgebraDocument] = Field(None, description="An emitted algebra")
    certificate: Optional[CertificateDocument] = Field(None, description="An emitted certificate")
    reports: List[ReportDocument] = Field(default_factory=list, description="Check reports")

    model_config = ConfigDict(extra="forbid")

    def add_element(self, key: str, element: Element, algebra: Optional[str] = None) -> "ResultDocument":
        self.elements[key] = ElementDocument.from_element(element, algebra)
        return self


class ErrorDocument(BaseModel):
    """Emitted on stdout when a command fails."""
    schema_version: int = Field(settings.SCHEMA_VERSION, description="Document schema version")
    status: Status = Field(Status.ERROR, description="Always error or fail")
    error: str = Field(..., description="Exception class name")
    message: str = Field(..., description="Error message")
    residual: Optional[List[TermModel]] = Field(None, description="Residual of a failed precondition or check")
    residual_form: Optional[SimplexDocument] = Field(None, description="Residual living on a simplex")
    weight: Optional[int] = Field(None, description="Weight of a refuting class")
    degree: Optional[int] = Field(None, description="Degree of a refuting class")
    witness: Optional[List[TermModel]] = Field(None, description="Refuting class")
    report: Optional[ReportDocument] = Field(None, description="Failed quasi-isomorphism report")

    model_config = ConfigDict(extra="forbid")

    @classmethod
    def from_exception(cls, error: McGroupoidError) -> "ErrorDocument":
        document = cls(
            status=Status.FAIL if isinstance(error, (PreconditionError, ContractViolation, HypothesisRefuted))
            else Status.ERROR,
            error=type(error).__name__,
            message=str(error),
        )
        residual = getattr(error, "residual", None)
        if isinstance(residual, Element) and residual.dim == 0:
            document.residual = vector_to_terms(residual.to_vector())
        elif isinstance(residual, Element):
            document.residual_form = SimplexDocument.from_element(residual, "residual")
        elif isinstance(residual, dict):
            document.residual = vector_to_terms(residual)
        if isinstance(error, HypothesisRefuted):
            document.weight = error.weight
            document.degree = error.degree
            if isinstance(error.witness, Element):
                document.witness = vector_to_terms(error.witness.to_vector())
            if isinstance(error.report, QisoReport):
                document.report = ReportDocument.from_qiso(error.report)
        return document
