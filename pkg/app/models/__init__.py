"""
Models package for the mcgroupoid JSON documents.
Exports all Pydantic models for use across the application.
"""

# Import all models to make them available when importing from app.models
from .algebra import *
from .certificate import *
from .report import *
from .simplex import *

__all__ = [
    # Algebra models
    "Convention",
    "TermModel",
    "BasisEntry",
    "TableEntry",
    "AlgebraDocument",
    "MorphismDocument",
    "ElementDocument",

    # Simplex models
    "FormTermModel",
    "SimplexDocument",

    # Certificate models
    "CertificateKind",
    "LayerModel",
    "CertificateDocument",

    # Report models
    "Status",
    "ViolationModel",
    "ReportDocument",
    "ResultDocument",
    "ErrorDocument",
]
