"""Numerical toolkit for Lorentzian metrics, distributions and stretched metrics."""

from . import jet
from .errors import (BlowUpError, ContractError, DegeneracyError, DomainEscapeError, EvaluationDomainError,
                     LorentzlabError, TransversalityError, UnsupportedIndexError)
from .fields import BracketField, DerivedField, MetricField, ScalarField, VectorField, lie_bracket

__all__ = [
    "jet", "BlowUpError", "ContractError", "DegeneracyError", "DomainEscapeError", "EvaluationDomainError",
    "LorentzlabError", "TransversalityError", "UnsupportedIndexError", "BracketField", "DerivedField",
    "MetricField", "ScalarField", "VectorField", "lie_bracket",
]
__version__ = "0.1.0"
