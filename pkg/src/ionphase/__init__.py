"""Phase shifting a weak coherent beam with a single trapped ion."""
from ._backend import BACKEND
from .errors import (
    ConfigurationError,
    DomainError,
    InsufficientDataError,
    IonPhaseError,
    NoCoolingError,
    ParseError,
    SingularPointError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigurationError",
    "DomainError",
    "InsufficientDataError",
    "IonPhaseError",
    "NoCoolingError",
    "ParseError",
    "SingularPointError",
    "ValidationError",
]
