"""Exception hierarchy shared by all ionphase modules."""


class IonPhaseError(Exception):
    """Base class for every error raised by this package."""


class DomainError(IonPhaseError, ValueError):
    """An argument lies outside the physical domain of a formula."""


class SingularPointError(DomainError):
    """The phase is undefined because the complex field amplitude is exactly zero."""


class NoCoolingError(DomainError):
    """Doppler cooling needs a red (negative) detuning."""


class ConfigurationError(IonPhaseError, ValueError):
    """Inconsistent heterodyne/TDC configuration."""


class InsufficientDataError(IonPhaseError):
    """A fit was requested on a histogram without any counts."""


class ParseError(IonPhaseError, ValueError):
    def __init__(self, message, key=None, line=None):
        self.key = key
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


class ValidationError(IonPhaseError, ValueError):
    """A parsed configuration violates one of its invariants."""
