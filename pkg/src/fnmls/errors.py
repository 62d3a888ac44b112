"""Exception types shared across the package."""


class FNError(Exception):
    """Base class for library errors."""


class DomainError(FNError, ValueError):
    """Input outside the domain of a formula (non-positive length, bad angle...)."""


class PreconditionError(FNError, ValueError):
    """A stated hypothesis of an estimate does not hold for the supplied data."""


class RegimeError(PreconditionError):
    """Data lies outside the small-parameter regime an estimate requires."""


class InconsistentDataError(FNError, ValueError):
    """Observed lengths cannot come from any structure with the given cuffs."""


class BoundaryCase(FNError, ValueError):
    """Evaluation requested exactly on a locus where a derivative jumps."""


class ConsistencyError(FNError, RuntimeError):
    """A numerical self-check (continuity, closure...) exceeded its tolerance."""


class SchemaError(FNError, ValueError):
    """Malformed or unsupported surface / config file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
