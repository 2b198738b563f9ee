"""Exception hierarchy.

Errors carry an optional ``step`` naming the stage of the construction
that failed, so the CLI can report it and pick the exit code.
"""


class GaussRadonError(Exception):
    """Base class for all library errors."""

    exit_code = 1

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step

    def as_dict(self):
        return {"error": type(self).__name__, "message": str(self), "step": self.step}


class InvariantError(GaussRadonError, ValueError):
    """A value violates a structural invariant (orthonormality, support, ...)."""

    exit_code = 3


class BoundViolation(GaussRadonError, ValueError):
    """A functional returned a value outside its declared bound."""

    exit_code = 3


class ProofStepError(GaussRadonError):
    """A step of a construction could not be carried out or certified."""

    exit_code = 3


class CertificateError(ProofStepError):
    """A tail-bound certificate for an adapted sequence failed."""


class SeparationError(ProofStepError):
    """The point is not separated from the convex body."""


class ToleranceError(GaussRadonError):
    """A numeric check fell outside its tolerance."""

    exit_code = 4


class ConfigError(GaussRadonError, ValueError):
    """Malformed experiment configuration or unknown registry name."""

    exit_code = 2

    def __init__(self, message, field=None):
        super().__init__(message, step=None)
        self.field = field

    def as_dict(self):
        d = super().as_dict()
        d["field"] = self.field
        return d
