"""Exception types shared across the package.

Every error carries a short machine-parsable ``reason`` (e.g. ``capacity:solver``)
that the CLI prints on stderr; the exit-code mapping is: validation errors
exit 2, capacity/precision errors exit 1.
"""


class DomlabError(Exception):
    """Base class; ``reason`` is a short machine-parsable tag."""

    reason = "error"

    def __init__(self, message: str, reason: str | None = None):
        super().__init__(message)
        if reason is not None:
            self.reason = reason


class ValidationError(DomlabError):
    """Invalid argument or configuration (CLI exit code 2)."""

    reason = "validation"


class CapacityError(DomlabError):
    """Input exceeds a configured size/work cap (CLI exit code 1)."""

    reason = "capacity"


class PrecisionError(DomlabError):
    """High-precision recomputation failed to confirm a value (CLI exit code 1)."""

    reason = "precision"
