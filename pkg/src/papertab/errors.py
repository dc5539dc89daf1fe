"""Exception hierarchy shared across the package."""
from __future__ import annotations


class PapertabError(Exception):
    """Base class for all package errors."""


class UsageError(PapertabError):
    """Caller violated a precondition (bad argument, unknown coordinate)."""


class FormatError(PapertabError):
    """A document bundle or stored file does not match the expected format."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ConflictError(PapertabError):
    """Duplicate identity within a batch, or a stale-revision mutation."""


class NotFoundError(PapertabError):
    """A referenced resource (collection, query, record) does not exist."""


class GatewayError(PapertabError):
    """Provider call failed after retries."""


class StructuredOutputError(GatewayError):
    """Model output failed validation even after the repair round.

    Carries the raw model text for diagnostics.
    """

    def __init__(self, message: str, raw_text: str = ""):
        super().__init__(message)
        self.raw_text = raw_text


class SchemaError(PapertabError):
    """Table-schema inference produced an unusable structure."""


class PlanValidationError(PapertabError):
    """A standardization plan is internally inconsistent."""


class ConfigError(PapertabError):
    """Gateway or index configuration is unusable (e.g. dimension mismatch)."""


class StorageError(PapertabError):
    """Persisted state could not be read back."""
