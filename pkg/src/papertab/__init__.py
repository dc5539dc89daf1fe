"""papertab: retrieval-grounded extraction of structured tables from parsed papers."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ConflictError,
    FormatError,
    GatewayError,
    PapertabError,
    PlanValidationError,
    SchemaError,
    StorageError,
    StructuredOutputError,
    UsageError,
)

__all__ = [
    "__version__",
    "PapertabError",
    "UsageError",
    "FormatError",
    "ConflictError",
    "GatewayError",
    "StructuredOutputError",
    "SchemaError",
    "PlanValidationError",
    "ConfigError",
    "StorageError",
]
