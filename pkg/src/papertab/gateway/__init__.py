"""Model access layer: prompt templates, providers, caching, structured output."""
from .cache import NullCache, ResponseCache, digest
from .gateway import Gateway, GatewayConfig, ModelClass, build_provider, mock_gateway
from .providers import HTTPProvider, MockProvider, Provider, ProviderError, ProviderTransientError
from .structured import parse_json_payload, repair_prompt, strip_code_fences, validate_shape
from .templates import TEMPLATES, PromptTemplate, get_template

__all__ = [
    "Gateway",
    "GatewayConfig",
    "ModelClass",
    "build_provider",
    "mock_gateway",
    "Provider",
    "MockProvider",
    "HTTPProvider",
    "ProviderError",
    "ProviderTransientError",
    "ResponseCache",
    "NullCache",
    "digest",
    "PromptTemplate",
    "TEMPLATES",
    "get_template",
    "parse_json_payload",
    "validate_shape",
    "repair_prompt",
    "strip_code_fences",
]
