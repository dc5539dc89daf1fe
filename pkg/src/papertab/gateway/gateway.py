"""Provider-agnostic model access: templating, caching, rate limiting, repair."""
from __future__ import annotations

import base64
import io
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import ConfigError, GatewayError, StructuredOutputError, UsageError
from .cache import NullCache, ResponseCache, digest
from .providers import (
    HTTPProvider,
    MockProvider,
    Provider,
    ProviderError,
    ProviderTransientError,
)
from .structured import parse_json_payload, repair_prompt, validate_shape
from .templates import get_template

LOGGER = logging.getLogger(__name__)


class ModelClass(str, Enum):
    REASONER = "reasoner"
    SUMMARIZER = "summarizer"
    VISION = "vision"
    EMBEDDER = "embedder"


# structure inference, table work, extraction, and judging decode greedily;
# free-text summaries and labels get a little temperature
_TEMPERATURES = {
    "schema_design": 0.0,
    "meta_extraction": 0.0,
    "table_identification": 0.0,
    "table_structuring": 0.0,
    "record_extraction": 0.0,
    "question_reconstruction": 0.0,
    "sentence_relevance": 0.0,
    "claim_decomposition": 0.0,
    "claim_support": 0.0,
    "chunk_summary": 0.3,
    "answer_summary": 0.3,
    "cluster_label": 0.3,
    "figure_description": 0.3,
}

_DEFAULT_MODELS = {
    "reasoner": "mock-reasoner",
    "summarizer": "mock-summarizer",
    "vision": "mock-vision",
    "embedder": "mock-embedder",
}


@dataclass
class GatewayConfig:
    provider: str = "mock"
    base_url: str = ""
    api_key_env: str = "PAPERTAB_API_KEY"
    models: dict[str, str] = field(default_factory=lambda: dict(_DEFAULT_MODELS))
    budget: int = 4
    cache_dir: str | None = None
    cache_enabled: bool = True
    retries: int = 2
    backoff: float = 0.05
    embed_dim: int = 64
    embed_batch: int = 64
    embed_input_limit: int = 8000
    max_image_bytes: int = 4_000_000

    def __post_init__(self) -> None:
        for cls in ModelClass:
            model_id = self.models.get(cls.value)
            if not model_id or not isinstance(model_id, str):
                raise ConfigError(f"no model id configured for class '{cls.value}'")
        if self.budget < 1:
            raise ConfigError("budget must be >= 1")

    @classmethod
    def from_file(cls, path: str | Path) -> "GatewayConfig":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown gateway config keys: {sorted(unknown)}")
        merged_models = dict(_DEFAULT_MODELS)
        merged_models.update(data.pop("models", {}))
        return cls(models=merged_models, **data)


def build_provider(config: GatewayConfig) -> Provider:
    if config.provider == "mock":
        return MockProvider(dim=config.embed_dim)
    if config.provider == "http":
        import os

        api_key = os.environ.get(config.api_key_env, "")
        if not api_key:
            raise ConfigError(
                f"provider credentials expected in ${config.api_key_env}"
            )
        if not config.base_url:
            raise ConfigError("http provider requires base_url")
        return HTTPProvider(config.base_url, api_key)
    raise ConfigError(f"unknown provider '{config.provider}'")


class Gateway:
    """Shared entry point for chat-completion, vision, and embedding calls."""

    def __init__(self, provider: Provider, config: GatewayConfig | None = None):
        self.provider = provider
        self.config = config or GatewayConfig()
        self._admission = threading.BoundedSemaphore(self.config.budget)
        if self.config.cache_enabled and self.config.cache_dir:
            self.cache: ResponseCache | NullCache = ResponseCache(self.config.cache_dir)
        else:
            self.cache = NullCache()
        self._embed_dim: int | None = None

    # -- internals ---------------------------------------------------------

    def _model_id(self, model_class: ModelClass) -> str:
        return self.config.models[model_class.value]

    def _call_with_retry(self, fn, *args) -> Any:
        delay = self.config.backoff
        last: Exception | None = None
        for attempt in range(self.config.retries + 1):
            try:
                with self._admission:
                    return fn(*args)
            except ProviderTransientError as exc:
                last = exc
                if attempt < self.config.retries:
                    time.sleep(delay)
                    delay *= 2
            except ProviderError as exc:
                raise GatewayError(str(exc)) from exc
        raise GatewayError(f"provider failed after retries: {last}") from last

    # -- chat --------------------------------------------------------------

    def render(self, template_id: str, bindings: dict[str, str]) -> str:
        return get_template(template_id).render(bindings)

    def complete(
        self,
        template_id: str,
        bindings: dict[str, str],
        model_class: ModelClass = ModelClass.REASONER,
        temperature: float | None = None,
    ) -> str:
        prompt = self.render(template_id, bindings)
        if temperature is None:
            temperature = _TEMPERATURES.get(template_id, 0.0)
        return self.complete_prompt(prompt, model_class, temperature)

    def complete_prompt(
        self, prompt: str, model_class: ModelClass, temperature: float = 0.0
    ) -> str:
        model_id = self._model_id(model_class)
        key = digest("complete", model_id, prompt)
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        text = self._call_with_retry(
            self.provider.complete, model_id, prompt, temperature
        )
        self.cache.put(key, text)
        return text

    def complete_structured(
        self,
        template_id: str,
        bindings: dict[str, str],
        expected_shape: dict[str, Any],
        model_class: ModelClass = ModelClass.REASONER,
    ) -> Any:
        prompt = self.render(template_id, bindings)
        temperature = _TEMPERATURES.get(template_id, 0.0)
        raw = self.complete_prompt(prompt, model_class, temperature)
        value, errors = self._parse_and_validate(raw, expected_shape)
        if not errors:
            return value
        retry = repair_prompt(prompt, raw, errors)
        raw2 = self.complete_prompt(retry, model_class, temperature)
        value, errors = self._parse_and_validate(raw2, expected_shape)
        if not errors:
            return value
        raise StructuredOutputError(
            f"model output failed validation after repair: {'; '.join(errors[:5])}",
            raw_text=raw2,
        )

    @staticmethod
    def _parse_and_validate(
        raw: str, expected_shape: dict[str, Any]
    ) -> tuple[Any, list[str]]:
        try:
            value = parse_json_payload(raw)
        except ValueError as exc:
            return None, [str(exc)]
        return value, validate_shape(value, expected_shape)

    # -- vision ------------------------------------------------------------

    def describe_image(
        self,
        image: bytes,
        prompt_text: str,
        model_class: ModelClass = ModelClass.VISION,
    ) -> str:
        if not image:
            raise UsageError("image is empty")
        if len(image) > self.config.max_image_bytes:
            image = self._downscale(image)
            if len(image) > self.config.max_image_bytes:
                raise GatewayError("image still oversized after one downscale")
        model_id = self._model_id(model_class)
        key = digest("vision", model_id, prompt_text, digest(image))
        cached = self.cache.get(key)
        if cached is not None:
            return cached
        b64 = base64.b64encode(image).decode("ascii")
        text = self._call_with_retry(
            self.provider.complete_vision, model_id, prompt_text, b64, 0.3
        )
        self.cache.put(key, text)
        return text

    @staticmethod
    def _downscale(image: bytes) -> bytes:
        from PIL import Image

        with Image.open(io.BytesIO(image)) as img:
            img = img.convert("RGB")
            img.thumbnail((img.width // 2 or 1, img.height // 2 or 1))
            out = io.BytesIO()
            img.save(out, format="JPEG", quality=80)
        return out.getvalue()

    # -- embeddings --------------------------------------------------------

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        if not texts:
            raise UsageError("embed requires at least one text")
        limit = self.config.embed_input_limit
        prepared: list[str] = []
        for text in texts:
            if len(text) > limit:
                LOGGER.warning("embedding input truncated from %d to %d chars", len(text), limit)
                text = text[:limit]
            prepared.append(text)

        model_id = self._model_id(ModelClass.EMBEDDER)
        vectors: dict[int, np.ndarray] = {}
        pending: list[tuple[int, str]] = []
        for i, text in enumerate(prepared):
            cached = self.cache.get(digest("embed", model_id, text))
            if cached is not None:
                vectors[i] = np.asarray(cached, dtype=np.float64)
            else:
                pending.append((i, text))

        for start in range(0, len(pending), self.config.embed_batch):
            batch = pending[start : start + self.config.embed_batch]
            raw = self._call_with_retry(
                self.provider.embed, model_id, [t for _, t in batch]
            )
            if len(raw) != len(batch):
                raise GatewayError(
                    f"embedder returned {len(raw)} vectors for {len(batch)} inputs"
                )
            for (i, text), vec in zip(batch, raw):
                arr = np.asarray(vec, dtype=np.float64)
                norm = float(np.linalg.norm(arr))
                if norm < 1e-12:
                    raise GatewayError("embedder returned a zero vector")
                arr = arr / norm
                self.cache.put(digest("embed", model_id, text), arr.tolist())
                vectors[i] = arr

        out = [vectors[i] for i in range(len(prepared))]
        dims = {v.shape[0] for v in out}
        if self._embed_dim is not None:
            dims.add(self._embed_dim)
        if len(dims) > 1:
            raise ConfigError(f"embedder returned mixed dimensions: {sorted(dims)}")
        self._embed_dim = out[0].shape[0]
        return out


def mock_gateway(
    cache_dir: str | Path | None = None,
    dim: int = 64,
    budget: int = 4,
) -> Gateway:
    """Gateway over the deterministic mock provider (tests, offline runs)."""
    config = GatewayConfig(
        provider="mock",
        cache_dir=str(cache_dir) if cache_dir else None,
        cache_enabled=cache_dir is not None,
        embed_dim=dim,
        budget=budget,
    )
    return Gateway(MockProvider(dim=dim), config)
