"""Model providers: a deterministic mock and an OpenAI-compatible HTTP client."""
from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from typing import Callable, Protocol

import numpy as np

from .cache import digest


class ProviderTransientError(Exception):
    """Retryable failure: timeout, rate limit, transient server error."""


class ProviderError(Exception):
    """Non-retryable provider failure."""


class Provider(Protocol):
    def complete(self, model_id: str, prompt: str, temperature: float) -> str: ...

    def complete_vision(
        self, model_id: str, prompt: str, image_b64: str, temperature: float
    ) -> str: ...

    def embed(self, model_id: str, texts: list[str]) -> list[list[float]]: ...


Responder = str | Exception | Callable[[str], str]

_COUNT_SENTENCES_RE = re.compile(r"^Below are (\d+) numbered sentences")
_COUNT_CLAIMS_RE = re.compile(r"^Below are (\d+) numbered claims")
_COUNT_QUESTIONS_RE = re.compile(r"write (\d+) distinct questions")
_COLUMNS_RE = re.compile(r"Columns \(exact keys\): (\[.*?\])\n")
_CAPTION_RE = re.compile(r"This is the caption: (.*)\.\s*$", re.DOTALL)
_CONTENT_RE = re.compile(r"\nContent:\n(.*?)\n\nReply with", re.DOTALL)
_STATS_RE = re.compile(r"Table statistics: (.*)")
_ANSWER_RE = re.compile(r"Answer: (.*)")
_MEMBER_RE = re.compile(r"^- (.*): \d+$", re.MULTILINE)

_META_KEYS = (
    "Title", "Abstract", "Year", "Author", "Journal/Conference", "ISSN",
    "Volume", "Issue", "Page", "DOI", "Link", "Publisher", "Language",
)


class MockProvider:
    """Deterministic provider for tests and offline runs.

    Resolution order for text calls: exact prompt-digest script, then substring
    rules (first match wins), then a templated fallback keyed off the prompt
    head. Embeddings are unit-norm vectors seeded from the text digest, so
    identical strings always embed identically across processes.
    """

    def __init__(self, dim: int = 64, latency: float = 0.0):
        self.dim = dim
        self.latency = latency
        self.script: dict[str, str] = {}
        self.rules: list[tuple[str, Responder]] = []
        self.embed_overrides: dict[str, list[float]] = {}
        self.down = False
        self.calls = 0
        self.complete_calls = 0
        self.vision_calls = 0
        self.embed_calls = 0
        self.max_in_flight = 0
        self._in_flight = 0
        self._lock = threading.Lock()

    # -- scripting helpers -------------------------------------------------

    def respond(self, contains: str, response: Responder) -> None:
        """Answer any prompt containing `contains` with `response`."""
        self.rules.append((contains, response))

    def respond_digest(self, prompt: str, response: str) -> None:
        """Answer one exact prompt (keyed by its digest)."""
        self.script[digest(prompt)] = response

    # -- bookkeeping -------------------------------------------------------

    def _enter(self) -> None:
        with self._lock:
            self.calls += 1
            self._in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self._in_flight)
        if self.down:
            with self._lock:
                self._in_flight -= 1
            raise ProviderTransientError("mock provider marked down")
        if self.latency:
            time.sleep(self.latency)

    def _exit(self) -> None:
        with self._lock:
            self._in_flight -= 1

    # -- provider API ------------------------------------------------------

    def complete(self, model_id: str, prompt: str, temperature: float) -> str:
        self._enter()
        try:
            self.complete_calls += 1
            return self._resolve(prompt)
        finally:
            self._exit()

    def complete_vision(
        self, model_id: str, prompt: str, image_b64: str, temperature: float
    ) -> str:
        self._enter()
        try:
            self.vision_calls += 1
            return self._resolve(prompt)
        finally:
            self._exit()

    def embed(self, model_id: str, texts: list[str]) -> list[list[float]]:
        self._enter()
        try:
            self.embed_calls += 1
            return [self._embed_one(t) for t in texts]
        finally:
            self._exit()

    def _embed_one(self, text: str) -> list[float]:
        if text in self.embed_overrides:
            return list(self.embed_overrides[text])
        seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")
        rng = np.random.default_rng(seed)
        vec = rng.standard_normal(self.dim)
        vec /= np.linalg.norm(vec)
        return vec.tolist()

    # -- resolution --------------------------------------------------------

    def _resolve(self, prompt: str) -> str:
        key = digest(prompt)
        if key in self.script:
            return self.script[key]
        for contains, responder in self.rules:
            if contains in prompt:
                if isinstance(responder, Exception):
                    raise responder
                if isinstance(responder, type) and issubclass(responder, Exception):
                    raise responder("scripted failure")
                if callable(responder):
                    return responder(prompt)
                return responder
        return self._fallback(prompt)

    def _fallback(self, prompt: str) -> str:
        if prompt.startswith("Given the following question, design a structured data format"):
            return json.dumps([{"answer": "String: the answer to the question"}])
        if prompt.startswith("You should extract the meta information"):
            return json.dumps({k: "none" for k in _META_KEYS})
        if prompt.startswith("I will give you a page of a pdf file"):
            return "no"
        if prompt.startswith("I will give you a table content"):
            return json.dumps({"table_caption": "", "table_content": '"value"'})
        if prompt.startswith("I will give you a figure in the paper"):
            m = _CAPTION_RE.search(prompt)
            caption = m.group(1).strip() if m else ""
            return caption or "mock figure insight"
        if prompt.startswith("Summarize the following"):
            m = _CONTENT_RE.search(prompt)
            content = m.group(1).strip() if m else prompt
            return content[:300]
        if prompt.startswith("You are extracting structured data records"):
            m = _COLUMNS_RE.search(prompt)
            columns = json.loads(m.group(1)) if m else ["answer"]
            record = {c: "Empty" for c in columns}
            return json.dumps(
                {"records": [record], "summary": "No data could be extracted."}
            )
        if prompt.startswith("Write a short summary (at most 1200"):
            m = _STATS_RE.search(prompt)
            return "Summary of extracted table. " + (m.group(1) if m else "")
        if prompt.startswith("Given the following answer, write"):
            m = _COUNT_QUESTIONS_RE.search(prompt)
            n = int(m.group(1)) if m else 3
            return json.dumps({"questions": [f"Mock reconstructed question {i + 1}?" for i in range(n)]})
        m = _COUNT_SENTENCES_RE.match(prompt)
        if m:
            return json.dumps({"relevant_indices": list(range(int(m.group(1))))})
        if prompt.startswith("Decompose the following answer"):
            am = _ANSWER_RE.search(prompt)
            answer = am.group(1).strip() if am else prompt[:100]
            return json.dumps({"claims": [answer]})
        m = _COUNT_CLAIMS_RE.match(prompt)
        if m:
            return json.dumps({"supported": [True] * int(m.group(1))})
        if prompt.startswith("The following values were grouped together"):
            vm = _MEMBER_RE.search(prompt)
            return vm.group(1) if vm else "group"
        return f"mock:{digest(prompt)[:16]}"


class HTTPProvider:
    """OpenAI-compatible chat/embeddings client."""

    def __init__(self, base_url: str, api_key: str, timeout: float = 60.0):
        import httpx

        self.base_url = base_url.rstrip("/")
        self._client = httpx.Client(
            timeout=timeout,
            headers={"Authorization": f"Bearer {api_key}"},
        )

    def _post(self, path: str, payload: dict) -> dict:
        import httpx

        try:
            resp = self._client.post(f"{self.base_url}{path}", json=payload)
        except httpx.TimeoutException as exc:
            raise ProviderTransientError(f"timeout calling {path}") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure calling {path}: {exc}") from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise ProviderTransientError(f"{resp.status_code} from {path}")
        if resp.status_code >= 400:
            raise ProviderError(f"{resp.status_code} from {path}: {resp.text[:500]}")
        return resp.json()

    def complete(self, model_id: str, prompt: str, temperature: float) -> str:
        data = self._post(
            "/chat/completions",
            {
                "model": model_id,
                "temperature": temperature,
                "messages": [{"role": "user", "content": prompt}],
            },
        )
        return data["choices"][0]["message"]["content"]

    def complete_vision(
        self, model_id: str, prompt: str, image_b64: str, temperature: float
    ) -> str:
        data = self._post(
            "/chat/completions",
            {
                "model": model_id,
                "temperature": temperature,
                "messages": [
                    {
                        "role": "user",
                        "content": [
                            {"type": "text", "text": prompt},
                            {
                                "type": "image_url",
                                "image_url": {
                                    "url": f"data:image/jpeg;base64,{image_b64}"
                                },
                            },
                        ],
                    }
                ],
            },
        )
        return data["choices"][0]["message"]["content"]

    def embed(self, model_id: str, texts: list[str]) -> list[list[float]]:
        data = self._post("/embeddings", {"model": model_id, "input": texts})
        items = sorted(data["data"], key=lambda d: d["index"])
        return [item["embedding"] for item in items]
