"""Generation backends: deterministic mocks and an OpenAI-compatible client.

Images are content-addressed: the image id is the FNV-1a 64-bit hash of the
generating prompt's UTF-8 bytes, rendered as lowercase hex. Identical prompts
therefore share storage everywhere downstream.
"""

from __future__ import annotations

import base64
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Protocol, TypeVar

import httpx

from .errors import BackendError, EmptyPrompt
from .model import GenerationParams

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211

# Minimal valid 1x1 PNG; the mock image backend always returns these bytes.
MOCK_PNG_BYTES = base64.b64decode(
    "iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAYAAAAfFcSJAAAADUlEQVR42mP8"
    "z8BQDwAEhQGAhKmMIQAAAABJRU5ErkJggg=="
)

RETRY_BASE_DELAY_SECS = 0.5
RETRY_BACKOFF_FACTOR = 2.0


def fnv1a_64(data: bytes) -> int:
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) % (1 << 64)
    return h


def image_id_for_prompt(prompt: str) -> str:
    return format(fnv1a_64(prompt.encode("utf-8")), "016x")


@dataclass(frozen=True)
class GeneratedImage:
    data: bytes
    media_type: str
    image_id: str


class TextGenerator(Protocol):
    def generate_text(self, prompt: str, params: GenerationParams) -> str: ...


class ImageGenerator(Protocol):
    def generate_image(self, prompt: str, params: GenerationParams) -> GeneratedImage: ...


@dataclass(frozen=True)
class BackendSet:
    text: TextGenerator
    image: ImageGenerator


@dataclass(frozen=True)
class BackendConfig:
    base_url: str = "http://localhost:8000"
    model_name: str = "default"
    system_prompt: str = ""
    image_base_url: str = "http://localhost:8001"
    request_timeout: float = 120.0
    max_retries: int = 2

    def __post_init__(self):
        if self.request_timeout <= 0:
            raise ValueError("request_timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be non-negative")

    @classmethod
    def from_env(cls, env: dict[str, str] | None = None) -> "BackendConfig":
        env = os.environ if env is None else env
        kwargs = {}
        if env.get("CHAIN_BACKEND_URL"):
            kwargs["base_url"] = env["CHAIN_BACKEND_URL"]
        if env.get("CHAIN_MODEL"):
            kwargs["model_name"] = env["CHAIN_MODEL"]
        if env.get("CHAIN_SYSTEM_PROMPT"):
            kwargs["system_prompt"] = env["CHAIN_SYSTEM_PROMPT"]
        if env.get("CHAIN_IMAGE_BACKEND_URL"):
            kwargs["image_base_url"] = env["CHAIN_IMAGE_BACKEND_URL"]
        if env.get("CHAIN_TIMEOUT_SECS"):
            kwargs["request_timeout"] = float(env["CHAIN_TIMEOUT_SECS"])
        return cls(**kwargs)


class MockTextGenerator:
    """Byte-exact deterministic stand-in for a chat-completions endpoint.

    The output embeds the generation parameters so tests can assert that
    per-node settings actually reach the backend; the prompt is truncated to
    max_output_tokens characters as a stand-in for token limits.
    """

    def generate_text(self, prompt: str, params: GenerationParams) -> str:
        n = params.max_output_tokens
        return f"GEN[t={params.temperature:.2f};n={n}]:{prompt[:n]}"


class MockImageGenerator:
    """Returns a constant 1x1 PNG; only the content-addressed id varies."""

    def generate_image(self, prompt: str, params: GenerationParams) -> GeneratedImage:
        if not prompt:
            raise EmptyPrompt()
        return GeneratedImage(
            data=MOCK_PNG_BYTES,
            media_type="image/png",
            image_id=image_id_for_prompt(prompt),
        )


T = TypeVar("T")


def with_retry(
    request: Callable[[], T],
    max_retries: int,
    endpoint: str,
    sleep: Callable[[float], None] = time.sleep,
) -> T:
    """Run ``request``, retrying transport errors and 5xx with exponential
    backoff (base 500 ms, factor 2). 4xx statuses fail immediately."""
    attempts = 0
    delay = RETRY_BASE_DELAY_SECS
    while True:
        attempts += 1
        try:
            response = request()
        except httpx.HTTPError as exc:
            if attempts > max_retries:
                raise BackendError(
                    f"transport failure after {attempts} attempts: {exc}",
                    endpoint=endpoint, attempts=attempts) from exc
            sleep(delay)
            delay *= RETRY_BACKOFF_FACTOR
            continue
        if response.status_code >= 500:
            if attempts > max_retries:
                raise BackendError(
                    f"server error {response.status_code} after {attempts} attempts",
                    endpoint=endpoint, status=response.status_code, attempts=attempts)
            sleep(delay)
            delay *= RETRY_BACKOFF_FACTOR
            continue
        if response.status_code >= 400:
            raise BackendError(
                f"request rejected with status {response.status_code}",
                endpoint=endpoint, status=response.status_code, attempts=attempts)
        return response


@dataclass
class HttpTextGenerator:
    """Client for an OpenAI-compatible /v1/chat/completions endpoint."""

    config: BackendConfig
    client: httpx.Client = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.client is None:
            self.client = httpx.Client(timeout=self.config.request_timeout)

    def generate_text(self, prompt: str, params: GenerationParams) -> str:
        endpoint = self.config.base_url.rstrip("/") + "/v1/chat/completions"
        payload = {
            "model": self.config.model_name,
            "messages": [
                {"role": "system", "content": self.config.system_prompt},
                {"role": "user", "content": prompt},
            ],
            "temperature": params.temperature,
            "max_tokens": params.max_output_tokens,
        }
        response = with_retry(
            lambda: self.client.post(endpoint, json=payload),
            self.config.max_retries, endpoint)
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendError(
                f"malformed completion response: {exc}", endpoint=endpoint) from exc


@dataclass
class HttpImageGenerator:
    """Client for an OpenAI-compatible /v1/images/generations endpoint."""

    config: BackendConfig
    client: httpx.Client = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.client is None:
            self.client = httpx.Client(timeout=self.config.request_timeout)

    def generate_image(self, prompt: str, params: GenerationParams) -> GeneratedImage:
        if not prompt:
            raise EmptyPrompt()
        endpoint = self.config.image_base_url.rstrip("/") + "/v1/images/generations"
        response = with_retry(
            lambda: self.client.post(endpoint, json={"prompt": prompt}),
            self.config.max_retries, endpoint)
        try:
            doc = response.json()
            first = doc["data"][0]
            data = base64.b64decode(first["b64_json"])
            media_type = first.get("media_type", "image/png")
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendError(
                f"malformed image response: {exc}", endpoint=endpoint) from exc
        return GeneratedImage(
            data=data, media_type=media_type,
            image_id=image_id_for_prompt(prompt))


def mock_backends() -> BackendSet:
    return BackendSet(text=MockTextGenerator(), image=MockImageGenerator())


def http_backends(config: BackendConfig) -> BackendSet:
    return BackendSet(
        text=HttpTextGenerator(config), image=HttpImageGenerator(config))
