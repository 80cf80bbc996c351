"""Provider-agnostic completion gateway.

One live HTTP provider (chat-completion wire shape, bearer key from the
environment) and one deterministic rule-based mock share the same interface.
The gateway owns model registration, bounded retry, an in-flight limiter, and
an optional token bucket; cost math is exact decimal arithmetic.
"""

from __future__ import annotations

import csv
import json
import os
import threading
import time
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from fnmatch import fnmatch
from pathlib import Path
from typing import Mapping, Protocol, Sequence

import requests

from .errors import ProviderAuthError, ProviderError, RateLimited, UnknownModel
from .prompts import PromptSpec

PRICING_HEADER = ("model_id", "input_price_per_1k", "output_price_per_1k")

_CHARS_PER_TOKEN = 4


@dataclass(frozen=True)
class TokenUsage:
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def __post_init__(self):
        if self.prompt_tokens < 0 or self.completion_tokens < 0:
            raise ValueError("token counts must be non-negative")

    def __add__(self, other: "TokenUsage") -> "TokenUsage":
        return TokenUsage(
            self.prompt_tokens + other.prompt_tokens,
            self.completion_tokens + other.completion_tokens,
        )


@dataclass(frozen=True)
class ModelPricing:
    """Per-1k-token prices in USD; values come from runtime config."""

    model_id: str
    input_price_per_1k: Decimal
    output_price_per_1k: Decimal

    def __post_init__(self):
        if not self.model_id:
            raise ValueError("model_id must be non-empty")
        if self.input_price_per_1k < 0 or self.output_price_per_1k < 0:
            raise ValueError("prices must be non-negative")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    usage: TokenUsage
    model_id: str
    latency_ms: int = 0


def compute_cost_raw(usage: TokenUsage, pricing: ModelPricing) -> Decimal:
    """Exact cost before display rounding; linear in the token counts."""
    return (
        Decimal(usage.prompt_tokens) / 1000 * pricing.input_price_per_1k
        + Decimal(usage.completion_tokens) / 1000 * pricing.output_price_per_1k
    )


def compute_cost(usage: TokenUsage, pricing: ModelPricing) -> Decimal:
    """Dollar cost of one completion, rounded half-up to 4 decimal places."""
    return compute_cost_raw(usage, pricing).quantize(Decimal("0.0001"), rounding=ROUND_HALF_UP)


def extract_code(response_text: str) -> str:
    """Pull the code out of a model reply.

    Exactly one fenced block: its interior (language tag dropped). Multiple
    blocks: the longest interior. No fences: the text verbatim. The result
    always ends with exactly one newline.
    """
    lines = response_text.split("\n")
    interiors: list[str] = []
    open_index: int | None = None
    for index, line in enumerate(lines):
        if line.rstrip().startswith("```"):
            if open_index is None:
                open_index = index
            else:
                interiors.append("\n".join(lines[open_index + 1 : index]))
                open_index = None
    if interiors:
        best = max(interiors, key=len)
    else:
        best = response_text
    return best.rstrip("\n") + "\n"


def _approx_tokens(text: str) -> int:
    return (len(text) + _CHARS_PER_TOKEN - 1) // _CHARS_PER_TOKEN


def load_pricing(path: str | Path) -> dict[str, ModelPricing]:
    """Read the pricing config: CSV rows of model_id and per-1k prices."""
    pricing: dict[str, ModelPricing] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != PRICING_HEADER:
            raise ValueError(f"pricing file {path} must start with header {','.join(PRICING_HEADER)}")
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            model_id, input_price, output_price = (cell.strip() for cell in row)
            pricing[model_id] = ModelPricing(model_id, Decimal(input_price), Decimal(output_price))
    return pricing


class Provider(Protocol):
    def complete(self, prompt: PromptSpec, model_id: str) -> CompletionResult: ...


# --- deterministic mock -------------------------------------------------------


@dataclass(frozen=True)
class MockRule:
    """One fixture rule: glob on file path, substring on issue message, glob
    on model id (tier), and what to emit."""

    path_glob: str = "*"
    message_contains: str = ""
    tier: str = "*"
    action: str = "refuse"  # refuse | emit | replace
    content: str = ""
    find: str = ""
    replace: str = ""

    def matches(self, prompt: PromptSpec, model_id: str) -> bool:
        if not fnmatch(model_id, self.tier):
            return False
        if not fnmatch(prompt.file_location, self.path_glob):
            return False
        if self.message_contains:
            return any(self.message_contains in message for message in prompt.issue_messages)
        return True

    def apply(self, prompt: PromptSpec) -> str:
        if self.action == "emit":
            return self.content
        if self.action == "replace":
            return prompt.file_content.replace(self.find, self.replace)
        if self.action == "refuse":
            return prompt.file_content
        raise ValueError(f"unknown mock rule action {self.action!r}")


def load_mock_rules(path: str | Path) -> list[MockRule]:
    """Read the ordered mock fixture rules (JSON list of rule objects)."""
    raw = json.loads(Path(path).read_text("utf-8"))
    return [MockRule(**entry) for entry in raw]


class MockProvider:
    """Rule-driven provider: identical (prompt, model) input yields
    byte-identical output. First matching rule wins; no match echoes the
    original file (a refusal)."""

    def __init__(self, rules: Sequence[MockRule] = (), fail_first: int = 0):
        self.rules = list(rules)
        self.fail_first = fail_first
        self.call_count = 0
        self._lock = threading.Lock()

    def complete(self, prompt: PromptSpec, model_id: str) -> CompletionResult:
        with self._lock:
            self.call_count += 1
            failing = self.call_count <= self.fail_first
        if failing:
            raise ProviderError("transient mock failure")
        text = prompt.file_content
        for rule in self.rules:
            if rule.matches(prompt, model_id):
                text = rule.apply(prompt)
                break
        usage = TokenUsage(
            prompt_tokens=_approx_tokens(prompt.system_text) + _approx_tokens(prompt.user_text),
            completion_tokens=_approx_tokens(text),
        )
        return CompletionResult(text=text, usage=usage, model_id=model_id, latency_ms=0)


# --- live HTTP provider -------------------------------------------------------


class HttpChatProvider:
    """Chat-completion HTTP provider: bearer key from an environment
    variable, temperature pinned to 0, optional fixed seed."""

    def __init__(
        self,
        base_url: str = "https://api.openai.com/v1",
        api_key_env: str = "OPENAI_API_KEY",
        timeout_s: float = 120.0,
        seed: int | None = 0,
        session: requests.Session | None = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s
        self.seed = seed
        self._session = session or requests.Session()

    def complete(self, prompt: PromptSpec, model_id: str) -> CompletionResult:
        api_key = os.environ.get(self.api_key_env, "")
        if not api_key:
            raise ProviderAuthError(f"environment variable {self.api_key_env} is not set")
        payload: dict = {
            "model": model_id,
            "messages": [
                {"role": "system", "content": prompt.system_text},
                {"role": "user", "content": prompt.user_text},
            ],
            "temperature": 0,
        }
        if self.seed is not None:
            payload["seed"] = self.seed
        started = time.monotonic()
        try:
            response = self._session.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=self.timeout_s,
            )
        except requests.RequestException as exc:
            raise ProviderError(f"provider unreachable: {exc}") from exc
        latency_ms = int((time.monotonic() - started) * 1000)
        if response.status_code in (401, 403):
            raise ProviderAuthError(f"provider rejected API key (HTTP {response.status_code})")
        if response.status_code == 429:
            raise RateLimited("provider rate limit hit")
        if response.status_code >= 400:
            raise ProviderError(f"provider returned HTTP {response.status_code}: {response.text[:200]}")
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
            usage_raw = body.get("usage", {})
        except (ValueError, KeyError, IndexError) as exc:
            raise ProviderError(f"malformed provider response: {exc}") from exc
        usage = TokenUsage(
            prompt_tokens=int(usage_raw.get("prompt_tokens", 0)),
            completion_tokens=int(usage_raw.get("completion_tokens", 0)),
        )
        return CompletionResult(text=text, usage=usage, model_id=model_id, latency_ms=latency_ms)


# --- gateway ------------------------------------------------------------------


class _TokenBucket:
    def __init__(self, rate_per_s: float, capacity: float):
        self.rate = rate_per_s
        self.capacity = capacity
        self.tokens = capacity
        self.updated = time.monotonic()
        self.lock = threading.Lock()

    def take(self):
        while True:
            with self.lock:
                now = time.monotonic()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1:
                    self.tokens -= 1
                    return
                wait = (1 - self.tokens) / self.rate
            time.sleep(wait)


class Gateway:
    """Routes completion requests to registered providers.

    Transient failures (rate limits, 5xx, network) are retried with bounded
    exponential backoff, at most ``max_attempts`` tries total; auth failures
    are not retried. A completed request is never re-sent.
    """

    def __init__(
        self,
        providers: Mapping[str, Provider],
        pricing: Mapping[str, ModelPricing] | None = None,
        max_attempts: int = 3,
        backoff_base_s: float = 0.5,
        max_in_flight: int | None = None,
        requests_per_second: float | None = None,
    ):
        self.providers = dict(providers)
        self.pricing = dict(pricing or {})
        self.max_attempts = max_attempts
        self.backoff_base_s = backoff_base_s
        self._slots = threading.BoundedSemaphore(max_in_flight) if max_in_flight else None
        self._bucket = (
            _TokenBucket(requests_per_second, max(1.0, requests_per_second))
            if requests_per_second
            else None
        )

    def models(self) -> list[str]:
        return sorted(self.providers)

    def pricing_for(self, model_id: str) -> ModelPricing:
        if model_id not in self.pricing:
            raise UnknownModel(f"no pricing registered for model {model_id!r}")
        return self.pricing[model_id]

    def complete(self, prompt: PromptSpec, model_id: str) -> CompletionResult:
        provider = self.providers.get(model_id)
        if provider is None:
            raise UnknownModel(f"model {model_id!r} is not registered")
        attempt = 0
        while True:
            attempt += 1
            try:
                if self._bucket is not None:
                    self._bucket.take()
                if self._slots is not None:
                    with self._slots:
                        return provider.complete(prompt, model_id)
                return provider.complete(prompt, model_id)
            except (RateLimited, ProviderError):
                if attempt >= self.max_attempts:
                    raise
                time.sleep(self.backoff_base_s * 2 ** (attempt - 1))
