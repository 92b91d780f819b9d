"""Chat-completion client: caching, retries, and pluggable backends.

Every request runs at temperature 0 and every response is stored in a
content-addressed cache keyed by hash(model id, prompt bytes), so a given
cache state makes the whole pipeline a pure function of its inputs and any
recorded run can be replayed offline from the cache file alone.

Backends:
  * HttpBackend       -- OpenAI-style chat-completions endpoint; credential
                         read from an environment variable.
  * ScriptedBackend   -- ordered substring rules -> canned responses, for
                         golden-fixture tests.
  * ProceduralBackend -- scriptless deterministic stub: fabricates a valid,
                         hash-seeded response for any pipeline prompt, for
                         large offline fixtures and demos.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path


class LlmError(Exception):
    pass


class ConfigurationError(LlmError):
    pass


class TransportError(LlmError):
    """Raised when retries are exhausted; carries the per-attempt log."""

    def __init__(self, message: str, attempts: list[str]):
        self.attempts = attempts
        super().__init__(f"{message} (attempts: {len(attempts)})")


@dataclass(frozen=True)
class LlmRequest:
    model: str
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 2048

    def key(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.model.encode("utf-8"))
        digest.update(b"\x00")
        digest.update(self.prompt.encode("utf-8"))
        return digest.hexdigest()


@dataclass(frozen=True)
class LlmResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    latency_s: float = 0.0
    cache_hit: bool = False


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    base_delay_s: float = 0.5
    max_delay_s: float = 8.0

    def delay(self, attempt: int) -> float:
        return min(self.base_delay_s * (2**attempt), self.max_delay_s)


class ResponseCache:
    """Append-only response cache, one JSON record per line.

    Concurrent reads are free; appends are serialized by a lock. The file is
    the durable source of truth; the in-memory dict mirrors it.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[str, str] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            with self.path.open("r", encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    self._entries[rec["key"]] = rec["response"]

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, key: str) -> str | None:
        return self._entries.get(key)

    def put(self, key: str, request_digest: str, response: str) -> None:
        with self._lock:
            if key in self._entries:
                return
            self._entries[key] = response
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                rec = {"key": key, "request": request_digest, "response": response}
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")


class Backend:
    def send(self, request: LlmRequest) -> str:
        raise NotImplementedError


class HttpBackend(Backend):
    """POSTs to an OpenAI-style /chat/completions endpoint."""

    def __init__(self, endpoint: str, credential_env: str = "REVIEWLENS_API_KEY", timeout_s: float = 60.0):
        self.endpoint = endpoint
        self.credential_env = credential_env
        self.timeout_s = timeout_s

    def send(self, request: LlmRequest) -> str:
        credential = os.environ.get(self.credential_env)
        if not credential:
            raise ConfigurationError(
                f"credential environment variable {self.credential_env!r} is not set"
            )
        import httpx

        payload = {
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        resp = httpx.post(
            self.endpoint,
            json=payload,
            headers={"Authorization": f"Bearer {credential}"},
            timeout=self.timeout_s,
        )
        if resp.status_code in (429,) or resp.status_code >= 500:
            raise IOError(f"retryable status {resp.status_code}")
        resp.raise_for_status()
        body = resp.json()
        return body["choices"][0]["message"]["content"]


class ScriptedBackend(Backend):
    """Rule list: first entry whose substrings all occur in the prompt wins."""

    def __init__(self, rules: list[tuple[list[str], str]] | None = None):
        self.rules = list(rules or [])
        self.calls: list[str] = []

    def add(self, needles: list[str], response: str) -> None:
        self.rules.append((needles, response))

    def send(self, request: LlmRequest) -> str:
        self.calls.append(request.prompt)
        for needles, response in self.rules:
            if all(n in request.prompt for n in needles):
                return response
        raise LlmError(
            "scripted backend has no rule for prompt starting: "
            + request.prompt[:120].replace("\n", " ")
        )


class FlakyBackend(Backend):
    """Wraps another backend, failing the first ``fail_times`` sends."""

    def __init__(self, inner: Backend, fail_times: int):
        self.inner = inner
        self.remaining_failures = fail_times
        self.send_count = 0

    def send(self, request: LlmRequest) -> str:
        self.send_count += 1
        if self.remaining_failures > 0:
            self.remaining_failures -= 1
            raise IOError("synthetic transport failure")
        return self.inner.send(request)


_SENTENCE_KEY_RE = re.compile(r'"Sentence (\d+)": \{\n        "sentence": "')


class ProceduralBackend(Backend):
    """Deterministic stub that answers any pipeline prompt plausibly.

    Responses are a pure function of the prompt bytes (hash-seeded), so runs
    are reproducible without a script. Assignment answers pick labels from
    the roster embedded in the prompt; sentiment answers pick a label from
    the closed scale.
    """

    def __init__(self, taxonomy=None):
        self.taxonomy = taxonomy

    @staticmethod
    def _rng(request: LlmRequest) -> random.Random:
        return random.Random(int(request.key()[:16], 16))

    @staticmethod
    def _roster(prompt: str) -> list[str]:
        items = []
        capture = False
        for line in prompt.splitlines():
            if line.startswith("Choose from:"):
                capture = True
                continue
            if capture:
                if line.startswith("* "):
                    items.append(line[2:].strip())
                else:
                    break
        return items

    def send(self, request: LlmRequest) -> str:
        prompt = request.prompt
        rng = self._rng(request)
        labels = ["Strongly Negative", "Negative", "Neutral", "Positive", "Strongly Positive"]
        if "Task: Review Sentiment Classification" in prompt:
            return json.dumps(
                {"reasoning": "stub overall read", "sentiment": rng.choice(labels)}
            )
        if "Task: Sentence Attribute Assignment" in prompt or "Task: Sentence Feature Assignment" in prompt:
            m = _SENTENCE_KEY_RE.search(prompt)
            index = m.group(1) if m else "0"
            roster = self._roster(prompt)
            sink = (
                "Other Attributes"
                if "Sentence Attribute Assignment" in prompt
                else "Other Features"
            )
            regular = [r for r in roster if r != sink]
            if regular and rng.random() < 0.85:
                picked = rng.sample(regular, k=min(len(regular), rng.choice([1, 1, 1, 2])))
            else:
                picked = [sink]
            key = "attributes" if "Attribute Assignment" in prompt else "features"
            return json.dumps(
                {
                    f"Sentence {index}": {
                        "sentence": "",
                        "reasoning": "stub assignment",
                        key: picked,
                    }
                }
            )
        if "Task: Sentence Attribute Sentiment Classification" in prompt or (
            "Task: Sentence Feature Sentiment Classification" in prompt
        ):
            return json.dumps(
                {"reasoning_sentiment": "stub rating", "sentiment": rng.choice(labels)}
            )
        if "Features =" in prompt or "Attributes =" in prompt:
            key = "features" if "Features =" in prompt else "attributes"
            pool = []
            if self.taxonomy is not None:
                if key == "attributes":
                    pool = [a.name for a in self.taxonomy.attributes]
                else:
                    pool = [f for a in self.taxonomy.attributes for f in a.features]
            if not pool:
                pool = ["Service", "Taste", "Value"]
            k = max(1, min(len(pool), 1 + rng.randrange(len(pool))))
            return json.dumps({key: sorted(rng.sample(pool, k=k))})
        raise LlmError("procedural backend cannot classify this prompt")


class LlmClient:
    """Cache-first completion client with retry/backoff."""

    def __init__(
        self,
        backend: Backend,
        model: str = "gpt-4.1-mini",
        cache: ResponseCache | None = None,
        policy: RetryPolicy | None = None,
        sleep=time.sleep,
    ):
        self.backend = backend
        self.model = model
        self.cache = cache if cache is not None else ResponseCache()
        self.policy = policy or RetryPolicy()
        self._sleep = sleep
        self.n_requests = 0
        self.n_cache_hits = 0
        self.n_backend_calls = 0

    def usage(self) -> dict:
        return {
            "n_requests": self.n_requests,
            "n_cache_hits": self.n_cache_hits,
            "n_backend_calls": self.n_backend_calls,
        }

    def complete(self, prompt: str, max_tokens: int = 2048) -> LlmResponse:
        request = LlmRequest(model=self.model, prompt=prompt, max_tokens=max_tokens)
        key = request.key()
        self.n_requests += 1
        cached = self.cache.get(key)
        if cached is not None:
            self.n_cache_hits += 1
            return LlmResponse(text=cached, cache_hit=True)

        attempts: list[str] = []
        started = time.monotonic()
        for attempt in range(self.policy.max_attempts):
            try:
                self.n_backend_calls += 1
                text = self.backend.send(request)
            except (ConfigurationError, LlmError):
                raise
            except Exception as exc:  # transport/rate-limit class of failures
                attempts.append(f"attempt {attempt + 1}: {exc}")
                if attempt + 1 >= self.policy.max_attempts:
                    raise TransportError("backend retries exhausted", attempts) from exc
                self._sleep(self.policy.delay(attempt))
                continue
            latency = time.monotonic() - started
            self.cache.put(key, request.key(), text)
            return LlmResponse(
                text=text,
                latency_s=latency,
                cache_hit=False,
            )
        raise TransportError("backend retries exhausted", attempts)


class ReplayBackend(Backend):
    """Backend that refuses to send: use with a warmed cache for offline runs."""

    def send(self, request: LlmRequest) -> str:
        raise ConfigurationError(
            "replay backend has no live transport; response missing from cache "
            f"for request {request.key()[:12]}…"
        )
