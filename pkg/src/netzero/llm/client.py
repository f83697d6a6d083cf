"""Chat-completion clients: HTTP, on-disk cache, and mocks for offline runs."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import threading
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from ..errors import NetZeroError
from .prompt import CANONICAL_ANSWERS, build_prompt

logger = logging.getLogger(__name__)

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"
DEFAULT_MODEL = "gpt-3.5-turbo"
DEFAULT_KEY_ENV = "OPENAI_API_KEY"


class TransportError(NetZeroError, RuntimeError):
    """A chat call failed in a way that may succeed on retry."""


class CacheMiss(TransportError):
    pass


class ChatClient(Protocol):
    model: str

    def complete(self, prompt: str) -> str: ...


class HTTPChatClient:
    """OpenAI-compatible ``/chat/completions`` client; temperature 0, one completion."""

    def __init__(
        self,
        endpoint: str = DEFAULT_ENDPOINT,
        model: str = DEFAULT_MODEL,
        api_key_env: str = DEFAULT_KEY_ENV,
        timeout: float = 60.0,
        temperature: float = 0.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.temperature = temperature

    @property
    def api_key(self) -> str | None:
        return os.environ.get(self.api_key_env)

    def complete(self, prompt: str) -> str:
        import httpx

        key = self.api_key
        if not key:
            raise TransportError(f"no API key in ${self.api_key_env}")
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
            "n": 1,
        }
        try:
            resp = httpx.post(
                self.endpoint, json=body, timeout=self.timeout, headers={"Authorization": f"Bearer {key}"}
            )
        except httpx.HTTPError as exc:
            raise TransportError(str(exc)) from exc
        if resp.status_code != 200:
            raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise TransportError(f"malformed response: {exc}") from exc


def cache_key(model: str, prompt: str) -> str:
    return hashlib.sha256(f"{model}\n{prompt}".encode("utf-8")).hexdigest()


class CachedClient:
    """Disk cache keyed by (model, prompt hash).

    With ``inner=None`` the cache is replay-only and a miss raises CacheMiss.
    """

    def __init__(self, cache_dir: str | Path, inner: ChatClient | None = None, model: str | None = None):
        self.cache_dir = Path(cache_dir)
        self.inner = inner
        self.model = model or (inner.model if inner is not None else DEFAULT_MODEL)
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def _path(self, prompt: str) -> Path:
        key = cache_key(self.model, prompt)
        return self.cache_dir / key[:2] / f"{key}.json"

    def complete(self, prompt: str) -> str:
        path = self._path(prompt)
        if path.exists():
            with self._lock:
                self.hits += 1
            return json.loads(path.read_text(encoding="utf-8"))["response"]
        with self._lock:
            self.misses += 1
        if self.inner is None:
            raise CacheMiss(f"no cached response for prompt hash {path.stem[:12]}")
        response = self.inner.complete(prompt)
        self.store(prompt, response)
        return response

    def store(self, prompt: str, response: str) -> None:
        path = self._path(prompt)
        path.parent.mkdir(parents=True, exist_ok=True)
        record = {"model": self.model, "prompt_sha256": path.stem, "response": response}
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, ensure_ascii=False) + "\n", encoding="utf-8")
        tmp.replace(path)


_TEXT_RE = re.compile(r"Provided text: \^\^\^(.*)\^\^\^ $", re.S)


def text_from_prompt(prompt: str) -> str:
    m = _TEXT_RE.search(prompt)
    if not m:
        raise ValueError("not a classification prompt")
    return m.group(1)


class GoldEchoClient:
    """Answers every prompt with the canonical answer for the sample's gold label."""

    model = "mock-gold-echo"

    def __init__(self, dataset: Sequence):
        self.answers = {build_prompt(s.text): CANONICAL_ANSWERS[s.label] for s in dataset}

    def complete(self, prompt: str) -> str:
        return self.answers[prompt]


class ConstantClient:
    model = "mock-constant"

    def __init__(self, answer: str):
        self.answer = answer

    def complete(self, prompt: str) -> str:
        return self.answer


class ScriptedClient:
    """Replays canned answers per text; an Exception value is raised instead."""

    model = "mock-scripted"

    def __init__(self, by_text: Mapping[str, object], default: str = "None"):
        self.by_text = dict(by_text)
        self.default = default
        self.calls: list[str] = []
        self._lock = threading.Lock()

    def complete(self, prompt: str) -> str:
        text = text_from_prompt(prompt)
        with self._lock:
            self.calls.append(text)
        value = self.by_text.get(text, self.default)
        if isinstance(value, BaseException):
            raise value
        if callable(value):
            return value()
        return value
