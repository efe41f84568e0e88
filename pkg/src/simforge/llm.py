"""Text-in, text-out completion backends.

Three interchangeable backends sit behind one ``complete(request)`` surface:
a live HTTP backend (credentials via SIMFORGE_API_KEY, endpoint from config),
a record/replay cache keyed by digest(prompt + generation params), and a
deterministic mock driven by marker substrings. Tests and demos run entirely
on mock or replay; nothing in the suite touches the network.

Cache file layout (bit-exact, see docs/cache_format.md): a sequence of
entries, each ``8-byte big-endian payload length | payload | 32-byte SHA-256
of payload`` where the payload is UTF-8 JSON with sorted keys.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

from .promptkit import GenerationParams, check_budget

API_KEY_ENV = "SIMFORGE_API_KEY"
_LEN_BYTES = 8
_HASH_BYTES = 32


class LlmError(Exception):
    pass


class AuthMissing(LlmError):
    def __init__(self) -> None:
        super().__init__(f"no API key: set the {API_KEY_ENV} environment variable")


class Timeout(LlmError):
    def __init__(self, elapsed: float):
        super().__init__(f"backend timed out after {elapsed:.1f}s")
        self.elapsed = elapsed


class RateLimited(LlmError):
    def __init__(self, retry_after: float):
        super().__init__(f"rate limited; retry after {retry_after:.1f}s")
        self.retry_after = retry_after


class CacheMiss(LlmError):
    def __init__(self, digest: str):
        super().__init__(f"no cached completion for digest {digest}")
        self.digest = digest


class BackendUnavailable(LlmError):
    pass


class BudgetError(LlmError):
    def __init__(self, overshoot: int):
        super().__init__(f"prompt plus max_tokens exceeds the token window by {overshoot}")
        self.overshoot = overshoot


class CacheIntegrityError(LlmError):
    def __init__(self, path: Path, entry_index: int, reason: str):
        super().__init__(f"cache {path} entry #{entry_index}: {reason}")
        self.entry_index = entry_index


class DuplicateCacheEntry(LlmError):
    def __init__(self, digest: str):
        super().__init__(f"digest {digest} already recorded")
        self.digest = digest


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    params: GenerationParams = field(default_factory=GenerationParams)

    def __post_init__(self) -> None:
        outcome = check_budget(self.prompt, self.params)
        if not outcome.ok:
            raise BudgetError(outcome.overshoot)


@dataclass(frozen=True)
class CompletionResponse:
    completion: str
    backend: str  # live | replay | mock
    latency_ms: float = 0.0
    reported_tokens: int = 0


class Backend(Protocol):
    name: str

    def complete(self, request: CompletionRequest) -> CompletionResponse: ...


def request_digest(request: CompletionRequest) -> str:
    """Key for the replay cache: prompt and all generation parameters."""
    params_json = json.dumps({
        "temperature": request.params.temperature,
        "max_tokens": request.params.max_tokens,
        "stop_sequences": list(request.params.stop_sequences),
        "engine_id": request.params.engine_id,
    }, sort_keys=True)
    return hashlib.sha256(request.prompt.encode("utf-8") + b"\x00" + params_json.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# mock


class MockBackend:
    """Canned completions selected by the first marker substring found in the prompt.

    Matching is case-insensitive. When nothing matches, the default completion
    is returned (or BackendUnavailable is raised if none was given).
    """

    name = "mock"

    def __init__(self, fixtures: list[tuple[str, str]], default: str | None = None):
        self.fixtures = list(fixtures)
        self.default = default

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        haystack = request.prompt.lower()
        for marker, completion in self.fixtures:
            if marker.lower() in haystack:
                return CompletionResponse(completion=completion, backend=self.name)
        if self.default is not None:
            return CompletionResponse(completion=self.default, backend=self.name)
        raise BackendUnavailable("mock backend has no fixture matching the prompt")


# ---------------------------------------------------------------------------
# replay cache


@dataclass(frozen=True)
class CacheEntry:
    digest: str
    prompt: str
    params: dict
    completion: str
    backend: str
    latency_ms: float
    reported_tokens: int
    created_at: str


class CompletionCache:
    """Append-only cache file with length-prefixed, checksummed JSON entries."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._index: dict[str, CacheEntry] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        blob = self.path.read_bytes()
        offset = 0
        index = 0
        while offset < len(blob):
            if offset + _LEN_BYTES > len(blob):
                raise CacheIntegrityError(self.path, index, "truncated length prefix")
            length = int.from_bytes(blob[offset:offset + _LEN_BYTES], "big")
            offset += _LEN_BYTES
            if offset + length + _HASH_BYTES > len(blob):
                raise CacheIntegrityError(self.path, index, "truncated entry")
            payload = blob[offset:offset + length]
            offset += length
            checksum = blob[offset:offset + _HASH_BYTES]
            offset += _HASH_BYTES
            if hashlib.sha256(payload).digest() != checksum:
                raise CacheIntegrityError(self.path, index, "checksum mismatch")
            data = json.loads(payload.decode("utf-8"))
            entry = CacheEntry(**data)
            self._index[entry.digest] = entry
            index += 1

    def get(self, digest: str) -> CacheEntry | None:
        return self._index.get(digest)

    def record(self, request: CompletionRequest, response: CompletionResponse) -> CacheEntry:
        digest = request_digest(request)
        if digest in self._index:
            raise DuplicateCacheEntry(digest)
        entry = CacheEntry(
            digest=digest,
            prompt=request.prompt,
            params={
                "temperature": request.params.temperature,
                "max_tokens": request.params.max_tokens,
                "stop_sequences": list(request.params.stop_sequences),
                "engine_id": request.params.engine_id,
            },
            completion=response.completion,
            backend=response.backend,
            latency_ms=response.latency_ms,
            reported_tokens=response.reported_tokens,
            created_at=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        )
        payload = json.dumps(entry.__dict__, sort_keys=True).encode("utf-8")
        record = len(payload).to_bytes(_LEN_BYTES, "big") + payload + hashlib.sha256(payload).digest()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "ab") as fh:
            fh.write(record)
        self._index[digest] = entry
        return entry


class ReplayBackend:
    """Serves recorded completions; in record mode, misses fall through to live."""

    def __init__(self, cache: CompletionCache, mode: str = "replay", live: "Backend | None" = None):
        if mode not in ("replay", "record"):
            raise ValueError(f"mode must be 'replay' or 'record', got {mode!r}")
        if mode == "record" and live is None:
            raise ValueError("record mode needs a live backend to fall through to")
        self.cache = cache
        self.mode = mode
        self.live = live
        self.name = "replay"

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        digest = request_digest(request)
        entry = self.cache.get(digest)
        if entry is not None:
            return CompletionResponse(
                completion=entry.completion, backend="replay",
                latency_ms=0.0, reported_tokens=entry.reported_tokens)
        if self.mode == "replay":
            raise CacheMiss(digest)
        response = self.live.complete(request)
        self.cache.record(request, response)
        return response


# ---------------------------------------------------------------------------
# live


def _requests_transport(url: str, headers: dict, payload: dict, timeout: float) -> tuple[int, dict, dict]:
    import requests

    started = time.monotonic()
    try:
        resp = requests.post(url, headers=headers, json=payload, timeout=timeout)
    except requests.Timeout:
        raise Timeout(time.monotonic() - started) from None
    except requests.RequestException as exc:
        raise BackendUnavailable(str(exc)) from exc
    return resp.status_code, dict(resp.headers), resp.json() if resp.content else {}


class LiveBackend:
    """POSTs a completions request to the configured endpoint.

    The credential is read from the environment per call and never stored on
    the backend, the request, or the response.
    """

    name = "live"

    def __init__(self, endpoint: str, timeout_s: float = 60.0,
                 transport: Callable[[str, dict, dict, float], tuple[int, dict, dict]] | None = None):
        self.endpoint = endpoint
        self.timeout_s = timeout_s
        self.transport = transport or _requests_transport

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        api_key = os.environ.get(API_KEY_ENV)
        if not api_key:
            raise AuthMissing()
        payload = {
            "model": request.params.engine_id,
            "prompt": request.prompt,
            "max_tokens": request.params.max_tokens,
            "temperature": request.params.temperature,
            "stop": list(request.params.stop_sequences),
        }
        started = time.monotonic()
        status, headers, body = self.transport(
            self.endpoint, {"Authorization": f"Bearer {api_key}"}, payload, self.timeout_s)
        latency_ms = (time.monotonic() - started) * 1000.0
        if status == 429:
            retry_after = float(headers.get("Retry-After", "1"))
            raise RateLimited(retry_after)
        if status != 200:
            raise BackendUnavailable(f"backend returned status {status}")
        try:
            completion = body["choices"][0]["text"]
        except (KeyError, IndexError, TypeError):
            raise BackendUnavailable("malformed completion payload") from None
        usage = body.get("usage") or {}
        return CompletionResponse(
            completion=completion,
            backend=self.name,
            latency_ms=latency_ms,
            reported_tokens=int(usage.get("total_tokens", 0)),
        )


def complete_with_retry(backend: Backend, request: CompletionRequest,
                        max_attempts: int = 3, base_delay: float = 0.5,
                        sleep: Callable[[float], None] = time.sleep) -> tuple[CompletionResponse, int]:
    """At most max_attempts tries with exponential backoff on Timeout/RateLimited.

    Returns (response, attempts used) so the workflow can log the attempt count.
    """
    attempt = 0
    while True:
        attempt += 1
        try:
            return backend.complete(request), attempt
        except (Timeout, RateLimited) as exc:
            if attempt >= max_attempts:
                raise
            delay = base_delay * (2 ** (attempt - 1))
            if isinstance(exc, RateLimited):
                delay = max(delay, exc.retry_after)
            sleep(delay)
