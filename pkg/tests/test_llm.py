import hashlib

import pytest

from simforge.llm import (
    API_KEY_ENV,
    AuthMissing,
    BackendUnavailable,
    BudgetError,
    CacheIntegrityError,
    CacheMiss,
    CompletionCache,
    CompletionRequest,
    CompletionResponse,
    DuplicateCacheEntry,
    LiveBackend,
    MockBackend,
    RateLimited,
    ReplayBackend,
    Timeout,
    complete_with_retry,
    request_digest,
)
from simforge.promptkit import GenerationParams


def req(prompt="hello", **params):
    return CompletionRequest(prompt=prompt, params=GenerationParams(**params))


class TestCompletionRequest:
    def test_budget_enforced_at_construction(self):
        with pytest.raises(BudgetError):
            CompletionRequest(prompt="a" * 40000, params=GenerationParams(max_tokens=1024))

    def test_digest_covers_params(self):
        assert request_digest(req(temperature=0.0)) != request_digest(req(temperature=0.5))
        assert request_digest(req()) == request_digest(req())


class TestMockBackend:
    def test_marker_lookup(self):
        backend = MockBackend([("INVENTORY-B", "## simspec v1\ncanned\n")])
        response = backend.complete(req("context INVENTORY-B more text"))
        assert response.completion.startswith("## simspec v1")
        assert response.backend == "mock"

    def test_first_marker_wins(self):
        backend = MockBackend([("alpha", "A"), ("beta", "B")])
        assert backend.complete(req("beta then alpha")).completion == "A"

    def test_case_insensitive(self):
        backend = MockBackend([("Inventory", "X")])
        assert backend.complete(req("...inventory...")).completion == "X"

    def test_default_fallback(self):
        backend = MockBackend([("nope", "A")], default="fallback")
        assert backend.complete(req("unrelated")).completion == "fallback"

    def test_no_match_no_default(self):
        with pytest.raises(BackendUnavailable):
            MockBackend([("nope", "A")]).complete(req("unrelated"))


class TestCache:
    def test_record_then_replay_byte_identical(self, tmp_path):
        cache = CompletionCache(tmp_path / "cache.bin")
        request = req("the prompt")
        completion = "## simspec v1\nkind: queue\nsnowman ☃\n"
        cache.record(request, CompletionResponse(completion, "live", 12.5, 77))
        replay = ReplayBackend(CompletionCache(tmp_path / "cache.bin"))
        response = replay.complete(request)
        assert response.completion == completion
        assert response.backend == "replay"
        assert response.reported_tokens == 77

    def test_duplicate_digest_rejected(self, tmp_path):
        cache = CompletionCache(tmp_path / "cache.bin")
        cache.record(req(), CompletionResponse("one", "live"))
        with pytest.raises(DuplicateCacheEntry):
            cache.record(req(), CompletionResponse("two", "live"))

    def test_strict_miss(self, tmp_path):
        replay = ReplayBackend(CompletionCache(tmp_path / "cache.bin"))
        with pytest.raises(CacheMiss) as err:
            replay.complete(req("never recorded"))
        assert err.value.digest == request_digest(req("never recorded"))

    def test_corruption_names_entry(self, tmp_path):
        path = tmp_path / "cache.bin"
        cache = CompletionCache(path)
        cache.record(req("a"), CompletionResponse("A", "live"))
        cache.record(req("b"), CompletionResponse("B", "live"))
        blob = bytearray(path.read_bytes())
        blob[-1] ^= 0xFF  # corrupt the second entry's checksum
        path.write_bytes(bytes(blob))
        with pytest.raises(CacheIntegrityError) as err:
            CompletionCache(path)
        assert err.value.entry_index == 1

    def test_truncated_file(self, tmp_path):
        path = tmp_path / "cache.bin"
        cache = CompletionCache(path)
        cache.record(req("a"), CompletionResponse("A", "live"))
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(CacheIntegrityError):
            CompletionCache(path)

    def test_record_mode_falls_through_once(self, tmp_path):
        calls = []

        class FakeLive:
            name = "live"

            def complete(self, request):
                calls.append(request.prompt)
                return CompletionResponse("live answer", "live")

        backend = ReplayBackend(CompletionCache(tmp_path / "c.bin"), mode="record", live=FakeLive())
        first = backend.complete(req("q"))
        second = backend.complete(req("q"))
        assert first.completion == second.completion == "live answer"
        assert calls == ["q"]  # second call served from cache


class TestRetry:
    def test_retries_then_succeeds(self):
        attempts = []

        class Flaky:
            name = "live"

            def complete(self, request):
                attempts.append(1)
                if len(attempts) < 3:
                    raise RateLimited(0.01)
                return CompletionResponse("ok", "live")

        slept = []
        response, used = complete_with_retry(Flaky(), req(), sleep=slept.append)
        assert response.completion == "ok" and used == 3
        assert len(slept) == 2
        assert slept[1] > slept[0] or slept[1] >= 0.01  # backoff grows or honors retry-after

    def test_gives_up_after_three(self):
        class AlwaysTimingOut:
            name = "live"

            def complete(self, request):
                raise Timeout(1.0)

        with pytest.raises(Timeout):
            complete_with_retry(AlwaysTimingOut(), req(), sleep=lambda _: None)

    def test_non_retryable_raises_immediately(self):
        calls = []

        class Broken:
            name = "live"

            def complete(self, request):
                calls.append(1)
                raise BackendUnavailable("boom")

        with pytest.raises(BackendUnavailable):
            complete_with_retry(Broken(), req(), sleep=lambda _: None)
        assert len(calls) == 1


class TestLiveBackend:
    def test_auth_missing(self, monkeypatch):
        monkeypatch.delenv(API_KEY_ENV, raising=False)
        backend = LiveBackend("https://example.invalid/v1/completions",
                              transport=lambda *a: (_ for _ in ()).throw(AssertionError("no call")))
        with pytest.raises(AuthMissing):
            backend.complete(req())

    def test_successful_completion(self, monkeypatch):
        monkeypatch.setenv(API_KEY_ENV, "sekret-key")
        seen = {}

        def transport(url, headers, payload, timeout):
            seen.update(url=url, headers=headers, payload=payload)
            return 200, {}, {"choices": [{"text": "## end"}], "usage": {"total_tokens": 5}}

        backend = LiveBackend("https://api.example/v1/completions", transport=transport)
        response = backend.complete(req("prompt text", max_tokens=16))
        assert response.completion == "## end"
        assert response.reported_tokens == 5
        assert seen["payload"]["max_tokens"] == 16
        assert seen["headers"]["Authorization"] == "Bearer sekret-key"

    def test_rate_limit_maps(self, monkeypatch):
        monkeypatch.setenv(API_KEY_ENV, "k")
        backend = LiveBackend("https://x", transport=lambda *a: (429, {"Retry-After": "2.5"}, {}))
        with pytest.raises(RateLimited) as err:
            backend.complete(req())
        assert err.value.retry_after == 2.5

    def test_other_status_unavailable(self, monkeypatch):
        monkeypatch.setenv(API_KEY_ENV, "k")
        backend = LiveBackend("https://x", transport=lambda *a: (500, {}, {}))
        with pytest.raises(BackendUnavailable):
            backend.complete(req())

    def test_secret_never_in_cache(self, tmp_path, monkeypatch):
        secret = "sekret-" + hashlib.sha256(b"x").hexdigest()[:8]
        monkeypatch.setenv(API_KEY_ENV, secret)
        live = LiveBackend("https://x", transport=lambda *a: (
            200, {}, {"choices": [{"text": "fine"}]}))
        backend = ReplayBackend(CompletionCache(tmp_path / "c.bin"), mode="record", live=live)
        backend.complete(req("a prompt"))
        assert secret.encode() not in (tmp_path / "c.bin").read_bytes()
