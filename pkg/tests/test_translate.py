"""Translation providers: lexicon lookup, HTTP client with retries, disk cache."""

import threading
import time

import pytest

from csaug.errors import (
    ConfigurationError,
    DuplicateLexiconEntry,
    EmptyTranslation,
    ProviderUnavailable,
    RateLimited,
    UnsupportedLanguage,
)
from csaug.translate import (
    CachingProvider,
    HttpProvider,
    LexiconProvider,
    TranslationCache,
    TranslationRequest,
    parse_provider,
    tokenize_translation,
)

from conftest import LEXICONS


def test_tokenize_whitespace_and_cjk():
    assert tokenize_translation("neu york", "de") == ("neu", "york")
    assert tokenize_translation("纽约", "zh-cn") == ("纽约",)
    assert tokenize_translation("纽约 到 波士顿", "zh-cn") == ("纽约", "到", "波士顿")
    # a mixed run is split at the script boundary
    assert tokenize_translation("abc纽约", "zh-cn") == ("abc", "纽约")
    with pytest.raises(EmptyTranslation):
        tokenize_translation("   ", "de")


def test_request_validation():
    with pytest.raises(ConfigurationError):
        TranslationRequest("", "en", "de")
    with pytest.raises(ConfigurationError):
        TranslationRequest("hi", "en", "en")


class TestLexiconProvider:
    def test_loads_committed_fixtures(self):
        p = LexiconProvider(LEXICONS)
        assert p.supported_languages() == {"de", "fr", "hi", "tr", "zh-cn"}

    def test_exact_phrase_beats_word_by_word(self):
        p = LexiconProvider(LEXICONS)
        r = p.translate(TranslationRequest("show me flights from", "en", "de"))
        assert r.text == "zeigen sie mir fluege von"
        assert r.provenance == "lexicon"

    def test_case_insensitive_source(self):
        p = LexiconProvider(LEXICONS)
        r = p.translate(TranslationRequest("New York", "en", "fr"))
        assert r.text == "nouvo yòk"
        assert r.tokens == ("nouvo", "yòk")

    def test_word_by_word_with_identity_fallback(self):
        p = LexiconProvider(LEXICONS)
        r = p.translate(TranslationRequest("flight 281", "en", "de"))
        assert r.text == "flug 281"
        assert r.provenance == "identity-fallback"

    def test_scriptio_continua_target_tokens(self):
        p = LexiconProvider(LEXICONS)
        r = p.translate(TranslationRequest("new york", "en", "zh-cn"))
        assert r.text == "纽约"
        assert r.tokens == ("纽约",)

    def test_unsupported_pair(self):
        p = LexiconProvider(LEXICONS)
        with pytest.raises(UnsupportedLanguage):
            p.translate(TranslationRequest("x", "de", "fr"))

    def test_duplicate_source_phrase(self, tmp_path):
        (tmp_path / "en-xx.tsv").write_text("a\tb\nA\tc\n", encoding="utf-8")
        with pytest.raises(DuplicateLexiconEntry):
            LexiconProvider(tmp_path)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ConfigurationError):
            LexiconProvider(tmp_path)
        with pytest.raises(ConfigurationError):
            LexiconProvider(tmp_path / "missing")

    def test_bad_file_name_and_row(self, tmp_path):
        (tmp_path / "nolang.tsv").write_text("a\tb\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            LexiconProvider(tmp_path)
        (tmp_path / "nolang.tsv").unlink()
        (tmp_path / "en-xx.tsv").write_text("only-one-column\n", encoding="utf-8")
        with pytest.raises(ConfigurationError):
            LexiconProvider(tmp_path)

    def test_provider_id_depends_on_directory(self, tmp_path):
        (tmp_path / "en-xx.tsv").write_text("a\tb\n", encoding="utf-8")
        p1 = LexiconProvider(LEXICONS)
        p2 = LexiconProvider(tmp_path)
        assert p1.provider_id != p2.provider_id
        assert p1.provider_id == LexiconProvider(LEXICONS).provider_id


class TestHttpProvider:
    def _provider(self, server, **kw):
        kw.setdefault("backoff_base", 0.001)
        return HttpProvider(server.base_url, **kw)

    def test_translate_and_languages(self, stub_server):
        p = self._provider(stub_server)
        r = p.translate(TranslationRequest("new york", "en", "de"))
        assert r.text == "new york|de"
        assert r.provenance == "http"
        assert p.supported_languages() == {"de", "fr"}

    def test_retries_then_succeeds_on_5xx(self, stub_server):
        stub_server.script.append((500, {"error": "boom"}))
        stub_server.script.append((502, {"error": "boom"}))
        p = self._provider(stub_server)
        r = p.translate(TranslationRequest("hello", "en", "de"))
        assert r.text == "hello|de"
        posts = [r_ for r_ in stub_server.requests if r_[0] == "POST"]
        assert len(posts) == 3

    def test_gives_up_after_three_5xx(self, stub_server):
        stub_server.script.extend([(500, {})] * 3)
        p = self._provider(stub_server)
        with pytest.raises(ProviderUnavailable):
            p.translate(TranslationRequest("hello", "en", "de"))
        posts = [r_ for r_ in stub_server.requests if r_[0] == "POST"]
        assert len(posts) == 3

    def test_backoff_is_exponential(self, stub_server):
        stub_server.script.extend([(500, {})] * 2)
        p = self._provider(stub_server, backoff_base=0.05)
        start = time.monotonic()
        p.translate(TranslationRequest("hello", "en", "de"))
        elapsed = time.monotonic() - start
        # waits 0.05 then 0.10 between the three attempts
        assert elapsed >= 0.15

    def test_429_raises_rate_limited_without_retry(self, stub_server):
        stub_server.script.append((429, {"error": "slow down"}))
        p = self._provider(stub_server)
        with pytest.raises(RateLimited):
            p.translate(TranslationRequest("hello", "en", "de"))
        posts = [r_ for r_ in stub_server.requests if r_[0] == "POST"]
        assert len(posts) == 1

    def test_4xx_never_retried(self, stub_server):
        stub_server.script.append((404, {"error": "nope"}))
        p = self._provider(stub_server)
        with pytest.raises(ProviderUnavailable):
            p.translate(TranslationRequest("hello", "en", "de"))
        posts = [r_ for r_ in stub_server.requests if r_[0] == "POST"]
        assert len(posts) == 1

    def test_connection_failure(self):
        p = HttpProvider("http://127.0.0.1:9", backoff_base=0.001, timeout=0.2)
        with pytest.raises(ProviderUnavailable):
            p.translate(TranslationRequest("hello", "en", "de"))

    def test_bearer_token_header(self, stub_server):
        p = self._provider(stub_server, token="sekrit")
        p.translate(TranslationRequest("hello", "en", "de"))
        _, _, headers, _ = stub_server.requests[-1]
        assert headers.get("Authorization") == "Bearer sekrit"

    def test_no_token_no_header(self, stub_server):
        p = self._provider(stub_server)
        p.translate(TranslationRequest("hello", "en", "de"))
        _, _, headers, _ = stub_server.requests[-1]
        assert "Authorization" not in headers

    def test_concurrent_requests(self, stub_server):
        p = self._provider(stub_server, max_inflight=4)
        results = []

        def work(i):
            r = p.translate(TranslationRequest(f"w{i}", "en", "de"))
            results.append(r.text)

        threads = [threading.Thread(target=work, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert sorted(results) == sorted(f"w{i}|de" for i in range(16))


class TestCache:
    def test_second_call_hits_cache(self, stub_server, tmp_path):
        inner = HttpProvider(stub_server.base_url, backoff_base=0.001)
        p = CachingProvider(inner, tmp_path)
        r1 = p.translate(TranslationRequest("new york", "en", "de"))
        posts_before = len([r for r in stub_server.requests if r[0] == "POST"])
        r2 = p.translate(TranslationRequest("new york", "en", "de"))
        posts_after = len([r for r in stub_server.requests if r[0] == "POST"])
        assert posts_after == posts_before == 1
        assert r1.text == r2.text == "new york|de"
        assert r1.provenance == "http"
        assert r2.provenance == "cache"

    def test_cache_survives_provider_restart(self, stub_server, tmp_path):
        inner = HttpProvider(stub_server.base_url, backoff_base=0.001)
        CachingProvider(inner, tmp_path).translate(
            TranslationRequest("boston", "en", "fr")
        )
        fresh = CachingProvider(
            HttpProvider(stub_server.base_url, backoff_base=0.001), tmp_path
        )
        r = fresh.translate(TranslationRequest("boston", "en", "fr"))
        assert r.provenance == "cache"
        assert r.text == "boston|fr"

    def test_cache_keyed_by_provider_id(self, stub_server, tmp_path):
        lex = LexiconProvider(LEXICONS)
        http = HttpProvider(stub_server.base_url, backoff_base=0.001)
        CachingProvider(lex, tmp_path).translate(
            TranslationRequest("new york", "en", "de")
        )
        r = CachingProvider(http, tmp_path).translate(
            TranslationRequest("new york", "en", "de")
        )
        # different provider: the lexicon's cached entry must not be served
        assert r.text == "new york|de"

    def test_cache_skips_unstorable_entries(self, tmp_path):
        cache = TranslationCache(tmp_path)
        cache.put("p", "en", "de", "a", "with\ttab")
        assert cache.get("p", "en", "de", "a") is None
        cache.put("p", "en", "de", "b", "ok")
        assert cache.get("p", "en", "de", "b") == "ok"


def test_parse_provider_strings(tmp_path, monkeypatch):
    p = parse_provider(f"lex:{LEXICONS}")
    assert isinstance(p, LexiconProvider)
    p = parse_provider("http://example.invalid:9999")
    assert isinstance(p, HttpProvider)
    assert p.base_url == "http://example.invalid:9999"
    p = parse_provider("http:https://example.invalid/base/")
    assert isinstance(p, HttpProvider)
    assert p.base_url == "https://example.invalid/base"
    p = parse_provider(f"lex:{LEXICONS}", cache_dir=tmp_path)
    assert isinstance(p, CachingProvider)
    with pytest.raises(ConfigurationError):
        parse_provider("ftp://nope")
    with pytest.raises(ConfigurationError):
        parse_provider("")
