"""Pluggable phrase translation: lexicon files, HTTP backend, disk cache.

Providers translate one phrase at a time and are safe for concurrent use.
The HTTP wire protocol is a minimal JSON POST: request
``{"q": <text>, "source": <code>, "target": <code>}`` to ``<base>/translate``
answered by ``{"translatedText": <text>}``; supported languages come from
``GET <base>/languages`` as a list of ``{"code": <code>}`` objects.
"""

from __future__ import annotations

import hashlib
import re
import threading
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import requests

from .errors import (
    ConfigurationError,
    DuplicateLexiconEntry,
    EmptyTranslation,
    ProviderUnavailable,
    RateLimited,
    UnsupportedLanguage,
)
from .families import SCRIPTIO_CONTINUA

# Han (unified + extension A), Hiragana, Katakana.
_CJK_RUN = re.compile(r"([一-鿿㐀-䶿぀-ゟ゠-ヿ]+|[^一-鿿㐀-䶿぀-ゟ゠-ヿ\s]+)")


@dataclass(frozen=True)
class TranslationRequest:
    text: str
    source_lang: str
    target_lang: str

    def __post_init__(self):
        if not self.text:
            raise ConfigurationError("empty translation request text")
        if self.source_lang == self.target_lang:
            raise ConfigurationError(
                f"source and target language are both {self.source_lang!r}"
            )


@dataclass(frozen=True)
class TranslationResult:
    text: str
    tokens: tuple[str, ...]
    provenance: str  # lexicon | http | cache | identity-fallback


def tokenize_translation(text: str, target_lang: str) -> tuple[str, ...]:
    """Split a translated phrase into tokens.

    Space-delimited languages split on whitespace.  For scriptio-continua
    targets (no spaces between words) each maximal run of Han/Kana
    codepoints becomes a single token, so alignment still sees a token count.
    """
    if target_lang in SCRIPTIO_CONTINUA:
        tokens = tuple(m.group(0) for m in _CJK_RUN.finditer(text))
    else:
        tokens = tuple(text.split())
    if not tokens:
        raise EmptyTranslation(f"translation {text!r} produced no tokens")
    return tokens


class TranslationProvider(ABC):
    """Phrase-level translation capability; implementations must be thread-safe."""

    provider_id: str

    @abstractmethod
    def translate(self, req: TranslationRequest) -> TranslationResult: ...

    @abstractmethod
    def supported_languages(self) -> set[str]: ...


class LexiconProvider(TranslationProvider):
    """Deterministic provider backed by a directory of ``<src>-<tgt>.tsv`` files.

    Each line is ``source_phrase<TAB>target_phrase``; lookup is
    case-insensitive on the source side.  File names split at the first
    hyphen, so the source code must not itself contain hyphens (targets may,
    e.g. ``en-zh-cn.tsv``).  Lookup order per request: exact phrase, then
    word by word, then identity per word (flagged in provenance).
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.provider_id = "lex-" + hashlib.sha1(
            str(self.directory.resolve()).encode("utf-8")
        ).hexdigest()[:12]
        self._tables: dict[tuple[str, str], dict[str, str]] = {}
        if not self.directory.is_dir():
            raise ConfigurationError(f"lexicon directory {directory} does not exist")
        for f in sorted(self.directory.glob("*.tsv")):
            name = f.stem
            if "-" not in name:
                raise ConfigurationError(
                    f"lexicon file {f.name} is not named <src>-<tgt>.tsv"
                )
            src, tgt = name.split("-", 1)
            table: dict[str, str] = {}
            for ln, line in enumerate(f.read_text(encoding="utf-8").splitlines(), 1):
                if not line.strip():
                    continue
                cols = line.split("\t")
                if len(cols) != 2:
                    raise ConfigurationError(
                        f"{f.name} line {ln}: expected 'source<TAB>target'"
                    )
                key = cols[0].lower()
                if key in table:
                    raise DuplicateLexiconEntry(
                        f"{f.name} line {ln}: duplicate source phrase {cols[0]!r}"
                    )
                table[key] = cols[1]
            self._tables[(src, tgt)] = table
        if not self._tables:
            raise ConfigurationError(f"no *.tsv lexicon files in {directory}")

    def supported_languages(self) -> set[str]:
        return {tgt for _, tgt in self._tables}

    def translate(self, req: TranslationRequest) -> TranslationResult:
        table = self._tables.get((req.source_lang, req.target_lang))
        if table is None:
            raise UnsupportedLanguage(
                f"no lexicon for {req.source_lang}->{req.target_lang}"
            )
        hit = table.get(req.text.lower())
        if hit is not None:
            return TranslationResult(
                hit, tokenize_translation(hit, req.target_lang), "lexicon"
            )
        out_words = []
        fell_back = False
        for word in req.text.split():
            w = table.get(word.lower())
            if w is None:
                w = word
                fell_back = True
            out_words.append(w)
        text = " ".join(out_words)
        return TranslationResult(
            text,
            tokenize_translation(text, req.target_lang),
            "identity-fallback" if fell_back else "lexicon",
        )


class HttpProvider(TranslationProvider):
    """Client for a translation server speaking the JSON protocol above.

    5xx responses and timeouts are retried up to `attempts` times with
    exponential backoff; 4xx responses are never retried and 429 surfaces
    as RateLimited.  A semaphore caps concurrent in-flight requests.
    """

    def __init__(
        self,
        base_url: str,
        token: str | None = None,
        max_inflight: int = 4,
        timeout: float = 10.0,
        attempts: int = 3,
        backoff_base: float = 0.25,
    ):
        self.base_url = base_url.rstrip("/")
        self.provider_id = "http-" + hashlib.sha1(
            self.base_url.encode("utf-8")
        ).hexdigest()[:12]
        self.token = token
        self.timeout = timeout
        self.attempts = attempts
        self.backoff_base = backoff_base
        self._sem = threading.Semaphore(max_inflight)
        self._local = threading.local()

    def _session(self) -> requests.Session:
        sess = getattr(self._local, "session", None)
        if sess is None:
            sess = requests.Session()
            if self.token:
                sess.headers["Authorization"] = f"Bearer {self.token}"
            self._local.session = sess
        return sess

    def _request(self, method: str, url: str, **kw):
        last_exc: Exception | None = None
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                with self._sem:
                    resp = self._session().request(
                        method, url, timeout=self.timeout, **kw
                    )
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if resp.status_code >= 500:
                last_exc = ProviderUnavailable(
                    f"{url} answered {resp.status_code}"
                )
                continue
            if resp.status_code == 429:
                raise RateLimited(f"{url} answered 429")
            if resp.status_code >= 400:
                raise ProviderUnavailable(
                    f"{url} answered {resp.status_code}: {resp.text[:200]}"
                )
            return resp
        raise ProviderUnavailable(
            f"{url} unavailable after {self.attempts} attempts: {last_exc}"
        )

    def translate(self, req: TranslationRequest) -> TranslationResult:
        resp = self._request(
            "POST",
            self.base_url + "/translate",
            json={"q": req.text, "source": req.source_lang, "target": req.target_lang},
        )
        try:
            text = resp.json()["translatedText"]
        except (ValueError, KeyError) as exc:
            raise ProviderUnavailable(f"bad response body: {exc}") from exc
        if not text:
            raise EmptyTranslation(f"server returned empty translation for {req.text!r}")
        return TranslationResult(
            text, tokenize_translation(text, req.target_lang), "http"
        )

    def supported_languages(self) -> set[str]:
        resp = self._request("GET", self.base_url + "/languages")
        try:
            return {entry["code"] for entry in resp.json()}
        except (ValueError, KeyError, TypeError) as exc:
            raise ProviderUnavailable(f"bad /languages body: {exc}") from exc


class TranslationCache:
    """Append-only on-disk cache, one TSV file per (provider, src, tgt) triple.

    Hits reproduce the stored translation byte for byte.  Reads are lock-free
    after load; writes serialize through one lock.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._mem: dict[tuple[str, str, str], dict[str, str]] = {}
        self._lock = threading.Lock()

    def _path(self, provider_id: str, src: str, tgt: str) -> Path:
        return self.directory / f"{provider_id}__{src}-{tgt}.tsv"

    def _table(self, provider_id: str, src: str, tgt: str) -> dict[str, str]:
        key = (provider_id, src, tgt)
        table = self._mem.get(key)
        if table is None:
            with self._lock:
                table = self._mem.get(key)
                if table is None:
                    table = {}
                    path = self._path(provider_id, src, tgt)
                    if path.exists():
                        for line in path.read_text(encoding="utf-8").splitlines():
                            if "\t" in line:
                                k, v = line.split("\t", 1)
                                table[k] = v
                    self._mem[key] = table
        return table

    def get(self, provider_id: str, src: str, tgt: str, text: str) -> str | None:
        return self._table(provider_id, src, tgt).get(text)

    def put(self, provider_id: str, src: str, tgt: str, text: str, translated: str) -> None:
        if "\t" in text or "\n" in text or "\n" in translated or "\t" in translated:
            return  # not representable in the TSV cache; skip, stays transparent
        with self._lock:
            table = self._table(provider_id, src, tgt)
            if text in table:
                return
            table[text] = translated
            with self._path(provider_id, src, tgt).open("a", encoding="utf-8") as f:
                f.write(f"{text}\t{translated}\n")


class CachingProvider(TranslationProvider):
    """Wraps a provider with a persistent cache; hits carry provenance 'cache'."""

    def __init__(self, inner: TranslationProvider, cache_dir: str | Path):
        self.inner = inner
        self.provider_id = inner.provider_id
        self.cache = TranslationCache(cache_dir)

    def translate(self, req: TranslationRequest) -> TranslationResult:
        hit = self.cache.get(
            self.provider_id, req.source_lang, req.target_lang, req.text
        )
        if hit is not None:
            return TranslationResult(
                hit, tokenize_translation(hit, req.target_lang), "cache"
            )
        res = self.inner.translate(req)
        self.cache.put(
            self.provider_id, req.source_lang, req.target_lang, req.text, res.text
        )
        return res

    def supported_languages(self) -> set[str]:
        return self.inner.supported_languages()


def parse_provider(
    spec: str, token: str | None = None, cache_dir: str | Path | None = None
) -> TranslationProvider:
    """Build a provider from a selection string: ``lex:<directory>`` or ``http:<base-url>``.

    A plain ``http(s)://...`` URL also selects the HTTP provider.  When
    cache_dir is given the provider is wrapped with a persistent cache.
    """
    if spec.startswith("lex:"):
        provider: TranslationProvider = LexiconProvider(spec[4:])
    elif spec.startswith(("http://", "https://")):
        provider = HttpProvider(spec, token=token)
    elif spec.startswith("http:"):
        provider = HttpProvider(spec[5:], token=token)
    else:
        raise ConfigurationError(
            f"bad provider {spec!r}: expected lex:<directory> or http:<base-url>"
        )
    if cache_dir is not None:
        provider = CachingProvider(provider, cache_dir)
    return provider
