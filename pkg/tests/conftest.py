"""Shared fixtures: committed corpus/lexicons, CLI runner, provider spies."""

from __future__ import annotations

import io
import threading
from contextlib import redirect_stderr, redirect_stdout
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import json
import pytest

from csaug.cli import main
from csaug.corpus import Dataset, read_dataset
from csaug.translate import TranslationProvider, TranslationRequest, TranslationResult

FIXTURES = Path(__file__).parent / "fixtures"
CORPUS = FIXTURES / "corpus_en.tsv"
LEXICONS = FIXTURES / "lexicons"
GOLDEN = FIXTURES / "golden_augment.tsv"


@pytest.fixture
def corpus() -> Dataset:
    return read_dataset(CORPUS)


def run_cli(argv: list[str]) -> tuple[int, str, str]:
    """Run the CLI in-process, capturing stdout/stderr."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class SpyProvider(TranslationProvider):
    """Delegates to an inner provider while recording every request."""

    def __init__(self, inner: TranslationProvider):
        self.inner = inner
        self.provider_id = "spy-" + inner.provider_id
        self.requests: list[TranslationRequest] = []
        self._lock = threading.Lock()

    def translate(self, req: TranslationRequest) -> TranslationResult:
        with self._lock:
            self.requests.append(req)
        return self.inner.translate(req)

    def supported_languages(self) -> set[str]:
        return self.inner.supported_languages()


class UpperProvider(TranslationProvider):
    """Offline stand-in: 'translates' by tagging text with the target code."""

    def __init__(self, languages: set[str]):
        self.provider_id = "upper"
        self.languages = set(languages)

    def translate(self, req: TranslationRequest) -> TranslationResult:
        if req.target_lang not in self.languages:
            from csaug.errors import UnsupportedLanguage

            raise UnsupportedLanguage(req.target_lang)
        words = [f"{w}@{req.target_lang}" for w in req.text.split()]
        text = " ".join(words)
        return TranslationResult(text, tuple(words), "lexicon")

    def supported_languages(self) -> set[str]:
        return set(self.languages)


class _StubHandler(BaseHTTPRequestHandler):
    """Scriptable translation server: pops (status, payload) from a list."""

    def _respond(self, status: int, payload: dict | list) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        self.server.requests.append(("GET", self.path, dict(self.headers), None))
        if self.server.script:
            status, payload = self.server.script.pop(0)
            self._respond(status, payload)
            return
        if self.path == "/languages":
            self._respond(
                200, [{"code": c} for c in sorted(self.server.languages)]
            )
        else:
            self._respond(404, {"error": "not found"})

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length) or b"{}")
        self.server.requests.append(("POST", self.path, dict(self.headers), body))
        if self.server.script:
            status, payload = self.server.script.pop(0)
            self._respond(status, payload)
            return
        if self.path == "/translate":
            self._respond(
                200, {"translatedText": f"{body['q']}|{body['target']}"}
            )
        else:
            self._respond(404, {"error": "not found"})

    def log_message(self, *args):  # keep test output clean
        pass


class StubServer:
    """Local HTTP translation server for provider tests."""

    def __init__(self, languages: set[str] | None = None):
        self.httpd = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        self.httpd.requests = []
        self.httpd.script = []
        self.httpd.languages = languages or {"de", "fr"}
        self.thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self) -> str:
        host, port = self.httpd.server_address
        return f"http://{host}:{port}"

    @property
    def requests(self):
        return self.httpd.requests

    @property
    def script(self):
        return self.httpd.script

    def close(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()


@pytest.fixture
def stub_server():
    server = StubServer()
    yield server
    server.close()
