"""HTTP service endpoints and wire-protocol interoperability."""

import threading
import time

import pytest
from fastapi.testclient import TestClient

from csaug import __version__
from csaug.augment import AugmentationConfig, augment_dataset
from csaug.corpus import format_dataset, read_dataset
from csaug.errors import ProviderUnavailable, RateLimited
from csaug.service import create_app
from csaug.translate import (
    HttpProvider,
    LexiconProvider,
    TranslationProvider,
    TranslationRequest,
)

from conftest import CORPUS, LEXICONS, UpperProvider


@pytest.fixture
def client() -> TestClient:
    return TestClient(create_app(LexiconProvider(LEXICONS)))


@pytest.fixture
def bare_client() -> TestClient:
    return TestClient(create_app())


def test_health(bare_client):
    resp = bare_client.get("/health")
    assert resp.status_code == 200
    assert resp.json() == {"status": "ok", "version": __version__}


def test_families_registry(bare_client):
    resp = bare_client.get("/families")
    assert resp.status_code == 200
    assert resp.json() == [
        {"name": "afro-asiatic", "members": ["ar", "am", "he", "so"]},
        {"name": "germanic", "members": ["de", "nl", "da", "sv", "no"]},
        {"name": "indo-aryan", "members": ["hi", "bn", "mr", "ne", "gu", "pa"]},
        {"name": "romance", "members": ["es", "pt", "fr", "it", "ro"]},
        {"name": "sino-tibetan-japonic", "members": ["zh-cn", "ja", "ko"]},
        {"name": "turkic", "members": ["tr", "az", "ug", "kk"]},
    ]


class TestLanguages:
    def test_sorted_codes(self, client):
        resp = client.get("/languages")
        assert resp.json() == [
            {"code": "de"}, {"code": "fr"}, {"code": "hi"},
            {"code": "tr"}, {"code": "zh-cn"},
        ]

    def test_empty_without_provider(self, bare_client):
        assert bare_client.get("/languages").json() == []


class TestTranslate:
    def test_lexicon_lookup(self, client):
        resp = client.post(
            "/translate", json={"q": "new york", "source": "en", "target": "de"}
        )
        assert resp.status_code == 200
        assert resp.json() == {"translatedText": "neu york"}

    def test_503_without_provider(self, bare_client):
        resp = bare_client.post(
            "/translate", json={"q": "x", "source": "en", "target": "de"}
        )
        assert resp.status_code == 503
        assert resp.json()["error"] == "NoProvider"

    def test_unsupported_pair_is_400(self, client):
        resp = client.post(
            "/translate", json={"q": "x", "source": "de", "target": "fr"}
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "UnsupportedLanguage"

    def test_rate_limit_passes_through_as_429(self):
        class Limited(TranslationProvider):
            provider_id = "limited"

            def translate(self, req):
                raise RateLimited("slow down")

            def supported_languages(self):
                return {"de"}

        client = TestClient(create_app(Limited()))
        resp = client.post(
            "/translate", json={"q": "x", "source": "en", "target": "de"}
        )
        assert resp.status_code == 429
        assert resp.json()["error"] == "RateLimited"

    def test_upstream_outage_is_502(self):
        class Down(TranslationProvider):
            provider_id = "down"

            def translate(self, req):
                raise ProviderUnavailable("backend gone")

            def supported_languages(self):
                return {"de"}

        client = TestClient(create_app(Down()))
        resp = client.post(
            "/translate", json={"q": "x", "source": "en", "target": "de"}
        )
        assert resp.status_code == 502


class TestChunks:
    def test_decomposition(self, bare_client):
        resp = bare_client.post(
            "/chunks",
            json={
                "tokens": ["fly", "to", "new", "york"],
                "slot_labels": ["O", "O", "B-city", "I-city"],
            },
        )
        assert resp.status_code == 200
        assert resp.json() == {
            "chunks": [
                {"start": 0, "end": 2, "slot_type": None, "text": "fly to"},
                {"start": 2, "end": 4, "slot_type": "city", "text": "new york"},
            ]
        }

    def test_illegal_labels_are_400(self, bare_client):
        resp = bare_client.post(
            "/chunks",
            json={"tokens": ["a", "b"], "slot_labels": ["O", "I-city"]},
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "IllegalBIOTransition"


class TestStats:
    def test_counts(self, bare_client):
        ds = read_dataset(CORPUS)
        body = {
            "dataset": {
                "language": ds.language,
                "split": ds.split,
                "utterances": [
                    {
                        "id": u.id,
                        "tokens": list(u.tokens),
                        "slot_labels": list(u.slot_labels),
                        "intent": u.intent,
                    }
                    for u in ds
                ],
            }
        }
        resp = bare_client.post("/stats", json=body)
        assert resp.status_code == 200
        assert resp.json() == {
            "utterances": 12,
            "tokens": 78,
            "intents": 6,
            "slot_types": 11,
            "slot_tags": 15,
        }


class TestValidate:
    def test_valid_text(self, bare_client):
        text = CORPUS.read_text(encoding="utf-8")
        resp = bare_client.post("/validate", json={"text": text})
        body = resp.json()
        assert body["valid"] is True
        assert body["utterances"] == 12
        assert body["error"] is None

    def test_invalid_labels_reported(self, bare_client):
        text = (
            "id\tutterance\tslot_labels\tintent\n"
            "x1\tgo to boston\tO O I-city\tflight\n"
        )
        resp = bare_client.post("/validate", json={"text": text})
        body = resp.json()
        assert resp.status_code == 200
        assert body["valid"] is False
        assert "I-city" in body["error"]

    def test_repair_round_trip(self, bare_client):
        text = (
            "id\tutterance\tslot_labels\tintent\n"
            "x1\tgo to boston\tO O I-city\tflight\n"
        )
        resp = bare_client.post("/validate", json={"text": text, "repair": True})
        body = resp.json()
        assert body["valid"] is True
        assert "B-city" in body["repaired_text"]
        again = bare_client.post("/validate", json={"text": body["repaired_text"]})
        assert again.json()["valid"] is True


class TestAugment:
    def _body(self, ds, **config):
        return {
            "dataset": {
                "language": ds.language,
                "split": ds.split,
                "utterances": [
                    {
                        "id": u.id,
                        "tokens": list(u.tokens),
                        "slot_labels": list(u.slot_labels),
                        "intent": u.intent,
                    }
                    for u in ds
                ],
            },
            "config": config,
        }

    def test_matches_library_call(self):
        ds = read_dataset(CORPUS)
        provider = UpperProvider({"de", "fr"})
        client = TestClient(create_app(provider))
        resp = client.post("/augment", json=self._body(ds, k=2, seed=7))
        assert resp.status_code == 200
        got = resp.json()["dataset"]
        expected = augment_dataset(ds, AugmentationConfig(k=2, seed=7), UpperProvider({"de", "fr"}))
        assert got["language"] == expected.language
        assert [u["id"] for u in got["utterances"]] == [u.id for u in expected]
        for sent, ref in zip(got["utterances"], expected):
            assert sent["tokens"] == list(ref.tokens)
            assert sent["slot_labels"] == list(ref.slot_labels)
            assert sent["intent"] == ref.intent

    def test_503_without_provider(self, bare_client):
        ds = read_dataset(CORPUS)
        resp = bare_client.post("/augment", json=self._body(ds, k=1))
        assert resp.status_code == 503

    def test_empty_pool_is_400(self):
        client = TestClient(create_app(UpperProvider({"de"})))
        ds = read_dataset(CORPUS)
        resp = client.post(
            "/augment", json=self._body(ds, k=1, excluded_languages=["de"])
        )
        assert resp.status_code == 400
        assert resp.json()["error"] == "ConfigurationError"

    def test_provider_failure_inside_run_is_502(self):
        class Flaky(TranslationProvider):
            provider_id = "flaky"

            def translate(self, req):
                raise ProviderUnavailable("mid-run outage")

            def supported_languages(self):
                return {"de", "fr"}

        client = TestClient(create_app(Flaky()))
        ds = read_dataset(CORPUS)
        resp = client.post("/augment", json=self._body(ds, k=1))
        assert resp.status_code == 502
        assert resp.json()["error"] == "AugmentationError"


@pytest.fixture(scope="module")
def live_server():
    """The service running under uvicorn on an ephemeral port."""
    import uvicorn

    app = create_app(LexiconProvider(LEXICONS))
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("service did not start")
        time.sleep(0.02)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


class TestWireProtocol:
    """One csaug instance can act as the translation backend for another."""

    def test_translate_parity_with_direct_lexicon(self, live_server):
        remote = HttpProvider(live_server, backoff_base=0.01)
        local = LexiconProvider(LEXICONS)
        for phrase, target in [("new york", "de"), ("boston", "fr"), ("to", "zh-cn")]:
            req = TranslationRequest(phrase, "en", target)
            assert remote.translate(req).text == local.translate(req).text
        assert remote.supported_languages() == local.supported_languages()

    def test_end_to_end_augmentation_over_http(self, live_server):
        ds = read_dataset(CORPUS)
        cfg = AugmentationConfig(k=2, seed=42, excluded_languages={"hi", "tr"})
        over_http = augment_dataset(ds, cfg, HttpProvider(live_server, backoff_base=0.01))
        direct = augment_dataset(ds, cfg, LexiconProvider(LEXICONS))
        assert format_dataset(over_http) == format_dataset(direct)
