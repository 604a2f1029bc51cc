"""HTTP service wrapping the library.

Exposes the analysis operations (chunks, stats, validate, families,
augment) plus the translation wire protocol itself (POST /translate,
GET /languages) when the app is constructed with a backing provider, so
one csaug instance can serve as the translation backend for another.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from csaug import __version__
from csaug.augment import AugmentationConfig, augment_dataset
from csaug.chunker import slot_chunks
from csaug.corpus import (
    Dataset,
    Utterance,
    compute_stats,
    format_dataset,
    parse_dataset,
)
from csaug.errors import (
    AugmentationError,
    CsaugError,
    ProviderUnavailable,
    RateLimited,
    UnsupportedLanguage,
)
from csaug.families import family_rows
from csaug.translate import TranslationProvider, TranslationRequest


class UtteranceModel(BaseModel):
    id: str
    tokens: list[str]
    slot_labels: list[str]
    intent: str

    @classmethod
    def from_utterance(cls, u: Utterance) -> "UtteranceModel":
        return cls(
            id=u.id,
            tokens=list(u.tokens),
            slot_labels=list(u.slot_labels),
            intent=u.intent,
        )

    def to_utterance(self) -> Utterance:
        return Utterance(
            id=self.id,
            tokens=tuple(self.tokens),
            slot_labels=tuple(self.slot_labels),
            intent=self.intent,
        )


class DatasetModel(BaseModel):
    language: str = "en"
    split: str = "train"
    utterances: list[UtteranceModel]

    @classmethod
    def from_dataset(cls, ds: Dataset) -> "DatasetModel":
        return cls(
            language=ds.language,
            split=ds.split,
            utterances=[UtteranceModel.from_utterance(u) for u in ds],
        )

    def to_dataset(self) -> Dataset:
        return Dataset(
            utterances=tuple(u.to_utterance() for u in self.utterances),
            language=self.language,
            split=self.split,
        )


class TranslateIn(BaseModel):
    q: str
    source: str
    target: str


class TranslateOut(BaseModel):
    translatedText: str


class LanguageOut(BaseModel):
    code: str


class HealthOut(BaseModel):
    status: str
    version: str


class FamilyOut(BaseModel):
    name: str
    members: list[str]


class ChunksIn(BaseModel):
    tokens: list[str]
    slot_labels: list[str]
    intent: str = "unknown"
    id: str = "adhoc"


class ChunkOut(BaseModel):
    start: int
    end: int
    slot_type: str | None
    text: str


class ChunksOut(BaseModel):
    chunks: list[ChunkOut]


class StatsIn(BaseModel):
    dataset: DatasetModel


class StatsOut(BaseModel):
    utterances: int
    tokens: int
    intents: int
    slot_types: int
    slot_tags: int


class ValidateIn(BaseModel):
    text: str
    format: str = "multiatis-tsv"
    repair: bool = False


class ValidateOut(BaseModel):
    valid: bool
    utterances: int | None = None
    error: str | None = None
    repaired_text: str | None = None


class AugmentConfigModel(BaseModel):
    level: str = "chunk"
    k: int = 5
    allowed_languages: list[str] = Field(default_factory=list)
    excluded_languages: list[str] = Field(default_factory=list)
    family: str | None = None
    include_original: bool = True
    seed: int = 0

    def to_config(self) -> AugmentationConfig:
        return AugmentationConfig(
            level=self.level,
            k=self.k,
            allowed_languages=frozenset(self.allowed_languages),
            excluded_languages=frozenset(self.excluded_languages),
            family=self.family,
            include_original=self.include_original,
            seed=self.seed,
        )


class AugmentIn(BaseModel):
    dataset: DatasetModel
    config: AugmentConfigModel = Field(default_factory=AugmentConfigModel)


class AugmentOut(BaseModel):
    dataset: DatasetModel


def _error_status(exc: CsaugError) -> int:
    if isinstance(exc, RateLimited):
        return 429
    if isinstance(exc, ProviderUnavailable):
        return 502
    if isinstance(exc, AugmentationError) and exc.provider_failure:
        return 502
    if isinstance(exc, UnsupportedLanguage):
        return 400
    return 400


def create_app(provider: TranslationProvider | None = None) -> FastAPI:
    app = FastAPI(title="csaug", version=__version__)
    app.state.provider = provider

    @app.exception_handler(CsaugError)
    async def _csaug_error(_request: Request, exc: CsaugError) -> JSONResponse:
        return JSONResponse(
            status_code=_error_status(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.get("/health", response_model=HealthOut)
    def health() -> HealthOut:
        return HealthOut(status="ok", version=__version__)

    @app.get("/languages", response_model=list[LanguageOut])
    def languages() -> list[LanguageOut]:
        if app.state.provider is None:
            return []
        return [
            LanguageOut(code=c)
            for c in sorted(app.state.provider.supported_languages())
        ]

    @app.post("/translate", response_model=TranslateOut)
    def translate(body: TranslateIn) -> TranslateOut:
        if app.state.provider is None:
            return JSONResponse(
                status_code=503,
                content={"error": "NoProvider", "detail": "no provider configured"},
            )
        result = app.state.provider.translate(
            TranslationRequest(body.q, body.source, body.target)
        )
        return TranslateOut(translatedText=result.text)

    @app.get("/families", response_model=list[FamilyOut])
    def families() -> list[FamilyOut]:
        return [FamilyOut(name=n, members=list(m)) for n, m in family_rows()]

    @app.post("/chunks", response_model=ChunksOut)
    def chunks(body: ChunksIn) -> ChunksOut:
        u = Utterance(
            id=body.id,
            tokens=tuple(body.tokens),
            slot_labels=tuple(body.slot_labels),
            intent=body.intent,
        )
        return ChunksOut(
            chunks=[
                ChunkOut(start=c.start, end=c.end, slot_type=c.slot_type, text=c.text)
                for c in slot_chunks(u)
            ]
        )

    @app.post("/stats", response_model=StatsOut)
    def stats(body: StatsIn) -> StatsOut:
        st = compute_stats(body.dataset.to_dataset())
        return StatsOut(
            utterances=st.utterance_count,
            tokens=st.token_count,
            intents=st.intent_count,
            slot_types=st.slot_type_count,
            slot_tags=st.slot_tag_count,
        )

    @app.post("/validate", response_model=ValidateOut)
    def validate(body: ValidateIn) -> ValidateOut:
        try:
            ds = parse_dataset(body.text, body.format, repair=body.repair)
        except CsaugError as exc:
            return ValidateOut(valid=False, error=str(exc))
        repaired = format_dataset(ds, body.format) if body.repair else None
        return ValidateOut(valid=True, utterances=len(ds), repaired_text=repaired)

    @app.post("/augment", response_model=AugmentOut)
    def augment(body: AugmentIn) -> AugmentOut:
        if app.state.provider is None:
            return JSONResponse(
                status_code=503,
                content={"error": "NoProvider", "detail": "no provider configured"},
            )
        out = augment_dataset(
            body.dataset.to_dataset(), body.config.to_config(), app.state.provider
        )
        return AugmentOut(dataset=DatasetModel.from_dataset(out))

    return app
