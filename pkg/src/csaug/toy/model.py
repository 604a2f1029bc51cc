"""Linear joint model: one softmax head per task over hashed features.

The intent head scores the mean-pooled utterance vector; the slot head
scores each token's context window independently.  The training objective
is L = alpha * L_intent + beta * L_slot where both parts are mean
cross-entropies (over utterances and over tokens respectively), optimized
with plain mini-batch gradient descent.  Everything is float64 and seeded,
so runs are reproducible bit for bit.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from csaug.corpus import Dataset, Utterance
from csaug.errors import (
    DivergenceDetected,
    EmptyBatch,
    IoFailure,
    ModelFormatError,
    UnknownLabelInventory,
)
from csaug.metrics import PRF, span_prf, token_prf
from csaug.toy.features import FeatureExtractor

MAGIC = b"CSAUGTOY"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class JointTrainingConfig:
    alpha: float = 1.0
    beta: float = 0.6
    lr: float = 0.5
    epochs: int = 30
    batch_size: int = 16
    seed: int = 0
    patience: int | None = None  # stop after this many epochs without improvement

    def __post_init__(self) -> None:
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.beta == 0:
            raise ValueError("alpha and beta must be >= 0 and not both zero")
        if self.lr < 0:
            raise ValueError("lr must be >= 0")
        if self.epochs < 0 or self.batch_size < 1:
            raise ValueError("epochs must be >= 0 and batch_size >= 1")
        if self.patience is not None and self.patience < 1:
            raise ValueError("patience must be >= 1 when set")


@dataclass
class ToyJointModel:
    intents: tuple[str, ...]
    tags: tuple[str, ...]
    dim: int
    ngram: int
    w_intent: np.ndarray  # (C, dim)
    b_intent: np.ndarray  # (C,)
    w_slot: np.ndarray  # (T, 3*dim)
    b_slot: np.ndarray  # (T,)
    extractor: FeatureExtractor = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.intents)) != len(self.intents) or not self.intents:
            raise ValueError("intents must be non-empty and unique")
        if len(set(self.tags)) != len(self.tags) or "O" not in self.tags:
            raise ValueError("tags must be unique and include O")
        c, t = len(self.intents), len(self.tags)
        if self.w_intent.shape != (c, self.dim) or self.b_intent.shape != (c,):
            raise ValueError("intent head shape mismatch")
        if self.w_slot.shape != (t, 3 * self.dim) or self.b_slot.shape != (t,):
            raise ValueError("slot head shape mismatch")
        self.extractor = FeatureExtractor(self.dim, self.ngram)
        self._intent_index = {name: i for i, name in enumerate(self.intents)}
        self._tag_index = {name: i for i, name in enumerate(self.tags)}

    @classmethod
    def create(
        cls,
        intents: tuple[str, ...],
        tags: tuple[str, ...],
        dim: int = 4096,
        ngram: int = 3,
    ) -> "ToyJointModel":
        """Zero-initialized model: predicts the uniform distribution everywhere."""
        return cls(
            intents=tuple(intents),
            tags=tuple(tags),
            dim=dim,
            ngram=ngram,
            w_intent=np.zeros((len(intents), dim)),
            b_intent=np.zeros(len(intents)),
            w_slot=np.zeros((len(tags), 3 * dim)),
            b_slot=np.zeros(len(tags)),
        )

    @classmethod
    def for_dataset(
        cls, ds: Dataset, dim: int = 4096, ngram: int = 3
    ) -> "ToyJointModel":
        """Build inventories from a dataset; every slot type gets both B- and I-."""
        intents = tuple(sorted({u.intent for u in ds}))
        types = sorted(
            {lab[2:] for u in ds for lab in u.slot_labels if lab != "O"}
        )
        tags = ("O",) + tuple(
            f"{prefix}-{t}" for t in types for prefix in ("B", "I")
        )
        return cls.create(intents, tags, dim=dim, ngram=ngram)

    def intent_id(self, intent: str) -> int:
        try:
            return self._intent_index[intent]
        except KeyError:
            raise UnknownLabelInventory(f"intent not in model inventory: {intent!r}")

    def tag_id(self, tag: str) -> int:
        try:
            return self._tag_index[tag]
        except KeyError:
            raise UnknownLabelInventory(f"slot tag not in model inventory: {tag!r}")


def _log_softmax(z: np.ndarray) -> np.ndarray:
    shifted = z - z.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


@dataclass(frozen=True)
class _Encoded:
    """Featurized batch, reused across epochs."""

    pooled: np.ndarray  # (n, dim)
    tokens: sparse.csr_matrix  # (M, 3*dim)
    token_owner_slices: tuple[tuple[int, int], ...]  # per-utterance token row range
    y_intent: np.ndarray  # (n,)
    y_slot: np.ndarray  # (M,)


def _encode(model: ToyJointModel, utts: list[Utterance]) -> _Encoded:
    if not utts:
        raise EmptyBatch("no utterances to encode")
    pooled = np.stack([model.extractor.utterance_vector(u.tokens) for u in utts])
    mats = [model.extractor.token_matrix(u.tokens) for u in utts]
    slices = []
    offset = 0
    for mat in mats:
        slices.append((offset, offset + mat.shape[0]))
        offset += mat.shape[0]
    y_intent = np.array([model.intent_id(u.intent) for u in utts], dtype=np.int64)
    y_slot = np.array(
        [model.tag_id(lab) for u in utts for lab in u.slot_labels], dtype=np.int64
    )
    return _Encoded(pooled, sparse.vstack(mats, format="csr"), tuple(slices), y_intent, y_slot)


def _loss_and_grads(
    model: ToyJointModel,
    enc: _Encoded,
    cfg: JointTrainingConfig,
    want_grads: bool,
) -> tuple[tuple[float, float, float], dict[str, np.ndarray] | None]:
    n = enc.pooled.shape[0]
    m = enc.tokens.shape[0]

    logit_i = enc.pooled @ model.w_intent.T + model.b_intent
    logp_i = _log_softmax(logit_i)
    loss_i = -logp_i[np.arange(n), enc.y_intent].mean()

    logit_s = enc.tokens @ model.w_slot.T + model.b_slot
    logp_s = _log_softmax(logit_s)
    loss_s = -logp_s[np.arange(m), enc.y_slot].mean()

    total = cfg.alpha * loss_i + cfg.beta * loss_s
    if not want_grads:
        return (total, loss_i, loss_s), None

    d_logit_i = np.exp(logp_i)
    d_logit_i[np.arange(n), enc.y_intent] -= 1.0
    d_logit_i *= cfg.alpha / n

    d_logit_s = np.exp(logp_s)
    d_logit_s[np.arange(m), enc.y_slot] -= 1.0
    d_logit_s *= cfg.beta / m

    grads = {
        "w_intent": d_logit_i.T @ enc.pooled,
        "b_intent": d_logit_i.sum(axis=0),
        "w_slot": (enc.tokens.T @ d_logit_s).T,
        "b_slot": d_logit_s.sum(axis=0),
    }
    return (total, loss_i, loss_s), grads


def joint_loss(
    model: ToyJointModel, batch: Dataset | list[Utterance], cfg: JointTrainingConfig
) -> tuple[float, float, float]:
    """(total, intent part, slot part); total = alpha*intent + beta*slot exactly."""
    utts = list(batch)
    losses, _ = _loss_and_grads(model, _encode(model, utts), cfg, want_grads=False)
    return losses


def joint_gradients(
    model: ToyJointModel, batch: Dataset | list[Utterance], cfg: JointTrainingConfig
) -> dict[str, np.ndarray]:
    """Analytic gradients of the joint loss with respect to each parameter block."""
    utts = list(batch)
    _, grads = _loss_and_grads(model, _encode(model, utts), cfg, want_grads=True)
    assert grads is not None
    return grads


@dataclass(frozen=True)
class TrainResult:
    losses: tuple[float, ...]  # full-batch joint loss; [0] is pre-training
    intent_losses: tuple[float, ...]
    slot_losses: tuple[float, ...]
    epochs_run: int


def train(
    model: ToyJointModel, ds: Dataset | list[Utterance], cfg: JointTrainingConfig
) -> TrainResult:
    """Mini-batch gradient descent, in place.  Deterministic for a given seed."""
    utts = list(ds)
    enc = _encode(model, utts)
    per_utt = [_encode(model, [u]) for u in utts]  # cheap: reuses the token cache
    rng = np.random.RandomState(cfg.seed & 0xFFFFFFFF)

    def full_loss() -> tuple[float, float, float]:
        losses, _ = _loss_and_grads(model, enc, cfg, want_grads=False)
        return losses

    curve = [full_loss()]
    best = curve[0][0]
    stale = 0
    epochs_run = 0
    for _ in range(cfg.epochs):
        order = rng.permutation(len(utts))
        for lo in range(0, len(utts), cfg.batch_size):
            batch_ids = order[lo : lo + cfg.batch_size]
            batch_enc = _stack([per_utt[i] for i in batch_ids])
            _, grads = _loss_and_grads(model, batch_enc, cfg, want_grads=True)
            assert grads is not None
            model.w_intent -= cfg.lr * grads["w_intent"]
            model.b_intent -= cfg.lr * grads["b_intent"]
            model.w_slot -= cfg.lr * grads["w_slot"]
            model.b_slot -= cfg.lr * grads["b_slot"]
        losses = full_loss()
        if not all(np.isfinite(losses)):
            raise DivergenceDetected(
                f"non-finite loss after epoch {epochs_run + 1}: {losses}"
            )
        curve.append(losses)
        epochs_run += 1
        if losses[0] < best - 1e-12:
            best = losses[0]
            stale = 0
        else:
            stale += 1
            if cfg.patience is not None and stale >= cfg.patience:
                break
    return TrainResult(
        losses=tuple(entry[0] for entry in curve),
        intent_losses=tuple(entry[1] for entry in curve),
        slot_losses=tuple(entry[2] for entry in curve),
        epochs_run=epochs_run,
    )


def _stack(parts: list[_Encoded]) -> _Encoded:
    slices = []
    offset = 0
    for p in parts:
        for lo, hi in p.token_owner_slices:
            slices.append((offset + lo, offset + hi))
        offset += p.tokens.shape[0]
    return _Encoded(
        pooled=np.concatenate([p.pooled for p in parts]),
        tokens=sparse.vstack([p.tokens for p in parts], format="csr"),
        token_owner_slices=tuple(slices),
        y_intent=np.concatenate([p.y_intent for p in parts]),
        y_slot=np.concatenate([p.y_slot for p in parts]),
    )


def predict(
    model: ToyJointModel, u: Utterance
) -> tuple[np.ndarray, np.ndarray]:
    """(intent probabilities (C,), per-token tag probabilities (len(tokens), T))."""
    pooled = model.extractor.utterance_vector(u.tokens)
    tokens = model.extractor.token_matrix(u.tokens)
    p_intent = np.exp(_log_softmax(pooled @ model.w_intent.T + model.b_intent))
    p_slot = np.exp(_log_softmax(tokens @ model.w_slot.T + model.b_slot))
    return p_intent, p_slot


@dataclass(frozen=True)
class EvalResult:
    intent_accuracy: float
    span: PRF
    per_type: dict[str, PRF]
    token: PRF
    per_intent: dict[str, tuple[int, int]]  # intent -> (correct, total)

    @property
    def slot_f1(self) -> float:
        return self.span.f1


def evaluate(model: ToyJointModel, ds: Dataset | list[Utterance]) -> EvalResult:
    """Argmax decoding scored against gold labels.  Never raises on unseen labels:
    gold intents or spans outside the model inventory simply count as errors."""
    utts = list(ds)
    if not utts:
        raise EmptyBatch("no utterances to evaluate")
    correct = 0
    per_intent: dict[str, list[int]] = {}
    gold_seqs: list[tuple[str, ...]] = []
    pred_seqs: list[list[str]] = []
    for u in utts:
        p_intent, p_slot = predict(model, u)
        pred_intent = model.intents[int(p_intent.argmax())]
        hit = pred_intent == u.intent
        correct += hit
        stats = per_intent.setdefault(u.intent, [0, 0])
        stats[0] += hit
        stats[1] += 1
        gold_seqs.append(u.slot_labels)
        pred_seqs.append([model.tags[int(i)] for i in p_slot.argmax(axis=1)])
    overall, per_type = span_prf(gold_seqs, pred_seqs)
    return EvalResult(
        intent_accuracy=correct / len(utts),
        span=overall,
        per_type=per_type,
        token=token_prf(gold_seqs, pred_seqs),
        per_intent={k: (v[0], v[1]) for k, v in sorted(per_intent.items())},
    )


def _write_strings(out: list[bytes], strings: tuple[str, ...]) -> None:
    out.append(struct.pack("<I", len(strings)))
    for s in strings:
        raw = s.encode("utf-8")
        out.append(struct.pack("<I", len(raw)))
        out.append(raw)


class _Reader:
    def __init__(self, blob: bytes) -> None:
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise ModelFormatError("model file truncated")
        chunk = self.blob[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def strings(self) -> tuple[str, ...]:
        return tuple(self.take(self.u32()).decode("utf-8") for _ in range(self.u32()))

    def f64s(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").copy()


def save_model(model: ToyJointModel, path: str) -> None:
    """Write the model to a self-describing little-endian binary file."""
    out: list[bytes] = [MAGIC, struct.pack("<II", FORMAT_VERSION, 0)]
    out.append(struct.pack("<II", model.dim, model.ngram))
    _write_strings(out, model.intents)
    _write_strings(out, model.tags)
    for arr in (model.w_intent, model.b_intent, model.w_slot, model.b_slot):
        out.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(out))


def load_model(path: str) -> ToyJointModel:
    try:
        with open(path, "rb") as fh:
            r = _Reader(fh.read())
    except OSError as exc:
        raise IoFailure(f"cannot read model {path}: {exc}") from exc
    if r.take(8) != MAGIC:
        raise ModelFormatError("not a toy model file")
    version, _flags = struct.unpack("<II", r.take(8))
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version}")
    dim, ngram = struct.unpack("<II", r.take(8))
    try:
        intents = r.strings()
        tags = r.strings()
    except UnicodeDecodeError as exc:
        raise ModelFormatError(f"corrupt string block: {exc}") from exc
    c, t = len(intents), len(tags)
    return ToyJointModel(
        intents=intents,
        tags=tags,
        dim=dim,
        ngram=ngram,
        w_intent=r.f64s(c * dim).reshape(c, dim),
        b_intent=r.f64s(c),
        w_slot=r.f64s(t * 3 * dim).reshape(t, 3 * dim),
        b_slot=r.f64s(t),
    )
