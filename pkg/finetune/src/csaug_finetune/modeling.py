"""Joint intent/slot model on a BERT backbone.

The intent head is a linear layer over the final hidden state of the
[CLS] token; the slot head is a linear layer over every token's final
hidden state.  The backbone's pooler is dropped so that with all 12
transformer layers frozen the trainable parameters are exactly the two
heads.

The joint loss is L = alpha * L_intent + beta * L_slot with cross
entropy for both parts; label positions carrying IGNORE_INDEX do not
contribute.
"""

from __future__ import annotations

from contextlib import contextmanager
from pathlib import Path

import torch
from torch import nn
from transformers import AutoTokenizer, BertConfig, BertModel
from transformers.utils import logging as hf_logging

from csaug_finetune.data import IGNORE_INDEX
from csaug_finetune.errors import ResourceError


@contextmanager
def _quiet_hub():
    """Silence progress bars and key-mismatch reports around from_pretrained.

    Dropping the pooler is deliberate, so the mismatch report would only
    pollute stderr, which the CLI reserves for its own diagnostics.
    """
    verbosity = hf_logging.get_verbosity()
    bars = hf_logging.is_progress_bar_enabled()
    hf_logging.set_verbosity_error()
    hf_logging.disable_progress_bar()
    try:
        yield
    finally:
        hf_logging.set_verbosity(verbosity)
        if bars:
            hf_logging.enable_progress_bar()


class JointBertModel(nn.Module):
    def __init__(self, bert: BertModel, n_intents: int, n_slots: int, dropout: float = 0.1):
        super().__init__()
        self.bert = bert
        self.dropout = nn.Dropout(dropout)
        hidden = bert.config.hidden_size
        self.intent_head = nn.Linear(hidden, n_intents)
        self.slot_head = nn.Linear(hidden, n_slots)

    def forward(self, input_ids, attention_mask):
        """(intent logits [B, I], slot logits [B, L, S])."""
        out = self.bert(input_ids=input_ids, attention_mask=attention_mask)
        hidden = self.dropout(out.last_hidden_state)
        return self.intent_head(hidden[:, 0]), self.slot_head(hidden)


def load_backbone(model_id_or_path: str):
    """(BertModel without pooler, tokenizer) from a local dir or hub id."""
    try:
        with _quiet_hub():
            bert = BertModel.from_pretrained(model_id_or_path, add_pooling_layer=False)
            tokenizer = AutoTokenizer.from_pretrained(model_id_or_path)
    except Exception as exc:
        raise ResourceError(f"cannot load base model {model_id_or_path!r}: {exc}") from exc
    return bert, tokenizer


def load_tokenizer(path_or_id: str | Path):
    try:
        with _quiet_hub():
            return AutoTokenizer.from_pretrained(path_or_id)
    except Exception as exc:
        raise ResourceError(f"cannot load tokenizer from {path_or_id!r}: {exc}") from exc


def freeze_layers(model: JointBertModel, count: int) -> None:
    """Freeze the embedding block and the first ``count`` transformer layers.

    count=0 leaves everything trainable; count equal to the encoder depth
    freezes the whole backbone, leaving only the heads.
    """
    depth = len(model.bert.encoder.layer)
    if count > depth:
        raise ResourceError(
            f"cannot freeze {count} layers: the backbone has only {depth}"
        )
    if count == 0:
        return
    for param in model.bert.embeddings.parameters():
        param.requires_grad_(False)
    for layer in model.bert.encoder.layer[:count]:
        for param in layer.parameters():
            param.requires_grad_(False)


def parameter_counts(model: nn.Module) -> tuple[int, int]:
    """(total, trainable) parameter counts."""
    total = sum(p.numel() for p in model.parameters())
    trainable = sum(p.numel() for p in model.parameters() if p.requires_grad)
    return total, trainable


def joint_loss(alpha, beta, intent_logits, intent_ids, slot_logits, slot_ids):
    """(total, intent part, slot part); total = alpha*intent + beta*slot exactly."""
    cross_entropy = nn.functional.cross_entropy
    loss_i = cross_entropy(intent_logits, intent_ids, ignore_index=IGNORE_INDEX)
    loss_s = cross_entropy(
        slot_logits.reshape(-1, slot_logits.shape[-1]),
        slot_ids.reshape(-1),
        ignore_index=IGNORE_INDEX,
    )
    return alpha * loss_i + beta * loss_s, loss_i, loss_s


def save_checkpoint(path: str | Path, model: JointBertModel, config_dict: dict,
                    inventory, epoch: int, metric: float) -> None:
    torch.save(
        {
            "format": "csaug-finetune-checkpoint",
            "version": 1,
            "config": config_dict,
            "bert_config": model.bert.config.to_dict(),
            "intents": list(inventory.intents),
            "slots": list(inventory.slots),
            "epoch": epoch,
            "metric": metric,
            "state_dict": model.state_dict(),
        },
        path,
    )


def load_checkpoint(path: str | Path):
    """(model in eval mode, checkpoint dict) from a save_checkpoint file."""
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except OSError as exc:
        raise ResourceError(f"cannot read checkpoint {path}: {exc}") from exc
    except Exception as exc:
        raise ResourceError(f"corrupt checkpoint {path}: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format") != "csaug-finetune-checkpoint":
        raise ResourceError(f"{path} is not a fine-tuning checkpoint")
    bert = BertModel(BertConfig(**payload["bert_config"]), add_pooling_layer=False)
    model = JointBertModel(bert, len(payload["intents"]), len(payload["slots"]))
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, payload
