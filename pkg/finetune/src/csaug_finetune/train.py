"""Fine-tuning loop: Adam, layer freezing, early stopping, best-on-dev.

``finetune`` trains a joint model on parsed examples and writes a run
directory::

    out_dir/
      metrics.jsonl   one JSON object per line: a "start" record with the
                      config, one "epoch" record per epoch (train losses,
                      dev intent accuracy, dev slot span F1), one "end"
                      record with the winner
      best.pt         checkpoint of the best epoch on the dev set
      tokenizer/      tokenizer files, so evaluation needs no network

The selection metric is dev intent accuracy or dev slot F1 depending on
``config.selection``; the best checkpoint is replaced only on strict
improvement, and training stops after ``patience`` consecutive epochs
without one.  Configuration and resource problems (unreadable model,
unwritable output dir, frozen depth exceeding the backbone) surface
before the first training step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import torch
from torch.utils.data import DataLoader

from csaug_finetune.config import FinetuneConfig
from csaug_finetune.data import (
    EncodedDataset,
    Example,
    LabelInventory,
    build_inventory,
    collate,
)
from csaug_finetune.errors import ResourceError
from csaug_finetune.metrics import intent_accuracy, span_f1
from csaug_finetune.modeling import (
    JointBertModel,
    freeze_layers,
    joint_loss,
    load_backbone,
    load_checkpoint,
    load_tokenizer,
    save_checkpoint,
)


@dataclass(frozen=True)
class FinetuneResult:
    best_epoch: int
    best_metric: float
    epochs_run: int
    stopped_early: bool
    checkpoint_path: Path
    metrics_path: Path
    records: tuple[dict, ...]


def evaluate(model: JointBertModel, dataset: EncodedDataset,
             batch_size: int = 32) -> dict[str, float]:
    """Dev metrics: intent accuracy plus span precision/recall/F1."""
    loader = DataLoader(dataset, batch_size=batch_size, collate_fn=collate)
    inventory = dataset.inventory
    gold_intents: list[str] = []
    pred_intents: list[str] = []
    gold_labels: list[Sequence[str]] = []
    pred_labels: list[list[str]] = []
    model.eval()
    with torch.no_grad():
        for batch in loader:
            intent_logits, slot_logits = model(batch["input_ids"], batch["attention_mask"])
            intent_choice = intent_logits.argmax(dim=-1)
            slot_choice = slot_logits.argmax(dim=-1)
            for row, idx in enumerate(batch["index"].tolist()):
                enc = dataset.encoded[idx]
                gold_intents.append(enc.intent)
                pred_intents.append(inventory.intents[intent_choice[row].item()])
                gold_labels.append(enc.kept_labels)
                pred_labels.append(
                    [inventory.slots[slot_choice[row, pos].item()]
                     for pos in enc.first_subword_positions]
                )
    spans = span_f1(gold_labels, pred_labels)
    return {
        "intent_accuracy": intent_accuracy(gold_intents, pred_intents),
        "slot_precision": spans["precision"],
        "slot_recall": spans["recall"],
        "slot_f1": spans["f1"],
    }


def finetune(config: FinetuneConfig, train: Sequence[Example], dev: Sequence[Example],
             out_dir: str | Path, log=None) -> FinetuneResult:
    """Train on ``train``, select on ``dev``, write the run directory."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "metrics.jsonl").write_text("", encoding="utf-8")
    except OSError as exc:
        raise ResourceError(f"cannot write to output dir {out}: {exc}") from exc

    bert, tokenizer = load_backbone(config.base_model)
    depth = len(bert.encoder.layer)
    if config.frozen_layers > depth:
        raise ResourceError(
            f"cannot freeze {config.frozen_layers} layers: "
            f"the backbone has only {depth}"
        )

    inventory = build_inventory(train)
    train_set = EncodedDataset(train, tokenizer, inventory, config.max_length)
    dev_set = EncodedDataset(dev, tokenizer, inventory, config.max_length)
    tokenizer.save_pretrained(out / "tokenizer")

    torch.manual_seed(config.seed)
    model = JointBertModel(bert, len(inventory.intents), len(inventory.slots))
    freeze_layers(model, config.frozen_layers)
    optimizer = torch.optim.Adam(
        (p for p in model.parameters() if p.requires_grad), lr=config.learning_rate
    )
    loader = DataLoader(
        train_set,
        batch_size=config.batch_size,
        shuffle=True,
        generator=torch.Generator().manual_seed(config.seed),
        num_workers=config.num_workers,
        collate_fn=collate,
    )

    metrics_path = out / "metrics.jsonl"
    checkpoint_path = out / "best.pt"
    records: list[dict] = []

    def emit(record: dict) -> None:
        with metrics_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")

    emit({"event": "start", "config": config.to_dict(),
          "train_size": len(train), "dev_size": len(dev),
          "intents": len(inventory.intents), "slots": len(inventory.slots)})

    metric_key = "intent_accuracy" if config.selection == "intent" else "slot_f1"
    best_metric = float("-inf")
    best_epoch = 0
    stale = 0
    stopped_early = False
    epochs_run = 0

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        sums = {"loss": 0.0, "intent_loss": 0.0, "slot_loss": 0.0}
        batches = 0
        for batch in loader:
            optimizer.zero_grad()
            intent_logits, slot_logits = model(batch["input_ids"], batch["attention_mask"])
            loss, loss_i, loss_s = joint_loss(
                config.alpha, config.beta,
                intent_logits, batch["intent_ids"], slot_logits, batch["slot_ids"],
            )
            loss.backward()
            optimizer.step()
            sums["loss"] += loss.item()
            sums["intent_loss"] += loss_i.item()
            sums["slot_loss"] += loss_s.item()
            batches += 1

        dev_metrics = evaluate(model, dev_set, config.batch_size)
        record = {
            "event": "epoch",
            "epoch": epoch,
            "train_loss": sums["loss"] / batches,
            "train_intent_loss": sums["intent_loss"] / batches,
            "train_slot_loss": sums["slot_loss"] / batches,
            "dev_intent_accuracy": dev_metrics["intent_accuracy"],
            "dev_slot_precision": dev_metrics["slot_precision"],
            "dev_slot_recall": dev_metrics["slot_recall"],
            "dev_slot_f1": dev_metrics["slot_f1"],
        }
        records.append(record)
        emit(record)
        epochs_run = epoch
        if log is not None:
            print(
                f"epoch {epoch}: loss {record['train_loss']:.4f} "
                f"dev intent acc {record['dev_intent_accuracy']:.4f} "
                f"dev slot f1 {record['dev_slot_f1']:.4f}",
                file=log,
            )

        value = dev_metrics[metric_key]
        if value > best_metric:
            best_metric = value
            best_epoch = epoch
            stale = 0
            save_checkpoint(
                checkpoint_path, model, config.to_dict(), inventory, epoch, value
            )
        else:
            stale += 1
            if stale >= config.patience:
                stopped_early = True
                break

    emit({"event": "end", "best_epoch": best_epoch, "best_metric": best_metric,
          "selection": config.selection, "epochs_run": epochs_run,
          "stopped_early": stopped_early})
    return FinetuneResult(
        best_epoch=best_epoch,
        best_metric=best_metric,
        epochs_run=epochs_run,
        stopped_early=stopped_early,
        checkpoint_path=checkpoint_path,
        metrics_path=metrics_path,
        records=tuple(records),
    )


def evaluate_checkpoint(run_dir: str | Path, examples: Sequence[Example],
                        batch_size: int = 32) -> dict[str, float]:
    """Score a finished run's best checkpoint on a multiatis-tsv dataset."""
    run = Path(run_dir)
    model, payload = load_checkpoint(run / "best.pt")
    tokenizer = load_tokenizer(run / "tokenizer")
    inventory = LabelInventory(tuple(payload["intents"]), tuple(payload["slots"]))
    dataset = EncodedDataset(
        examples, tokenizer, inventory, payload["config"]["max_length"]
    )
    return evaluate(model, dataset, batch_size)
