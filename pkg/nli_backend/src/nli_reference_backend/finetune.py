"""Fine-tune a sequence-classification checkpoint on entailment pairs.

Training data is line-delimited JSON ({premise, hypothesis, label} with
label in {entailment, neutral, contradiction}); the validation split is
the final slice of the file (495 pairs by default), keeping file order.
After the configured number of epochs the checkpoint of the epoch with
the lowest validation loss is kept.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

LABELS = ("entailment", "neutral", "contradiction")

# Validation loss of the original fine-tuning run this backend mirrors;
# logged next to new runs for comparison, never asserted.
REFERENCE_VALIDATION_LOSS = 0.41114

DEFAULT_VALIDATION_SIZE = 495


class TrainingError(ValueError):
    pass


@dataclass
class FinetuneConfig:
    train_file: Path
    output_dir: Path
    base_model: str = "GroNLP/bert-base-dutch-cased"
    num_train_epochs: int = 20
    per_device_train_batch_size: int = 16
    per_device_eval_batch_size: int = 64
    warmup_steps: int = 250
    weight_decay: float = 0.01
    validation_size: int = DEFAULT_VALIDATION_SIZE
    device: str = "cpu"


def load_pairs(path: str | Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise TrainingError(f"training file not found: {path}")
    pairs = []
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            for field in ("premise", "hypothesis", "label"):
                if field not in record:
                    raise TrainingError(f"{path}:{lineno}: missing field {field!r}")
            if record["label"] not in LABELS:
                raise TrainingError(f"{path}:{lineno}: unknown label {record['label']!r}")
            pairs.append(record)
    if not pairs:
        raise TrainingError(f"{path}: no training pairs")
    return pairs


def split_train_validation(pairs: list[dict], validation_size: int = DEFAULT_VALIDATION_SIZE):
    """Final ``validation_size`` pairs (file order) become the validation set."""
    if validation_size <= 0 or validation_size >= len(pairs):
        raise TrainingError(
            f"validation size {validation_size} incompatible with {len(pairs)} pairs"
        )
    return pairs[:-validation_size], pairs[-validation_size:]


def select_best_epoch(validation_losses: list[float]) -> int:
    """Index of the epoch with the lowest validation loss."""
    if not validation_losses:
        raise TrainingError("no validation losses recorded")
    for epoch, loss in enumerate(validation_losses):
        if not math.isfinite(loss):
            raise TrainingError(f"validation loss diverged at epoch {epoch}: {loss}")
    return min(range(len(validation_losses)), key=validation_losses.__getitem__)


def finetune(config: FinetuneConfig) -> Path:
    """Run the fine-tuning loop; returns the selected checkpoint directory."""
    pairs = load_pairs(config.train_file)
    train_pairs, val_pairs = split_train_validation(pairs, config.validation_size)

    try:
        import torch
        from transformers import (
            AutoModelForSequenceClassification,
            AutoTokenizer,
            Trainer,
            TrainingArguments,
        )
    except ImportError as exc:
        raise TrainingError(
            "transformers/torch are not installed; install the 'model' extra"
        ) from exc

    tokenizer = AutoTokenizer.from_pretrained(config.base_model)
    model = AutoModelForSequenceClassification.from_pretrained(
        config.base_model, num_labels=len(LABELS)
    )

    label_index = {label: i for i, label in enumerate(LABELS)}

    class PairDataset(torch.utils.data.Dataset):
        def __init__(self, rows):
            self.rows = rows

        def __len__(self):
            return len(self.rows)

        def __getitem__(self, i):
            row = self.rows[i]
            encoded = tokenizer(
                row["premise"],
                row["hypothesis"],
                truncation=True,
                max_length=512,
                padding="max_length",
            )
            encoded["labels"] = label_index[row["label"]]
            return {k: torch.tensor(v) for k, v in encoded.items()}

    arguments = TrainingArguments(
        output_dir=str(config.output_dir),
        num_train_epochs=config.num_train_epochs,
        per_device_train_batch_size=config.per_device_train_batch_size,
        per_device_eval_batch_size=config.per_device_eval_batch_size,
        warmup_steps=config.warmup_steps,
        weight_decay=config.weight_decay,
        eval_strategy="epoch",
        save_strategy="epoch",
        logging_strategy="epoch",
    )
    trainer = Trainer(
        model=model,
        args=arguments,
        train_dataset=PairDataset(train_pairs),
        eval_dataset=PairDataset(val_pairs),
    )
    trainer.train()

    losses = [
        entry["eval_loss"] for entry in trainer.state.log_history if "eval_loss" in entry
    ]
    best = select_best_epoch(losses)
    print(
        f"validation losses per epoch: {losses}\n"
        f"selected epoch {best} (loss {losses[best]:.5f}; reference run: "
        f"{REFERENCE_VALIDATION_LOSS})"
    )
    checkpoints = sorted(
        Path(config.output_dir).glob("checkpoint-*"), key=lambda p: int(p.name.split("-")[1])
    )
    return checkpoints[best]
