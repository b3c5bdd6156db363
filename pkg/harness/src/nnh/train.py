"""Training loop: seeded, padded-and-masked batches, inverse-time LR decay."""

from __future__ import annotations

import json
import random
from pathlib import Path

import numpy as np
import torch
from torch import nn

from .data import align_labels, assemble_features
from .formats import LABELS
from .model import Tagger, TaggerConfig

PAD_LABEL = -100  # ignored by the loss


def _seed_everything(seed: int, deterministic: bool) -> None:
    random.seed(seed)
    np.random.seed(seed & 0xFFFFFFFF)
    torch.manual_seed(seed)
    if deterministic:
        torch.set_num_threads(1)


def _batches(order: list[int], batch_size: int):
    for start in range(0, len(order), batch_size):
        yield order[start : start + batch_size]


def _pad_batch(features, labels, indices):
    lengths = torch.tensor([features[i].shape[0] for i in indices], dtype=torch.int64)
    max_len = int(lengths.max())
    n_inputs, dim = features[indices[0]].shape[1:]
    x = torch.zeros((len(indices), max_len, n_inputs, dim), dtype=torch.float32)
    y = torch.full((len(indices), max_len), PAD_LABEL, dtype=torch.int64)
    for row, i in enumerate(indices):
        length = features[i].shape[0]
        x[row, :length] = torch.from_numpy(features[i])
        if labels is not None:
            y[row, :length] = torch.from_numpy(labels[i])
    return x, y, lengths


def train_tagger(
    records: list[str | Path],
    labeled_path: str | Path,
    config: TaggerConfig,
    artifact_path: str | Path,
    log_path: str | Path | None = None,
) -> dict:
    """Train on aligned records + labels; save the model artifact and log.

    Alignment (sentence ids, token text, contiguous positions, every
    configured layer present) is checked before any training step.
    """
    features, tokens = assemble_features(records, config.layers)
    labels = align_labels(tokens, labeled_path)
    _seed_everything(config.seed, config.deterministic)
    dim = features[0].shape[2]
    model = Tagger(dim=dim, n_inputs=len(config.layers), cells=config.cells)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    scheduler = torch.optim.lr_scheduler.LambdaLR(
        optimizer, lambda step: 1.0 / (1.0 + config.lr_decay * step)
    )
    loss_fn = nn.CrossEntropyLoss(ignore_index=PAD_LABEL)
    shuffler = random.Random(config.seed)
    epoch_losses: list[float] = []
    model.train()
    for _ in range(config.epochs):
        order = list(range(len(features)))
        shuffler.shuffle(order)
        total = 0.0
        batches = 0
        for indices in _batches(order, config.batch_size):
            x, y, lengths = _pad_batch(features, labels, indices)
            optimizer.zero_grad()
            logits = model(x, lengths)
            loss = loss_fn(logits.reshape(-1, logits.shape[-1]), y.reshape(-1))
            loss.backward()
            optimizer.step()
            scheduler.step()
            total += float(loss.detach())
            batches += 1
        epoch_losses.append(total / batches)
    payload = {
        "state_dict": model.state_dict(),
        "config": config.as_dict(),
        "dim": dim,
        "labels": list(LABELS),
    }
    torch.save(payload, artifact_path)
    log = {
        "config": config.as_dict(),
        "epoch_losses": epoch_losses,
        "sentences": len(features),
        "artifact": str(artifact_path),
    }
    if log_path is not None:
        Path(log_path).write_text(
            json.dumps(log, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return log


def load_tagger(artifact_path: str | Path) -> tuple[Tagger, TaggerConfig, int]:
    payload = torch.load(artifact_path, map_location="cpu", weights_only=False)
    raw = dict(payload["config"])
    raw["layers"] = tuple(raw["layers"])
    config = TaggerConfig(**raw)
    model = Tagger(dim=payload["dim"], n_inputs=len(config.layers), cells=config.cells)
    model.load_state_dict(payload["state_dict"])
    model.eval()
    return model, config, payload["dim"]
