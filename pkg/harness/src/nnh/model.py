"""Sequence tagger: learned input averaging, two BiLSTM layers, softmax."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence

from .formats import LABELS, LAYERS
from .mix import ScalarMix


@dataclass
class TaggerConfig:
    cells: int = 2048  # LSTM cells per direction, per layer
    epochs: int = 10
    learning_rate: float = 1e-4
    lr_decay: float = 1e-5  # per-update inverse-time decay
    batch_size: int = 32
    layers: tuple[str, ...] = tuple(LAYERS)  # single entry = single-input variant
    seed: int = 0
    deterministic: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if isinstance(self.layers, list):
            self.layers = tuple(self.layers)
        unknown = [l for l in self.layers if l not in LAYERS]
        if unknown or not self.layers:
            raise ValueError(f"layers must be a non-empty subset of {LAYERS}")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["layers"] = list(self.layers)
        return d


class Tagger(nn.Module):
    def __init__(self, dim: int, n_inputs: int, cells: int, classes: int = len(LABELS)):
        super().__init__()
        self.mix = ScalarMix(n_inputs) if n_inputs > 1 else None
        self.lstm1 = nn.LSTM(dim, cells, batch_first=True, bidirectional=True)
        self.lstm2 = nn.LSTM(2 * cells, cells, batch_first=True, bidirectional=True)
        self.out = nn.Linear(2 * cells, classes)

    def forward(self, x: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        # x: (batch, time, n_inputs, dim) padded; returns (batch, time, classes)
        mixed = self.mix(x) if self.mix is not None else x.squeeze(2)
        packed = pack_padded_sequence(
            mixed, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        hidden, _ = self.lstm1(packed)
        hidden, _ = self.lstm2(hidden)
        padded, _ = pad_packed_sequence(hidden, batch_first=True, total_length=x.shape[1])
        return self.out(padded)
