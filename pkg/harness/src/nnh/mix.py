"""Learned averaging of multiple embedding inputs (softmax-weighted sum)."""

from __future__ import annotations

from typing import Sequence

import numpy as np
import torch
from torch import nn


def softmax_weights(logits: Sequence[float]) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def scalar_mix(vectors: Sequence[np.ndarray], logits: Sequence[float]) -> np.ndarray:
    """Softmax(logits)-weighted sum of equal-dimension vectors."""
    if len(vectors) != len(logits):
        raise ValueError(f"{len(vectors)} vectors but {len(logits)} logits")
    dims = {np.asarray(v).shape for v in vectors}
    if len(dims) != 1:
        raise ValueError(f"input dimensions differ: {sorted(dims)}")
    weights = softmax_weights(logits)
    out = np.zeros(next(iter(dims)), dtype=np.float64)
    for w, v in zip(weights, vectors):
        out += w * np.asarray(v, dtype=np.float64)
    return out


class ScalarMix(nn.Module):
    """Trainable version: weights are learned during tagger training."""

    def __init__(self, n_inputs: int):
        super().__init__()
        self.logits = nn.Parameter(torch.zeros(n_inputs))

    def weights(self) -> torch.Tensor:
        return torch.softmax(self.logits, dim=0)

    def forward(self, stacked: torch.Tensor) -> torch.Tensor:
        # stacked: (batch, time, n_inputs, dim)
        return torch.einsum("btnd,n->btd", stacked, self.weights())
