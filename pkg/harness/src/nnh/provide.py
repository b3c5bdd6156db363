"""The provider side of the embedding-record protocol.

Reads a request file (one canonical-format sentence per line) and writes a
record file with one vector per (token, layer). Two context-free modes:

* mock: each token's vector is derived from a hash of the token, salted
  per layer, so identical tokens always get identical vectors;
* static: vectors come from a word2vec-style text file, identical across
  the three layers (out-of-vocabulary tokens fall back to mock vectors
  and are counted on stderr).
"""

from __future__ import annotations

import sys
from hashlib import blake2b
from pathlib import Path

import numpy as np

from .formats import LAYERS, Record, read_static_vectors, write_records


def mock_vector(token: str, layer: str, dim: int = 32) -> np.ndarray:
    # blake2b digests cap at 64 bytes (16 components), so wider vectors
    # chain blocks with a counter in the hash input
    values = np.empty(dim, dtype=np.float64)
    produced = 0
    block = 0
    while produced < dim:
        need = min(16, dim - produced)
        raw = blake2b(
            f"{layer}|{block}|{token}".encode("utf-8"), digest_size=4 * need
        ).digest()
        ints = np.frombuffer(raw, dtype="<u4")
        values[produced : produced + need] = ints.astype(np.float64) / 2.0**31 - 1.0
        produced += need
        block += 1
    return values


def provide_embeddings(
    embed_in: str | Path,
    embed_out: str | Path,
    mode: str = "mock",
    dim: int = 32,
    static_path: str | Path | None = None,
) -> int:
    """Embed every token of every request sentence; returns record count."""
    if mode not in ("mock", "static"):
        raise ValueError(f"unknown provider mode {mode!r}")
    static = None
    if mode == "static":
        if static_path is None:
            raise ValueError("static mode needs a vector file")
        static = read_static_vectors(static_path)
        dim = len(next(iter(static.values())))
    sentences = Path(embed_in).read_text(encoding="utf-8").splitlines()
    oov = 0

    def records():
        nonlocal oov
        for si, sentence in enumerate(sentences, start=1):
            for pos, token in enumerate(sentence.split()):
                for layer in LAYERS:
                    if static is not None:
                        vec = static.get(token)
                        if vec is None:
                            oov += 1
                            vec = mock_vector(token, layer, dim)
                    else:
                        vec = mock_vector(token, layer, dim)
                    yield Record(str(si), pos, token, layer, vec)

    count = write_records(records(), embed_out)
    if oov:
        print(f"warning: {oov} out-of-vocabulary records got fallback vectors", file=sys.stderr)
    return count
