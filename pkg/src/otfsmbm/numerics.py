"""Complex linear-algebra helpers and reproducible random streams.

Everything here is deterministic: random draws are a pure function of
(master_seed, stream_id, call sequence), which is what makes sweep results
independent of the worker count.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


def dft_matrix(n: int) -> np.ndarray:
    """Unitary n-point DFT matrix with entry (a, b) = exp(-2j*pi*a*b/n)/sqrt(n)."""
    if n < 1:
        raise ValueError(f"DFT size must be >= 1, got {n}")
    idx = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; empty operands are rejected."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.size == 0 or b.size == 0:
        raise ValueError("kron operands must be non-empty")
    return np.kron(a, b)


def derive_stream_id(*parts) -> int:
    """Fold labels (trial index, purpose tag, ...) into a stable 64-bit id.

    Uses blake2b rather than hash() so ids do not depend on PYTHONHASHSEED
    or the process.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(repr(part).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


@dataclass
class RngStream:
    """A seeded random stream; (master_seed, stream_id) fixes every draw."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        seq = np.random.SeedSequence(
            [self.master_seed & _MASK64, self.stream_id & _MASK64]
        )
        self._rng = np.random.default_rng(seq)

    @property
    def generator(self) -> np.random.Generator:
        return self._rng


def cn_sample(stream: RngStream, n: int, variance: float) -> np.ndarray:
    """n i.i.d. circularly-symmetric complex Gaussian draws with the given
    total per-sample variance (variance/2 on each of the real and imaginary
    parts)."""
    if variance < 0:
        raise ValueError(f"variance must be >= 0, got {variance}")
    rng = stream.generator
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
