"""Bit-to-frame mapping for the three transmission schemes.

A frame carries NM grid points on an N x M delay-Doppler grid (Doppler index
k is the outer/row axis, delay index l the inner/column axis; grid point i,
1-based, sits at k = (i-1) // M, l = (i-1) % M).  Each grid point carries one
QAM symbol plus, depending on the scheme, an active-branch index: a mirror
activation pattern (OTFS-MBM), a transmit antenna (OTFS-SM), or nothing
(plain OTFS).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Scheme(Enum):
    OTFS = "otfs"
    OTFS_SM = "otfs-sm"
    OTFS_MBM = "otfs-mbm"

    @classmethod
    def parse(cls, text: str) -> "Scheme":
        try:
            return cls(text.strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise ValueError(f"unknown scheme {text!r}; expected one of {names}")


def _is_pow2(x: int) -> bool:
    return x >= 1 and (x & (x - 1)) == 0


@dataclass(frozen=True)
class FrameParams:
    """Static configuration of one scheme instance.

    n_doppler/n_delay are the DD grid dimensions (N, M); mod_order is the QAM
    order M_q; n_mirrors (n_RF) applies to OTFS-MBM only and n_tx (N_T) to
    OTFS-SM only; n_rx (N_R) is the receive antenna count.
    """

    scheme: Scheme
    n_doppler: int
    n_delay: int
    mod_order: int
    n_mirrors: int = 0
    n_tx: int = 1
    n_rx: int = 1

    def __post_init__(self):
        if self.n_doppler < 1 or self.n_delay < 1:
            raise ValueError("N and M must be >= 1")
        if self.mod_order < 4 or not _is_pow2(self.mod_order):
            raise ValueError(
                "M_q must be a power of two >= 4 (Gray QAM needs a "
                "power-of-two level count per rail)"
            )
        if self.n_rx < 1:
            raise ValueError("N_R must be >= 1")
        if self.scheme is Scheme.OTFS_MBM:
            if self.n_mirrors < 1:
                raise ValueError("n_RF must be >= 1 for otfs-mbm")
            if self.n_tx != 1:
                raise ValueError("N_T applies only to otfs-sm (must stay 1)")
        elif self.scheme is Scheme.OTFS_SM:
            if self.n_tx < 2 or not _is_pow2(self.n_tx):
                raise ValueError("N_T must be a power of two >= 2 for otfs-sm")
            if self.n_mirrors != 0:
                raise ValueError("n_RF applies only to otfs-mbm (must stay 0)")
        else:
            if self.n_mirrors != 0 or self.n_tx != 1:
                raise ValueError("plain otfs takes neither n_RF nor N_T")

    @property
    def grid_size(self) -> int:
        return self.n_doppler * self.n_delay

    @property
    def branches(self) -> int:
        """Active-index alphabet size per grid point."""
        if self.scheme is Scheme.OTFS_MBM:
            return 1 << self.n_mirrors
        if self.scheme is Scheme.OTFS_SM:
            return self.n_tx
        return 1

    @property
    def index_bits(self) -> int:
        return self.branches.bit_length() - 1

    @property
    def symbol_bits(self) -> int:
        return self.mod_order.bit_length() - 1

    @property
    def bits_per_grid(self) -> int:
        return self.index_bits + self.symbol_bits

    @property
    def bits_per_frame(self) -> int:
        return self.grid_size * self.bits_per_grid


@dataclass(frozen=True)
class Constellation:
    """QAM alphabet in label order: points[v] is the symbol whose bit label
    is the MSB-first binary expansion of v."""

    order: int
    points: np.ndarray
    normalization: str

    @property
    def mean_energy(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))


def _gray_to_binary(g: np.ndarray) -> np.ndarray:
    b = g.copy()
    shift = 1
    while (b >> shift).any():
        b ^= b >> shift
        shift <<= 1
    return b ^ (b >> 1) if False else b  # pragma: no cover


def _gray_decode(g: np.ndarray) -> np.ndarray:
    """Inverse binary-reflected Gray code."""
    b = g.copy()
    shift = 1
    while True:
        shifted = b >> shift
        if not shifted.any():
            break
        b = b ^ shifted
        shift <<= 1
    return b


@functools.lru_cache(maxsize=None)
def qam_constellation(order: int, normalization: str = "unit-energy") -> Constellation:
    """Gray-coded rectangular QAM.

    The label of a point is its symbol-bit group read MSB-first; the first
    half of the bits Gray-select the in-phase level (ascending), the second
    half the quadrature level (descending).  For order 4 this reproduces the
    raw alphabet labeling 00 -> -1+j, 01 -> -1-j, 10 -> 1+j, 11 -> 1-j.
    Non-square orders (8, 32, ...) use a rectangular grid.
    """
    if order < 4 or not _is_pow2(order):
        raise ValueError(
            "M_q must be a power of two >= 4 (Gray QAM needs a "
            "power-of-two level count per rail)"
        )
    if normalization not in ("unit-energy", "raw"):
        raise ValueError(f"unknown normalization {normalization!r}")
    k = order.bit_length() - 1
    ki = (k + 1) // 2
    kq = k - ki
    li, lq = 1 << ki, 1 << kq
    labels = np.arange(order)
    vi = labels >> kq
    vq = labels & (lq - 1)
    i_levels = 2 * _gray_decode(vi) - (li - 1)
    q_levels = (lq - 1) - 2 * _gray_decode(vq)
    points = i_levels + 1j * q_levels
    if normalization == "unit-energy":
        es = (li**2 - 1) / 3.0 + (lq**2 - 1) / 3.0
        points = points / np.sqrt(es)
    points.flags.writeable = False
    return Constellation(order=order, points=points, normalization=normalization)


@dataclass(frozen=True)
class GridChoice:
    """Per-grid decision: 1-based symbol label index and active-branch index."""

    symbol_index: int
    branch_index: int


@dataclass(frozen=True)
class DDFrame:
    """Assembled transmission structure for one frame.

    s_matrix has one column per grid point with a single nonzero at row
    branch_index-1; s_star stacks the columns vertically (grid-major, branch
    within grid).
    """

    choices: tuple
    s_matrix: np.ndarray
    s_star: np.ndarray


def _bits_to_int(bits: np.ndarray) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def _int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - i)) & 1 for i in range(width)], dtype=np.int8)


def segment_bits(bits, params: FrameParams) -> list:
    """Split a frame's bit vector into NM per-grid chunks (grid order)."""
    bits = np.asarray(bits, dtype=np.int8).ravel()
    expected = params.bits_per_frame
    if bits.size != expected:
        raise ValueError(
            f"frame for {params.scheme.value} needs {expected} bits "
            f"({params.grid_size} grids x {params.bits_per_grid}), got {bits.size}"
        )
    per_grid = params.bits_per_grid
    return [bits[i * per_grid : (i + 1) * per_grid] for i in range(params.grid_size)]


def map_chunk(chunk, params: FrameParams, constellation: Constellation) -> GridChoice:
    """Map one per-grid chunk: leading index bits pick the active branch
    (MSB-first, +1), the remaining bits pick the QAM label the same way."""
    chunk = np.asarray(chunk, dtype=np.int8).ravel()
    if chunk.size != params.bits_per_grid:
        raise ValueError(
            f"chunk must have {params.bits_per_grid} bits, got {chunk.size}"
        )
    if constellation.order != params.mod_order:
        raise ValueError("constellation order does not match params.mod_order")
    branch = _bits_to_int(chunk[: params.index_bits]) + 1
    symbol = _bits_to_int(chunk[params.index_bits :]) + 1
    return GridChoice(symbol_index=symbol, branch_index=branch)


def assemble_frame(choices, params: FrameParams, constellation: Constellation) -> DDFrame:
    """Build the sparse transmission matrix and its stacked vector."""
    choices = tuple(choices)
    if len(choices) != params.grid_size:
        raise ValueError(f"need {params.grid_size} grid choices, got {len(choices)}")
    b = params.branches
    s = np.zeros((b, params.grid_size), dtype=complex)
    for i, choice in enumerate(choices):
        if not 1 <= choice.symbol_index <= params.mod_order:
            raise ValueError(f"symbol index {choice.symbol_index} out of range")
        if not 1 <= choice.branch_index <= b:
            raise ValueError(f"branch index {choice.branch_index} out of range")
        s[choice.branch_index - 1, i] = constellation.points[choice.symbol_index - 1]
    s_star = s.reshape(-1, order="F")
    return DDFrame(choices=choices, s_matrix=s, s_star=s_star)


def unmap_choices(choices, params: FrameParams, constellation: Constellation) -> np.ndarray:
    """Exact inverse of segment_bits + map_chunk."""
    choices = tuple(choices)
    if len(choices) != params.grid_size:
        raise ValueError(f"need {params.grid_size} grid choices, got {len(choices)}")
    if constellation.order != params.mod_order:
        raise ValueError("constellation order does not match params.mod_order")
    out = np.empty(params.bits_per_frame, dtype=np.int8)
    per_grid = params.bits_per_grid
    for i, choice in enumerate(choices):
        chunk = out[i * per_grid : (i + 1) * per_grid]
        chunk[: params.index_bits] = _int_to_bits(choice.branch_index - 1, params.index_bits)
        chunk[params.index_bits :] = _int_to_bits(choice.symbol_index - 1, params.symbol_bits)
    return out


def map_bits(bits, params: FrameParams, constellation: Constellation) -> DDFrame:
    """Convenience pipeline: segment, map each chunk, assemble."""
    chunks = segment_bits(bits, params)
    choices = [map_chunk(c, params, constellation) for c in chunks]
    return assemble_frame(choices, params, constellation)
