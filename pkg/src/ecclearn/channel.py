"""BPSK over AWGN with frame-indexed, counter-based noise substreams.

Every random value consumed by a simulation is addressed by
(seed, frame_index, position): frame substreams are disjoint counter
ranges of a Philox stream, so frames can be generated in any order, in
any batch decomposition, on any number of workers, with bit-identical
results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox
from scipy.special import ndtri

_TINY = 2.0 ** -54  # keeps inverse-CDF inputs strictly inside (0, 1)


def derive_seed(seed: int, label) -> int:
    """Stable 64-bit child seed for a labeled substream."""
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def frame_uniforms(seed: int, frame_start: int, n_frames: int, n_values: int) -> np.ndarray:
    """Uniform (0,1) values for frames [frame_start, frame_start + n_frames).

    Row i depends only on (seed, frame_start + i, n_values). Each frame
    owns a block-aligned slice of the Philox counter space.
    """
    if n_frames <= 0:
        return np.empty((0, n_values))
    words_per_frame = 4 * (-(-n_values // 4))
    bg = Philox(key=seed, counter=frame_start * (words_per_frame // 4))
    u = Generator(bg).random(n_frames * words_per_frame)
    return u.reshape(n_frames, words_per_frame)[:, :n_values]


def frame_gauss(seed: int, frame_start: int, n_frames: int, n_values: int) -> np.ndarray:
    """Standard normal samples, frame-addressed like frame_uniforms."""
    return ndtri(frame_uniforms(seed, frame_start, n_frames, n_values) + _TINY)


def frame_bits(seed: int, frame_start: int, n_frames: int, n_bits: int) -> np.ndarray:
    """Fair random bits, frame-addressed like frame_uniforms."""
    return (frame_uniforms(seed, frame_start, n_frames, n_bits) < 0.5).astype(np.uint8)


def esn0_to_sigma(esn0_db: float) -> float:
    """Per-dimension noise standard deviation for a symbol SNR in dB."""
    if not np.isfinite(esn0_db):
        raise ValueError("esn0_db must be finite")
    return float(np.sqrt(0.5 * 10.0 ** (-esn0_db / 10.0)))


@dataclass(frozen=True)
class ChannelSpec:
    """AWGN channel operating point: symbol SNR in dB plus a noise seed."""

    esn0_db: float
    seed: int

    def __post_init__(self):
        if not np.isfinite(self.esn0_db):
            raise ValueError("esn0_db must be finite")

    @property
    def sigma(self) -> float:
        return esn0_to_sigma(self.esn0_db)


def modulate_bpsk(bits) -> np.ndarray:
    """Map bit 0 to +1.0 and bit 1 to -1.0, elementwise."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def transmit_awgn_batch(x: np.ndarray, spec: ChannelSpec, frame_start: int) -> np.ndarray:
    """Add per-frame AWGN to (B, N) symbols and return (B, N) channel LLRs.

    Row i uses the substream of frame index frame_start + i. Positive LLR
    means bit 0 is more likely.
    """
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    b, n = x.shape
    sigma = spec.sigma
    noise = frame_gauss(spec.seed, frame_start, b, n)
    y = x + sigma * noise
    return (2.0 / (sigma * sigma)) * y


def transmit_awgn(x, spec: ChannelSpec, frame_index: int) -> np.ndarray:
    """Single-frame counterpart of transmit_awgn_batch."""
    x = np.asarray(x, dtype=np.float64)
    return transmit_awgn_batch(x[None, :], spec, frame_index)[0]
