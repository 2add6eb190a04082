import numpy as np
import pytest

from ecclearn import channel, linear, polar


def all_messages(k: int) -> np.ndarray:
    """All 2^k bit patterns as a (2^k, k) uint8 array."""
    return ((np.arange(1 << k)[:, None] >> np.arange(k)) & 1).astype(np.uint8)


def ml_decode_codebook(cw_all: np.ndarray, llrs: np.ndarray) -> np.ndarray:
    """Row indices of the max-correlation codewords for each LLR frame."""
    return np.argmax(llrs @ (1.0 - 2.0 * cw_all.astype(np.float64)).T, axis=1)


def polar_frames(code: polar.PolarCode, esn0_db: float, n_frames: int,
                 bit_seed: int, noise_seed: int):
    """Random info bits, their codewords, and noisy channel LLRs."""
    bits = channel.frame_bits(bit_seed, 0, n_frames, code.k)
    cw = polar.polar_encode_batch(code, bits)
    spec = channel.ChannelSpec(esn0_db, noise_seed)
    llrs = channel.transmit_awgn_batch(channel.modulate_bpsk(cw), spec, 0)
    return bits, cw, llrs


def linear_frames(code: linear.LinearCode, esn0_db: float, n_frames: int,
                  bit_seed: int, noise_seed: int):
    bits = channel.frame_bits(bit_seed, 0, n_frames, code.k)
    cw = linear.encode_batch(code, bits)
    spec = channel.ChannelSpec(esn0_db, noise_seed)
    llrs = channel.transmit_awgn_batch(channel.modulate_bpsk(cw), spec, 0)
    return bits, cw, llrs


@pytest.fixture
def rng():
    return np.random.default_rng(20240131)


def finite_difference_gradient(loss_fn, params, step: float = 1e-5) -> np.ndarray:
    """Central differences of a scalar loss over flattened parameters."""
    flat = params.flatten()
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        bumped = flat.copy()
        bumped[i] += step
        params.assign_flat(bumped)
        up = loss_fn()
        bumped[i] -= 2 * step
        params.assign_flat(bumped)
        down = loss_fn()
        grad[i] = (up - down) / (2 * step)
    params.assign_flat(flat)
    return grad


def pack_grads(grads) -> np.ndarray:
    w_grads, b_grads = grads
    parts = []
    for w, b in zip(w_grads, b_grads):
        parts.append(w.ravel())
        parts.append(b.ravel())
    return np.concatenate(parts)
