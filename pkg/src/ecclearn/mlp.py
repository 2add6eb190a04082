"""Small multilayer perceptron with hand-written backprop and Adam.

All math is float64. Hidden layers use tanh; the output layer is
sigmoid, softmax, or identity. Forward returns a cache that backward
consumes, and gradients are exact, which the test suite verifies with
central finite differences.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

OUTPUT_ACTIVATIONS = ("sigmoid", "softmax", "identity")

_CKPT_MAGIC = b"MLPC"
_CKPT_VERSION = 1


@dataclass
class MlpParams:
    layer_sizes: tuple
    weights: list
    biases: list
    output_activation: str = "identity"

    @classmethod
    def init(cls, layer_sizes, output_activation: str = "identity",
             seed: int = 0) -> "MlpParams":
        """Seeded uniform(-a, a) init with a = sqrt(6 / (fan_in + fan_out))."""
        if output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"unknown output activation {output_activation!r}")
        sizes = tuple(int(s) for s in layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError("layer_sizes needs >= 2 positive entries")
        rng = np.random.default_rng(seed)
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            a = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-a, a, size=(fan_in, fan_out)))
            biases.append(np.zeros(fan_out))
        return cls(sizes, weights, biases, output_activation)

    def copy(self) -> "MlpParams":
        return MlpParams(self.layer_sizes, [w.copy() for w in self.weights],
                         [b.copy() for b in self.biases], self.output_activation)

    def flatten(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def assign_flat(self, flat: np.ndarray) -> None:
        pos = 0
        for w, b in zip(self.weights, self.biases):
            w[...] = flat[pos:pos + w.size].reshape(w.shape)
            pos += w.size
            b[...] = flat[pos:pos + b.size]
            pos += b.size
        if pos != flat.size:
            raise ValueError("flat vector size mismatch")


def _softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - z.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def mlp_forward(params: MlpParams, x: np.ndarray):
    """Returns (y, cache); x is (B, in) or (in,)."""
    x = np.asarray(x, dtype=np.float64)
    squeeze = x.ndim == 1
    h = np.atleast_2d(x)
    if h.shape[1] != params.layer_sizes[0]:
        raise ValueError(f"input width {h.shape[1]} != {params.layer_sizes[0]}")
    acts = [h]
    n_layers = len(params.weights)
    for i, (w, b) in enumerate(zip(params.weights, params.biases)):
        z = h @ w + b
        if i < n_layers - 1:
            h = np.tanh(z)
        elif params.output_activation == "sigmoid":
            h = 1.0 / (1.0 + np.exp(-z))
        elif params.output_activation == "softmax":
            h = _softmax(z)
        else:
            h = z
        acts.append(h)
    cache = (acts, squeeze)
    y = h[0] if squeeze else h
    return y, cache


def mlp_backward(params: MlpParams, cache, dy: np.ndarray):
    """Exact parameter gradients for upstream gradient dy = dL/dy.

    Returns (weight_grads, bias_grads) shaped like params.
    """
    acts, squeeze = cache
    dy = np.asarray(dy, dtype=np.float64)
    if squeeze:
        dy = dy[None, :]
    if dy.shape != acts[-1].shape:
        raise ValueError("upstream gradient shape does not match the forward pass")
    y = acts[-1]
    if params.output_activation == "sigmoid":
        delta = dy * y * (1.0 - y)
    elif params.output_activation == "softmax":
        delta = y * (dy - (dy * y).sum(axis=-1, keepdims=True))
    else:
        delta = dy.copy()
    w_grads = [None] * len(params.weights)
    b_grads = [None] * len(params.biases)
    for i in range(len(params.weights) - 1, -1, -1):
        h_in = acts[i]
        w_grads[i] = h_in.T @ delta
        b_grads[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ params.weights[i].T) * (1.0 - acts[i] * acts[i])
    return w_grads, b_grads


@dataclass
class AdamState:
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m_w: list = field(default_factory=list)
    v_w: list = field(default_factory=list)
    m_b: list = field(default_factory=list)
    v_b: list = field(default_factory=list)

    @classmethod
    def init(cls, params: MlpParams, learning_rate: float, beta1: float = 0.9,
             beta2: float = 0.999, eps: float = 1e-8) -> "AdamState":
        st = cls(learning_rate, beta1, beta2, eps)
        st.m_w = [np.zeros_like(w) for w in params.weights]
        st.v_w = [np.zeros_like(w) for w in params.weights]
        st.m_b = [np.zeros_like(b) for b in params.biases]
        st.v_b = [np.zeros_like(b) for b in params.biases]
        return st


def adam_step(params: MlpParams, grads, state: AdamState) -> None:
    """One bias-corrected Adam descent step, in place.

    Rejects non-finite gradients without touching parameters or state.
    """
    w_grads, b_grads = grads
    for g in (*w_grads, *b_grads):
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite gradient; step rejected")
    state.step += 1
    c1 = 1.0 - state.beta1 ** state.step
    c2 = 1.0 - state.beta2 ** state.step
    for ms, vs, gs, ps in ((state.m_w, state.v_w, w_grads, params.weights),
                           (state.m_b, state.v_b, b_grads, params.biases)):
        for m, v, g, p in zip(ms, vs, gs, ps):
            m *= state.beta1
            m += (1.0 - state.beta1) * g
            v *= state.beta2
            v += (1.0 - state.beta2) * (g * g)
            p -= state.learning_rate * (m / c1) / (np.sqrt(v / c2) + state.eps)


def save_checkpoint(path, params: MlpParams) -> None:
    """Binary checkpoint: magic, version, sizes, activation, float64 LE data."""
    act_code = OUTPUT_ACTIVATIONS.index(params.output_activation)
    with open(path, "wb") as fh:
        fh.write(_CKPT_MAGIC)
        fh.write(struct.pack("<HHI", _CKPT_VERSION, act_code,
                             len(params.layer_sizes)))
        fh.write(struct.pack(f"<{len(params.layer_sizes)}I", *params.layer_sizes))
        fh.write(params.flatten().astype("<f8").tobytes())


def load_checkpoint(path) -> MlpParams:
    with open(path, "rb") as fh:
        if fh.read(4) != _CKPT_MAGIC:
            raise ValueError(f"{path}: not a checkpoint file")
        version, act_code, n_sizes = struct.unpack("<HHI", fh.read(8))
        if version != _CKPT_VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        sizes = struct.unpack(f"<{n_sizes}I", fh.read(4 * n_sizes))
        params = MlpParams.init(sizes, OUTPUT_ACTIVATIONS[act_code], seed=0)
        flat = np.frombuffer(fh.read(), dtype="<f8")
        params.assign_flat(flat.astype(np.float64))
    return params
