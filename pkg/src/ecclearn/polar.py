"""Polar encoding and successive cancellation (SC / SCL) decoding.

Decoders are implemented batched over frames: arrays carry a leading
frame axis and, for list decoding, a path axis, so Monte-Carlo loops
amortize numpy dispatch over many frames. Single-frame wrappers are
provided for the one-shot API.

Path metric rule: a path pays |llr| whenever its decision disagrees
with the llr sign, else nothing. The f update is min-sum, g is
b + (1 - 2u) * a. Ties on equal path metrics break by (parent path
index, bit value 0 first), which makes results platform-independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PolarCode:
    """Block length N = 2^n and the sorted information set of size K."""

    n: int
    info_set: tuple

    def __post_init__(self):
        if self.n < 1 or self.n & (self.n - 1):
            raise ValueError(f"N={self.n} is not a power of two")
        info = tuple(sorted(int(i) for i in self.info_set))
        if len(set(info)) != len(info):
            raise ValueError("info_set has repeated indices")
        if info and (info[0] < 0 or info[-1] >= self.n):
            raise ValueError("info_set indices out of range")
        object.__setattr__(self, "info_set", info)

    @property
    def k(self) -> int:
        return len(self.info_set)

    @property
    def stages(self) -> int:
        return int(self.n).bit_length() - 1

    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.info_set)] = True
        return mask


@dataclass
class DecodePath:
    """One survivor: all N hard decisions plus its accumulated penalty."""

    decisions: np.ndarray
    path_metric: float


def polar_transform_batch(u: np.ndarray) -> np.ndarray:
    """Butterfly form of the n-fold kernel product, row-wise over (B, N)."""
    u = np.atleast_2d(np.asarray(u, dtype=np.uint8))
    b, n = u.shape
    x = u.copy()
    h = 1
    while h < n:
        v = x.reshape(b, n // (2 * h), 2, h)
        v[:, :, 0, :] ^= v[:, :, 1, :]
        h *= 2
    return x


def polar_encode_batch(code: PolarCode, info_bits: np.ndarray) -> np.ndarray:
    """Encode (B, K) information bits into (B, N) codewords."""
    info_bits = np.atleast_2d(np.asarray(info_bits, dtype=np.uint8))
    b, k = info_bits.shape
    if k != code.k:
        raise ValueError(f"expected {code.k} information bits, got {k}")
    u = np.zeros((b, code.n), dtype=np.uint8)
    u[:, list(code.info_set)] = info_bits
    return polar_transform_batch(u)


def polar_encode(code: PolarCode, info_bits) -> np.ndarray:
    return polar_encode_batch(code, np.asarray(info_bits)[None, :])[0]


def _f(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def sc_decode_batch(code: PolarCode, llrs: np.ndarray) -> np.ndarray:
    """Hard-decision SC decoding of (B, N) channel LLRs to (B, K) bits."""
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    b, n = llrs.shape
    if n != code.n:
        raise ValueError(f"frame length {n} != N {code.n}")
    is_info = code.info_mask()

    def rec(llr, lo):
        m = llr.shape[1]
        if m == 1:
            if is_info[lo]:
                u = (llr[:, 0] < 0).astype(np.uint8)
            else:
                u = np.zeros(llr.shape[0], dtype=np.uint8)
            u = u[:, None]
            return u, u
        h = m // 2
        l1, l2 = llr[:, :h], llr[:, h:]
        u_l, x_l = rec(_f(l1, l2), lo)
        u_r, x_r = rec(l2 + (1.0 - 2.0 * x_l) * l1, lo + h)
        return np.hstack([u_l, u_r]), np.hstack([x_l ^ x_r, x_r])

    u, _ = rec(llrs, 0)
    return u[:, list(code.info_set)]


def sc_decode(code: PolarCode, llr) -> np.ndarray:
    return sc_decode_batch(code, np.asarray(llr)[None, :])[0]


def _take_paths(a: np.ndarray, perm: np.ndarray | None) -> np.ndarray:
    # perm None means the path set did not change (identity)
    if perm is None:
        return a
    return np.take_along_axis(a, perm[:, :, None], axis=1)


class _SclCore:
    """Scratch state for one batched SCL call."""

    def __init__(self, code: PolarCode, llrs: np.ndarray, list_size: int,
                 trace: list | None = None):
        self.is_info = code.info_mask()
        self.list_size = list_size
        self.b = llrs.shape[0]
        self.pm = np.zeros((self.b, 1))
        self.trace = trace
        u, _, _ = self._rec(llrs[:, None, :], 0)
        self.decisions = u  # (B, P, N)

    def _leaf(self, llr: np.ndarray, lo: int):
        b, p = llr.shape
        pen0 = np.where(llr < 0, -llr, 0.0)
        if not self.is_info[lo]:
            self.pm = self.pm + pen0
            u = np.zeros((b, p, 1), dtype=np.uint8)
            if self.trace is not None:
                self.trace.append((lo, self.pm.copy(), None))
            return u, u, None
        pen1 = np.where(llr > 0, llr, 0.0)
        cand = np.empty((b, 2 * p))
        cand[:, 0::2] = self.pm + pen0
        cand[:, 1::2] = self.pm + pen1
        keep = min(2 * p, self.list_size)
        order = np.argsort(cand, axis=1, kind="stable")[:, :keep]
        self.pm = np.take_along_axis(cand, order, axis=1)
        u = (order & 1).astype(np.uint8)[:, :, None]
        perm = order >> 1
        if self.trace is not None:
            self.trace.append((lo, self.pm.copy(), perm.copy()))
        return u, u.copy(), perm

    def _rec(self, llr: np.ndarray, lo: int):
        m = llr.shape[2]
        if m == 1:
            return self._leaf(llr[:, :, 0], lo)
        h = m // 2
        l1, l2 = llr[:, :, :h], llr[:, :, h:]
        u_l, x_l, perm1 = self._rec(_f(l1, l2), lo)
        l1 = _take_paths(l1, perm1)
        l2 = _take_paths(l2, perm1)
        u_r, x_r, perm2 = self._rec(l2 + (1.0 - 2.0 * x_l) * l1, lo + h)
        u_l = _take_paths(u_l, perm2)
        x_l = _take_paths(x_l, perm2)
        u = np.concatenate([u_l, u_r], axis=2)
        x = np.concatenate([x_l ^ x_r, x_r], axis=2)
        if perm1 is None:
            perm = perm2
        elif perm2 is None:
            perm = perm1
        else:
            perm = np.take_along_axis(perm1, perm2, axis=1)
        return u, x, perm


def scl_decode_batch(code: PolarCode, llrs: np.ndarray, list_size: int,
                     selection: str = "pm_first",
                     true_info: np.ndarray | None = None):
    """List-decode (B, N) LLRs; returns ((B, K) decisions, (B,) truth-in-list).

    selection "pm_first" picks the smallest-metric survivor. selection
    "genie" picks the transmitted path whenever it survived, else falls
    back to the smallest metric; it requires true_info (B, K).
    """
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    if llrs.shape[1] != code.n:
        raise ValueError(f"frame length {llrs.shape[1]} != N {code.n}")
    if list_size < 1:
        raise ValueError("list size must be >= 1")
    if selection not in ("pm_first", "genie"):
        raise ValueError(f"unknown selection rule {selection!r}")
    if selection == "genie" and true_info is None:
        raise ValueError("genie selection requires true_info")

    core = _SclCore(code, llrs, list_size)
    info_bits = core.decisions[:, :, list(code.info_set)]  # (B, P, K)
    best = np.argmin(core.pm, axis=1)

    if true_info is not None:
        true_info = np.atleast_2d(np.asarray(true_info, dtype=np.uint8))
        matches = (info_bits == true_info[:, None, :]).all(axis=2)  # (B, P)
        in_list = matches.any(axis=1)
    else:
        in_list = np.zeros(llrs.shape[0], dtype=bool)

    if selection == "genie":
        first_match = np.argmax(matches, axis=1)
        pick = np.where(in_list, first_match, best)
    else:
        pick = best
    selected = np.take_along_axis(info_bits, pick[:, None, None], axis=1)[:, 0, :]
    return selected, in_list


def scl_decode(code: PolarCode, llr, list_size: int, selection: str = "pm_first",
               true_info=None):
    t = None if true_info is None else np.asarray(true_info)[None, :]
    sel, ok = scl_decode_batch(code, np.asarray(llr)[None, :], list_size,
                               selection, t)
    return sel[0], bool(ok[0])


def scl_survivors(code: PolarCode, llr, list_size: int,
                  trace: list | None = None) -> list[DecodePath]:
    """Final survivor paths of one frame, sorted as held by the decoder.

    When a list is passed as trace, it receives (bit_index, metrics,
    parent permutation) after every decoded bit.
    """
    llrs = np.asarray(llr, dtype=np.float64)[None, :]
    core = _SclCore(code, llrs, list_size, trace=trace)
    return [DecodePath(core.decisions[0, p].copy(), float(core.pm[0, p]))
            for p in range(core.decisions.shape[1])]


def save_construction(path, code: PolarCode) -> None:
    """Write "N K" then the ascending information set indices."""
    with open(path, "w") as fh:
        fh.write(f"{code.n} {code.k}\n")
        fh.write(" ".join(str(i) for i in code.info_set) + "\n")


def load_construction(path) -> PolarCode:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'N K'")
        n, k = int(header[0]), int(header[1])
        idx = [int(v) for v in fh.readline().split()]
    if len(idx) != k:
        raise ValueError(f"{path}: expected {k} indices, found {len(idx)}")
    return PolarCode(n, tuple(idx))
