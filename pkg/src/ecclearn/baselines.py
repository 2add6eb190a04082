"""Classical polar-code constructions used as references for learning runs.

Reliability profiles rank the N synthesized subchannels. The recursion
layout matches the decoder in polar.py: child 2i is the check-combined
(less reliable) branch, child 2i + 1 the repetition-combined one, so
subchannel 0 is always the worst and N - 1 the best.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .channel import esn0_to_sigma
from .polar import PolarCode

PW_BETA = 2.0 ** 0.25

# Piece boundaries of the phi proxy; the tail is exponential, so for very
# large means (where phi underflows) the check-node update is a pure shift.
_PHI_CUT_A = 0.1910
_PHI_CUT_B = 0.7420
_PHI_CUT_C = 9.2254
_GA_LINEAR_THRESHOLD = 2000.0
_GA_SHIFT = np.log(2.0) / 0.2832


@dataclass(frozen=True)
class ReliabilityProfile:
    """Per-subchannel reliability metric plus the induced ordering."""

    n: int
    metric: np.ndarray
    order: np.ndarray = field(init=False)

    def __post_init__(self):
        metric = np.asarray(self.metric, dtype=np.float64)
        if metric.shape != (self.n,):
            raise ValueError("metric length must equal N")
        metric.setflags(write=False)
        # stable sort: ties resolve to the lower index
        order = np.argsort(-metric, kind="stable")
        order.setflags(write=False)
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "order", order)

    def top_k(self, k: int) -> PolarCode:
        if not 0 <= k <= self.n:
            raise ValueError(f"K={k} out of range")
        return PolarCode(self.n, tuple(sorted(int(i) for i in self.order[:k])))

    def rank(self) -> np.ndarray:
        """rank[i] = position of subchannel i in the ordering (0 = best)."""
        r = np.empty(self.n, dtype=np.int64)
        r[self.order] = np.arange(self.n)
        return r


def _check_block_length(n: int) -> int:
    if n < 1 or n & (n - 1):
        raise ValueError(f"N={n} is not a power of two")
    return int(n).bit_length() - 1


def bhattacharyya_bec(n: int, z0: float) -> ReliabilityProfile:
    """Erasure-channel parameters: Z- = 2Z - Z^2, Z+ = Z^2, from Z = z0."""
    stages = _check_block_length(n)
    if not 0.0 < z0 < 1.0:
        raise ValueError("z0 must lie strictly inside (0, 1)")
    z = np.array([z0])
    for _ in range(stages):
        nxt = np.empty(2 * z.size)
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    return ReliabilityProfile(n, -z)


def bhattacharyya_values(n: int, z0: float) -> np.ndarray:
    return -bhattacharyya_bec(n, z0).metric


def _phi(x: np.ndarray) -> np.ndarray:
    """Four-piece analytic proxy for the check-node mean-LLR contraction.

    Monotone decreasing with phi(0) = 1; the extra small-argument pieces
    keep subchannel orderings consistent with the universal partial order
    at very low design SNRs.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.ones_like(x)
    m1 = (x > 0) & (x <= _PHI_CUT_A)
    m2 = (x > _PHI_CUT_A) & (x <= _PHI_CUT_B)
    m3 = (x > _PHI_CUT_B) & (x <= _PHI_CUT_C)
    m4 = x > _PHI_CUT_C
    out[m1] = np.exp(0.1047 * x[m1] ** 2 - 0.4992 * x[m1])
    out[m2] = 0.9981 * np.exp(0.05315 * x[m2] ** 2 - 0.4795 * x[m2])
    out[m3] = np.exp(-0.4527 * x[m3] ** 0.86 + 0.0218)
    out[m4] = np.exp(-0.2832 * x[m4] - 0.4254)
    return out


def _inv_quadratic(log_y: np.ndarray, a: float, b: float) -> np.ndarray:
    """Smaller root of a x^2 + b x - log_y = 0 (b < 0, log_y <= 0)."""
    disc = np.sqrt(np.maximum(b * b + 4.0 * a * log_y, 0.0))
    return (-b - disc) / (2.0 * a)


def _phi_inv(y: np.ndarray) -> np.ndarray:
    """Branchwise analytic inverse of _phi."""
    y = np.asarray(y, dtype=np.float64)
    y1 = float(_phi(np.array(_PHI_CUT_A)))
    y2 = float(_phi(np.array(_PHI_CUT_B)))
    y3 = float(_phi(np.array(_PHI_CUT_C)))
    out = np.empty_like(y)
    m1 = y >= y1
    m2 = (y < y1) & (y >= y2)
    m3 = (y < y2) & (y >= y3)
    m4 = y < y3
    ly = np.log(np.clip(y[m1], None, 1.0))
    out[m1] = _inv_quadratic(ly, 0.1047, -0.4992)
    out[m2] = _inv_quadratic(np.log(y[m2] / 0.9981), 0.05315, -0.4795)
    out[m3] = ((0.0218 - np.log(y[m3])) / 0.4527) ** (1.0 / 0.86)
    out[m4] = -(np.log(y[m4]) + 0.4254) / 0.2832
    return out


def _check_node(m: np.ndarray) -> np.ndarray:
    """Mean-LLR update for the check-combined child channel."""
    m = np.asarray(m, dtype=np.float64)
    out = np.empty_like(m)
    big = m > _GA_LINEAR_THRESHOLD
    out[big] = m[big] - _GA_SHIFT
    if (~big).any():
        p = _phi(m[~big])
        out[~big] = _phi_inv(p * (2.0 - p))
    return out


def dega_reliabilities(n: int, design_esn0_db: float) -> ReliabilityProfile:
    """Mean-LLR evolution under the Gaussian approximation.

    Starts from m0 = 2 / sigma^2 at the design SNR; the repetition child
    doubles the mean, the check child contracts it via the phi proxy.
    """
    stages = _check_block_length(n)
    sigma = esn0_to_sigma(design_esn0_db)
    m = np.array([2.0 / (sigma * sigma)])
    for _ in range(stages):
        nxt = np.empty(2 * m.size)
        nxt[0::2] = _check_node(m)
        nxt[1::2] = 2.0 * m
        m = nxt
    return ReliabilityProfile(n, m)


def pw_reliabilities(n: int) -> ReliabilityProfile:
    """Channel-independent weights: PW(i) = sum_j b_j beta^j over i's bits."""
    stages = _check_block_length(n)
    idx = np.arange(n)
    bits = (idx[:, None] >> np.arange(max(stages, 1))) & 1
    weights = PW_BETA ** np.arange(max(stages, 1))
    return ReliabilityProfile(n, bits @ weights)


def rm_polar_select(n: int, k: int, profile: ReliabilityProfile) -> PolarCode:
    """Restrict to indices of maximal binary weight, then rank by profile.

    Chooses the largest weight threshold w with at least K indices of
    weight >= w, then keeps the K most reliable of those.
    """
    if k > n:
        raise ValueError("K must not exceed N")
    wt = np.bitwise_count(np.arange(n, dtype=np.uint64)).astype(np.int64)
    threshold = 0
    for w in range(int(wt.max()), -1, -1):
        if int((wt >= w).sum()) >= k:
            threshold = w
            break
    candidates = np.nonzero(wt >= threshold)[0]
    rank = profile.rank()
    chosen = candidates[np.argsort(rank[candidates], kind="stable")][:k]
    return PolarCode(n, tuple(sorted(int(i) for i in chosen)))


def upo_dominates(i: int, j: int, n_bits: int) -> bool:
    """True when subchannel j is universally at least as reliable as i.

    Equivalent to: i's binary expansion maps onto j's by flipping 0 bits
    to 1 and moving 1 bits toward more significant positions, i.e. every
    suffix of j holds at least as many ones as the same suffix of i.
    """
    if not (0 <= i < (1 << n_bits) and 0 <= j < (1 << n_bits)):
        raise ValueError("index out of range for the given bit width")
    for t in range(n_bits):
        if (i >> t).bit_count() > (j >> t).bit_count():
            return False
    return True


def save_profile_csv(path, profile: ReliabilityProfile) -> None:
    """Dump index, metric, rank rows (rank 0 = most reliable)."""
    rank = profile.rank()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "metric", "rank"])
        for i in range(profile.n):
            writer.writerow([i, repr(float(profile.metric[i])), int(rank[i])])


@dataclass
class DesignSearchResult:
    design_esn0_db: float
    code: PolarCode
    required_esn0_db: float
    exhausted: bool = False


def design_snr_search(n: int, k: int, decoder, budget, target_bler: float = 1e-2,
                      grid_lo: float = -20.0, grid_hi: float = 10.0,
                      grid_step: float = 0.25,
                      search_lo: float = -4.0, search_hi: float = 16.0,
                      max_evaluations: int | None = None) -> DesignSearchResult:
    """Pick the design SNR whose construction needs the least channel SNR.

    Walks the design grid, dedupes identical information sets, and scores
    each distinct construction by its required SNR at the target block
    error rate. Ties keep the lowest design SNR.
    """
    from . import evaluate

    seen: set[tuple] = set()
    best: DesignSearchResult | None = None
    evaluations = 0
    exhausted = False
    design = grid_lo
    while design <= grid_hi + 1e-9:
        code = dega_reliabilities(n, design).top_k(k)
        key = code.info_set
        if key not in seen:
            seen.add(key)
            if max_evaluations is not None and evaluations >= max_evaluations:
                exhausted = True
                break
            evaluations += 1
            req = evaluate.required_esn0(
                code, decoder, budget, target_bler=target_bler,
                scan_lo=search_lo, scan_hi=search_hi)
            if best is None or req < best.required_esn0_db:
                best = DesignSearchResult(design, code, req)
        design += grid_step
    if best is None:
        raise ValueError("design grid produced no evaluable construction")
    best.exhausted = exhausted
    return best
