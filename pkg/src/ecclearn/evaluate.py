"""Monte-Carlo block-error-rate evaluation and reward shaping.

Frames are simulated in fixed-size batches whose random values are
addressed by (seed, frame_index), so estimates are bit-identical for a
given budget regardless of worker count or scheduling. The stopping
rule is checked on batch boundaries only: simulation ends at the first
boundary where the error count reaches min_error_events or the frame
count reaches max_frames.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linear, polar
from .channel import ChannelSpec, derive_seed, frame_bits, modulate_bpsk, transmit_awgn_batch


@dataclass(frozen=True)
class BlerEstimate:
    """One measured operating point."""

    esn0_db: float
    frames: int
    errors: int

    def __post_init__(self):
        if self.frames <= 0 or not 0 <= self.errors <= self.frames:
            raise ValueError("need 0 <= errors <= frames with frames > 0")

    @property
    def bler(self) -> float:
        return self.errors / self.frames

    @property
    def halfwidth(self) -> float:
        """Normal-approximation 95% confidence half-width of the BLER."""
        p = self.bler
        return 1.96 * math.sqrt(max(p * (1.0 - p), 0.0) / self.frames)


@dataclass(frozen=True)
class EvalBudget:
    """Stopping rule plus the root seed of all random values consumed."""

    seed: int
    min_error_events: int = 1000
    max_frames: int = 1_000_000
    batch_frames: int = 4096

    def __post_init__(self):
        if self.min_error_events < 1:
            raise ValueError("min_error_events must be >= 1")
        if self.max_frames < self.min_error_events:
            raise ValueError("max_frames must be >= min_error_events")
        if self.batch_frames < 1:
            raise ValueError("batch_frames must be >= 1")


@dataclass(frozen=True)
class DecoderSpec:
    """Which decoder the evaluator runs: sc, scl_pm, scl_genie, or osd."""

    kind: str
    list_size: int = 1
    order: int = 2

    def __post_init__(self):
        if self.kind not in ("sc", "scl_pm", "scl_genie", "osd"):
            raise ValueError(f"unknown decoder kind {self.kind!r}")
        if self.kind.startswith("scl") and self.list_size < 1:
            raise ValueError("list_size must be >= 1")

    def label(self) -> str:
        if self.kind == "sc":
            return "sc"
        if self.kind == "osd":
            return f"osd{self.order}"
        return f"{self.kind}_L{self.list_size}"


def _make_link(code, decoder: DecoderSpec):
    """Bind (code, decoder) to encode/decode callables over frame batches."""
    if isinstance(code, polar.PolarCode):
        if decoder.kind == "osd":
            raise ValueError("osd decodes generator-matrix codes, not polar codes")
        encode = lambda bits: polar.polar_encode_batch(code, bits)
        if decoder.kind == "sc":
            decode = lambda llrs, bits: polar.sc_decode_batch(code, llrs)
        elif decoder.kind == "scl_pm":
            decode = lambda llrs, bits: polar.scl_decode_batch(
                code, llrs, decoder.list_size)[0]
        else:
            decode = lambda llrs, bits: polar.scl_decode_batch(
                code, llrs, decoder.list_size, "genie", bits)[0]
        return code.n, code.k, encode, decode
    if isinstance(code, linear.LinearCode):
        if decoder.kind != "osd":
            raise ValueError(f"decoder {decoder.kind!r} cannot decode a "
                             "generator-matrix code")
        encode = lambda bits: linear.encode_batch(code, bits)
        decode = lambda llrs, bits: linear.osd_decode_batch(code, llrs, decoder.order)
        return code.n, code.k, encode, decode
    raise TypeError(f"unsupported code object {type(code).__name__}")


def _errors_in_range(link, spec: ChannelSpec, bit_seed: int,
                     start: int, count: int) -> int:
    n, k, encode, decode = link
    bits = frame_bits(bit_seed, start, count, k)
    llrs = transmit_awgn_batch(modulate_bpsk(encode(bits)), spec, start)
    decoded = decode(llrs, bits)
    return int((decoded != bits).any(axis=1).sum())


def estimate_bler(code, decoder: DecoderSpec, esn0_db: float, budget: EvalBudget,
                  workers: int = 1) -> BlerEstimate:
    """Measure BLER at one SNR point under the budget's stopping rule."""
    link = _make_link(code, decoder)
    spec = ChannelSpec(esn0_db, derive_seed(budget.seed, "noise"))
    bit_seed = derive_seed(budget.seed, "info")
    frames = 0
    errors = 0
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frames < budget.max_frames:
            count = min(budget.batch_frames, budget.max_frames - frames)
            if pool is None:
                errors += _errors_in_range(link, spec, bit_seed, frames, count)
            else:
                stripe = -(-count // workers)
                jobs = []
                for w in range(workers):
                    lo = frames + w * stripe
                    c = min(stripe, frames + count - lo)
                    if c > 0:
                        jobs.append(pool.submit(
                            _errors_in_range, link, spec, bit_seed, lo, c))
                errors += sum(job.result() for job in jobs)
            frames += count
            if errors >= budget.min_error_events:
                break
    finally:
        if pool is not None:
            pool.shutdown()
    return BlerEstimate(esn0_db, frames, errors)


def fitness_product(code, decoder: DecoderSpec, snr_pair, budget: EvalBudget,
                    workers: int = 1) -> float:
    """Product of the BLERs at two SNR points; smaller is fitter."""
    lo_db, hi_db = float(snr_pair[0]), float(snr_pair[1])
    if not lo_db < hi_db:
        raise ValueError("snr_pair must be strictly increasing")
    product = 1.0
    for i, point in enumerate((lo_db, hi_db)):
        sub = EvalBudget(derive_seed(budget.seed, f"point{i}"),
                         budget.min_error_events, budget.max_frames,
                         budget.batch_frames)
        product *= estimate_bler(code, decoder, point, sub, workers).bler
        if product == 0.0:
            break
    return product


def required_esn0(code, decoder: DecoderSpec, budget: EvalBudget,
                  target_bler: float = 1e-2,
                  scan_lo: float = -2.0, scan_hi: float = 14.0,
                  coarse_step: float = 0.25, resolution: float = 0.05,
                  workers: int = 1) -> float:
    """SNR (dB) at which the BLER curve crosses target_bler.

    Scans a coarse grid upward (or downward when scan_lo is already past
    the target) to bracket the crossing, bisects the bracket down to the
    requested resolution, then interpolates linearly in log BLER.
    """
    if not 0.0 < target_bler < 1.0:
        raise ValueError("target_bler must lie in (0, 1)")

    cache: dict[float, BlerEstimate] = {}

    def point(db: float) -> BlerEstimate:
        db = round(db, 6)
        if db not in cache:
            sub = EvalBudget(derive_seed(budget.seed, f"esn0:{db:.6f}"),
                             budget.min_error_events, budget.max_frames,
                             budget.batch_frames)
            cache[db] = estimate_bler(code, decoder, db, sub, workers)
        return cache[db]

    lo = scan_lo
    est_lo = point(lo)
    if est_lo.bler < target_bler:
        # already past the crossing: walk down
        floor = scan_lo - 20.0
        hi, est_hi = lo, est_lo
        while lo > floor:
            lo -= coarse_step
            est_lo = point(lo)
            if est_lo.bler >= target_bler:
                break
            hi, est_hi = lo, est_lo
        else:
            raise ValueError(
                f"BLER stays below target down to {lo:.2f} dB "
                f"(bler={est_lo.bler:.3g})")
    else:
        hi = lo
        while True:
            hi += coarse_step
            if hi > scan_hi + 1e-9:
                raise ValueError(
                    f"target not reached by {scan_hi:.2f} dB; last bracket "
                    f"{lo:.2f} dB at bler={est_lo.bler:.3g}")
            est_hi = point(hi)
            if est_hi.bler < target_bler:
                break
            lo, est_lo = hi, est_hi

    while hi - lo > resolution:
        mid = 0.5 * (lo + hi)
        est_mid = point(mid)
        if est_mid.bler >= target_bler:
            lo, est_lo = mid, est_mid
        else:
            hi, est_hi = mid, est_mid

    bl = max(est_lo.bler, 1.0 / est_lo.frames)
    bh = max(est_hi.bler, 1.0 / est_hi.frames)
    if bl <= bh:
        return 0.5 * (lo + hi)
    t = (math.log(bl) - math.log(target_bler)) / (math.log(bl) - math.log(bh))
    return lo + t * (hi - lo)


def reward(kind: str, measurement) -> float:
    """Scalar feedback for the constructors.

    neg_esn0 negates a required-SNR measurement in dB. log_bler takes a
    BlerEstimate and returns ln(BLER) with zero counts floored at one
    error event over the observed frames.
    """
    if kind == "neg_esn0":
        return -float(measurement)
    if kind == "log_bler":
        est = measurement
        return math.log(max(est.bler, 1.0 / est.frames))
    raise ValueError(f"unknown reward kind {kind!r}")


BLER_CSV_FIELDS = ["code_id", "decoder", "esn0_db", "frames", "errors", "bler", "seed"]


def write_bler_csv(path, rows) -> None:
    """rows: iterables of (code_id, decoder_label, BlerEstimate, seed)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BLER_CSV_FIELDS)
        for code_id, decoder_label, est, seed in rows:
            writer.writerow([code_id, decoder_label, repr(float(est.esn0_db)),
                             est.frames, est.errors, repr(est.bler), seed])
