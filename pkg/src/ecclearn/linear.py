"""Generic linear block codes: systematic encoding, ordered-statistics
decoding, and Reed-Muller / extended-BCH baseline generators.

OSD reprocesses error patterns of bounded weight on the most reliable
independent basis and keeps the candidate with the smallest weighted
discrepancy against the channel LLRs, which is equivalent to maximum
correlation. Order K therefore coincides with exhaustive ML.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gf2

# One primitive polynomial per field degree, bit i = coefficient of x^i.
PRIMITIVE_POLY = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}


@dataclass(frozen=True)
class LinearCode:
    """A code given by a standard-form generator matrix [I_K | P]."""

    g: np.ndarray

    def __post_init__(self):
        g = np.atleast_2d(gf2.as_bits(self.g))
        rank, standard = gf2.systematic_rank(g)
        if not standard or rank != g.shape[0]:
            raise ValueError("generator matrix must be full-rank [I_K | P]")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @property
    def k(self) -> int:
        return self.g.shape[0]

    @property
    def n(self) -> int:
        return self.g.shape[1]

    @property
    def parity(self) -> np.ndarray:
        return self.g[:, self.k:]


def encode_batch(code: LinearCode, msgs: np.ndarray) -> np.ndarray:
    """Systematic encoding of (B, K) messages to (B, N) codewords."""
    msgs = np.atleast_2d(np.asarray(msgs, dtype=np.uint8))
    if msgs.shape[1] != code.k:
        raise ValueError(f"expected {code.k} message bits, got {msgs.shape[1]}")
    return gf2.matmul_gf2(msgs, code.g)


def encode(code: LinearCode, msg) -> np.ndarray:
    return encode_batch(code, np.asarray(msg)[None, :])[0]


@lru_cache(maxsize=32)
def _patterns_by_weight(k: int, order: int) -> tuple:
    """Index tuples of all basis-error patterns with weight 1..order."""
    groups = []
    for w in range(1, order + 1):
        combos = list(itertools.combinations(range(k), w))
        groups.append(np.array(combos, dtype=np.int64).reshape(len(combos), w))
    return tuple(groups)


def osd_decode(code: LinearCode, llr, order: int) -> np.ndarray:
    """Order-`order` OSD of one LLR frame; returns the decoded message."""
    return osd_decode_batch(code, np.asarray(llr)[None, :], order)[0]


_OSD_CHUNK = 256


def _mrb_reduce(g: np.ndarray, reliab: np.ndarray):
    """Frame-parallel Gauss-Jordan in each frame's reliability column order.

    g is (K, N); reliab is (B, N) with each row a permutation, most
    reliable first. Returns (reduced (B, K, N) in the permuted domain,
    pivot column positions (B, K) into that domain).
    """
    b, n = reliab.shape
    k = g.shape[0]
    r = np.ascontiguousarray(np.transpose(g[:, reliab], (1, 0, 2)))
    pivot_rows = np.arange(k)
    row_idx = np.broadcast_to(pivot_rows, (b, k))
    rank = np.zeros(b, dtype=np.int64)
    pivot_cols = np.zeros((b, k), dtype=np.int64)
    frames = np.arange(b)
    for c in range(n):
        active = rank < k
        if not active.any():
            break
        col = r[:, :, c]
        candidates = (col == 1) & (row_idx >= rank[:, None])
        has = candidates.any(axis=1) & active
        if not has.any():
            continue
        piv = np.argmax(candidates, axis=1)
        # swap pivot row into position `rank` for frames that found one
        fsel = frames[has]
        p_sel, r_sel = piv[has], rank[has]
        need = p_sel != r_sel
        if need.any():
            fs, ps, rs = fsel[need], p_sel[need], r_sel[need]
            tmp = r[fs, ps].copy()
            r[fs, ps] = r[fs, rs]
            r[fs, rs] = tmp
        col = r[:, :, c]
        elim = (col == 1) & has[:, None]
        elim[fsel, r_sel] = False
        if elim.any():
            pivot_row_vals = r[frames, np.where(has, rank, 0)]
            r ^= elim[:, :, None] & (pivot_row_vals[:, None, :] == 1)
        pivot_cols[fsel, r_sel] = c
        rank[has] += 1
    if (rank < k).any():
        raise AssertionError("generator columns rank-deficient within a frame")
    return r, pivot_cols


def osd_decode_batch(code: LinearCode, llrs: np.ndarray, order: int) -> np.ndarray:
    """OSD over (B, N) LLR frames; returns (B, K) decoded messages.

    Positions are ranked by |llr| descending (ties: lower index); the K
    most reliable independent positions form the basis. Reprocessing
    enumerates patterns by weight, then lexicographically, so the
    returned winner is deterministic under score ties.
    """
    llrs = np.atleast_2d(np.asarray(llrs, dtype=np.float64))
    b, n = llrs.shape
    if n != code.n:
        raise ValueError(f"frame length {n} != N {code.n}")
    k = code.k
    if order < 0 or order > k:
        raise ValueError(f"order must be in [0, {k}]")
    groups = _patterns_by_weight(k, order)
    out = np.empty((b, k), dtype=np.uint8)
    for lo in range(0, b, _OSD_CHUNK):
        chunk = llrs[lo:lo + _OSD_CHUNK]
        out[lo:lo + _OSD_CHUNK] = _osd_chunk(code, chunk, groups)
    return out


def _osd_chunk(code: LinearCode, llrs: np.ndarray, groups: tuple) -> np.ndarray:
    b, n = llrs.shape
    k = code.k
    mag = np.abs(llrs)
    reliab = np.argsort(-mag, axis=1, kind="stable")
    reduced, pivot_cols = _mrb_reduce(code.g, reliab)
    hard_p = (np.take_along_axis(llrs, reliab, axis=1) < 0).astype(np.uint8)
    mag_p = np.take_along_axis(mag, reliab, axis=1)
    z = np.take_along_axis(hard_p, pivot_cols, axis=1)  # (B, K)
    base = np.bitwise_xor.reduce(z[:, :, None] * reduced, axis=1)
    d0 = (base ^ hard_p).astype(np.float64)
    base_score = (d0 * mag_p).sum(axis=1)
    # adding flip f changes the discrepancy by f . (mag * (1 - 2 d0))
    wvec = (mag_p * (1.0 - 2.0 * d0))[:, :, None]
    scores = [np.zeros((b, 1))]
    flip_groups = []
    for idx in groups:
        flips = np.bitwise_xor.reduce(reduced[:, idx], axis=2)  # (B, P_w, N)
        flip_groups.append(flips)
        scores.append(np.matmul(flips.astype(np.float64), wvec)[:, :, 0])
    best = np.argmin(np.concatenate(scores, axis=1), axis=1)
    best_cw_p = base.copy()
    offset = 1
    for flips in flip_groups:
        pw = flips.shape[1]
        sel = np.nonzero((best >= offset) & (best < offset + pw))[0]
        if sel.size:
            best_cw_p[sel] ^= flips[sel, best[sel] - offset]
        offset += pw
    cw = np.empty_like(best_cw_p)
    np.put_along_axis(cw, reliab, best_cw_p, axis=1)
    return cw[:, :k]


def to_standard_form(g) -> tuple[LinearCode, np.ndarray]:
    """Row-reduce and, if needed, permute columns into [I_K | P].

    Returns the standard-form code and the column permutation applied
    (an equivalent code with identical weight distribution).
    """
    g = np.atleast_2d(gf2.as_bits(g))
    k, n = g.shape
    reduced, pivots = gf2.row_reduce(g)
    if len(pivots) != k:
        raise ValueError("matrix is rank-deficient")
    rest = [c for c in range(n) if c not in set(pivots)]
    perm = np.array(list(pivots) + rest, dtype=np.int64)
    return LinearCode(reduced[:, perm]), perm


def rm_generator(r: int, m: int) -> LinearCode:
    """Reed-Muller RM(r, m): evaluations of monomials of degree <= r."""
    if not 0 <= r <= m:
        raise ValueError(f"invalid Reed-Muller parameters r={r}, m={m}")
    n = 1 << m
    points = ((np.arange(n)[:, None] >> np.arange(m)) & 1).astype(np.uint8)
    rows = []
    for deg in range(r + 1):
        for combo in itertools.combinations(range(m), deg):
            row = np.ones(n, dtype=np.uint8)
            for v in combo:
                row &= points[:, v]
            rows.append(row)
    code, _ = to_standard_form(np.array(rows, dtype=np.uint8))
    return code


# ---------------------------------------------------------------------------
# GF(2^m) arithmetic and BCH generator polynomials
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _gf_tables(m: int) -> tuple[list[int], list[int]]:
    """Exp/log tables for GF(2^m) under the module's primitive polynomial."""
    if m not in PRIMITIVE_POLY:
        raise ValueError(f"no primitive polynomial configured for m={m}")
    poly = PRIMITIVE_POLY[m]
    size = 1 << m
    exp = [0] * (2 * size)
    log = [0] * size
    x = 1
    for i in range(size - 1):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & size:
            x ^= poly
    for i in range(size - 1, 2 * size):
        exp[i] = exp[i - (size - 1)]
    return exp, log


def _gf_mul(a: int, b: int, m: int) -> int:
    if a == 0 or b == 0:
        return 0
    exp, log = _gf_tables(m)
    return exp[log[a] + log[b]]


def _poly_mul_gf2(a: int, b: int) -> int:
    """Multiply binary polynomials held as int bitmasks."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def _poly_mod_gf2(a: int, b: int) -> int:
    db = b.bit_length()
    while a.bit_length() >= db:
        a ^= b << (a.bit_length() - db)
    return a


def _minimal_polynomial(i: int, m: int) -> int:
    """Binary minimal polynomial of alpha^i as an int bitmask."""
    n = (1 << m) - 1
    coset = set()
    j = i % n
    while j not in coset:
        coset.add(j)
        j = (j * 2) % n
    # product of (x + alpha^c) with coefficients in GF(2^m)
    poly = [1]  # ascending powers of x
    exp, _ = _gf_tables(m)
    for c in sorted(coset):
        root = exp[c]
        nxt = [0] * (len(poly) + 1)
        for d, coef in enumerate(poly):
            nxt[d + 1] ^= coef
            nxt[d] ^= _gf_mul(coef, root, m)
        poly = nxt
    if any(c not in (0, 1) for c in poly):
        raise AssertionError("minimal polynomial has non-binary coefficients")
    out = 0
    for d, coef in enumerate(poly):
        out |= coef << d
    return out


def bch_achievable_dimensions(m: int) -> dict[int, int]:
    """Map dimension k -> generator polynomial of narrow-sense BCH(2^m - 1, k)."""
    n = (1 << m) - 1
    gens: dict[int, int] = {}
    g = 1
    seen: set[int] = set()
    power = 1
    while True:
        coset_rep = None
        j = power % n
        coset = set()
        while j not in coset:
            coset.add(j)
            j = (j * 2) % n
        coset_rep = min(coset)
        if coset_rep not in seen:
            seen.add(coset_rep)
            g = _poly_mul_gf2(g, _minimal_polynomial(coset_rep, m))
        k = n - (g.bit_length() - 1)
        if k <= 0:
            break
        gens.setdefault(k, g)
        power += 2  # consecutive designed roots alpha^1..alpha^{2t}
    return gens


def bch_generator_poly(m: int, k: int) -> int:
    gens = bch_achievable_dimensions(m)
    if k not in gens:
        dims = sorted(gens, reverse=True)
        raise ValueError(
            f"no BCH({(1 << m) - 1}, {k}) code; achievable dimensions: {dims}"
        )
    return gens[k]


def ebch_generator(m: int, k: int) -> LinearCode:
    """Extended BCH code of length 2^m: cyclic code plus overall parity."""
    n = (1 << m) - 1
    g_poly = bch_generator_poly(m, k)
    deg = g_poly.bit_length() - 1
    coeffs = np.array([(g_poly >> d) & 1 for d in range(deg + 1)], dtype=np.uint8)
    rows = np.zeros((k, n), dtype=np.uint8)
    for i in range(k):
        rows[i, i:i + deg + 1] = coeffs
    parity = rows.sum(axis=1) % 2
    extended = np.hstack([rows, parity[:, None].astype(np.uint8)])
    code, _ = to_standard_form(extended)
    return code
