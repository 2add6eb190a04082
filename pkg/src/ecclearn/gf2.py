"""Dense GF(2) linear algebra on numpy uint8 arrays.

Bit vectors and bit matrices are plain numpy arrays with values in {0, 1}.
All operations are pure functions of their inputs and are safe to call
concurrently.
"""

from __future__ import annotations

import numpy as np

# Polar kernel [[1, 0], [1, 1]].
KERNEL = np.array([[1, 0], [1, 1]], dtype=np.uint8)

# Exhaustive codeword enumeration is capped at 2^28 messages.
MIN_DISTANCE_MAX_K = 28

_ENUM_CHUNK = 1 << 20


def as_bits(a) -> np.ndarray:
    """Validate and convert to a uint8 array of 0/1 values."""
    out = np.asarray(a, dtype=np.uint8)
    if out.size and out.max() > 1:
        raise ValueError("entries must be 0 or 1")
    return out


def matmul_gf2(a, b) -> np.ndarray:
    """Mod-2 matrix product. Accepts 1-D or 2-D operands."""
    a = as_bits(a)
    b = as_bits(b)
    inner_a = a.shape[-1]
    inner_b = b.shape[0]
    if inner_a != inner_b:
        raise ValueError(f"dimension mismatch: {a.shape} x {b.shape}")
    # int64 accumulation avoids uint8 overflow for inner dims > 255
    prod = a.astype(np.int64) @ b.astype(np.int64)
    return (prod & 1).astype(np.uint8)


def kron_power(f, n: int) -> np.ndarray:
    """n-fold Kronecker power of a square binary matrix; n=0 gives [[1]]."""
    f = as_bits(f)
    if f.ndim != 2 or f.shape[0] != f.shape[1]:
        raise ValueError("kernel must be square")
    if n < 0:
        raise ValueError("power must be non-negative")
    out = np.array([[1]], dtype=np.uint8)
    for _ in range(n):
        out = np.kron(out, f)
    return out


def _pack_rows(m: np.ndarray) -> np.ndarray:
    """Pack each row of a (K, N) bit matrix into ceil(N/64) uint64 words."""
    k, n = m.shape
    words = -(-n // 64)
    padded = np.zeros((k, words * 64), dtype=np.uint8)
    padded[:, :n] = m
    # packbits is big-endian per byte; consistent packing is all we need
    return np.packbits(padded, axis=1).view(np.uint64).reshape(k, words)


def _nonzero_codeword_weights(packed: np.ndarray):
    """Yield Hamming weights of all 2^K - 1 nonzero codewords, in chunks.

    Walks messages in Gray-code order: step i flips generator row ctz(i+1),
    so each chunk is a prefix-xor of gathered rows.
    """
    k = packed.shape[0]
    total = (1 << k) - 1
    state = np.zeros(packed.shape[1], dtype=np.uint64)
    one = np.uint64(1)
    for start in range(0, total, _ENUM_CHUNK):
        count = min(_ENUM_CHUNK, total - start)
        idx = np.arange(start + 1, start + 1 + count, dtype=np.uint64)
        # ctz(x) = popcount(lowbit(x) - 1)
        flip = np.bitwise_count((idx & (~idx + one)) - one).astype(np.int64)
        chunk = packed[flip]
        np.bitwise_xor.accumulate(chunk, axis=0, out=chunk)
        chunk ^= state
        state = chunk[-1].copy()
        yield np.bitwise_count(chunk).sum(axis=1).astype(np.int64)


def min_distance(g) -> int:
    """Minimum Hamming weight over all nonzero codewords of row space(g).

    Requires full row rank and K <= MIN_DISTANCE_MAX_K; walks the 2^K - 1
    nonzero messages in Gray-code order on word-packed codewords.
    """
    g = np.atleast_2d(as_bits(g))
    k, n = g.shape
    if k > MIN_DISTANCE_MAX_K:
        raise ValueError(
            f"K={k} exceeds the exhaustive enumeration guard "
            f"(K <= {MIN_DISTANCE_MAX_K})"
        )
    rank, _ = systematic_rank(g)
    if rank != k:
        raise ValueError(f"generator matrix is rank-deficient: rank {rank} < K {k}")
    best = n + 1
    for weights in _nonzero_codeword_weights(_pack_rows(g)):
        best = min(best, int(weights.min()))
    return best


def systematic_rank(g) -> tuple[int, bool]:
    """GF(2) rank via Gaussian elimination, and whether g == [I_K | P]."""
    g = np.atleast_2d(as_bits(g))
    k, n = g.shape
    is_standard = k <= n and np.array_equal(g[:, :k], np.eye(k, dtype=np.uint8))
    r = g.copy()
    rank = 0
    for col in range(n):
        if rank == k:
            break
        pivots = np.nonzero(r[rank:, col])[0]
        if pivots.size == 0:
            continue
        piv = rank + pivots[0]
        if piv != rank:
            r[[rank, piv]] = r[[piv, rank]]
        hits = np.nonzero(r[rank + 1:, col])[0]
        if hits.size:
            r[rank + 1 + hits] ^= r[rank]
        rank += 1
    return rank, is_standard


def row_reduce(g, pivot_cols=None) -> tuple[np.ndarray, list[int]]:
    """Gauss-Jordan reduction; optionally restrict pivot search to given columns.

    Returns the reduced matrix and the pivot column list (length = rank).
    When pivot_cols is given, pivots are chosen in that column order.
    """
    r = np.atleast_2d(as_bits(g)).copy()
    k, n = r.shape
    cols = range(n) if pivot_cols is None else pivot_cols
    pivots: list[int] = []
    rank = 0
    for col in cols:
        if rank == k:
            break
        hit = np.nonzero(r[rank:, col])[0]
        if hit.size == 0:
            continue
        piv = rank + hit[0]
        if piv != rank:
            r[[rank, piv]] = r[[piv, rank]]
        others = np.nonzero(r[:, col])[0]
        others = others[others != rank]
        if others.size:
            r[others] ^= r[rank]
        pivots.append(col)
        rank += 1
    return r, pivots


def weight_distribution(g) -> np.ndarray:
    """Exact weight enumerator A_w for w = 0..N by exhaustive enumeration."""
    g = np.atleast_2d(as_bits(g))
    k, n = g.shape
    if k > MIN_DISTANCE_MAX_K:
        raise ValueError(f"K={k} exceeds the enumeration guard")
    counts = np.zeros(n + 1, dtype=np.int64)
    counts[0] = 1
    for weights in _nonzero_codeword_weights(_pack_rows(g)):
        counts += np.bincount(weights, minlength=n + 1)
    return counts


def save_matrix(path, g) -> None:
    """Write a bit matrix: header line "K N", then K rows of 0/1 digits."""
    g = np.atleast_2d(as_bits(g))
    k, n = g.shape
    with open(path, "w") as fh:
        fh.write(f"{k} {n}\n")
        for row in g:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def load_matrix(path) -> np.ndarray:
    """Read a bit matrix in the save_matrix format."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: expected header 'K N'")
        k, n = int(header[0]), int(header[1])
        rows = []
        for _ in range(k):
            row = [int(v) for v in fh.readline().split()]
            if len(row) != n:
                raise ValueError(f"{path}: row has {len(row)} entries, expected {n}")
            rows.append(row)
    return as_bits(rows)
