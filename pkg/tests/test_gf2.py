import numpy as np
import pytest

from ecclearn import gf2


def test_matmul_identity():
    rng = np.random.default_rng(0)
    b = rng.integers(0, 2, size=(3, 4)).astype(np.uint8)
    out = gf2.matmul_gf2(np.eye(3, dtype=np.uint8), b)
    assert np.array_equal(out, b)


def test_matmul_hand_example():
    out = gf2.matmul_gf2(np.array([[1, 1]]), gf2.KERNEL)
    assert np.array_equal(out, np.array([[0, 1]]))


def test_matmul_zero():
    z = np.zeros((2, 2), dtype=np.uint8)
    rng = np.random.default_rng(1)
    b = rng.integers(0, 2, size=(2, 2)).astype(np.uint8)
    assert np.array_equal(gf2.matmul_gf2(z, b), z)


def test_matmul_rejects_mismatch():
    with pytest.raises(ValueError):
        gf2.matmul_gf2(np.zeros((2, 3), dtype=np.uint8),
                       np.zeros((2, 3), dtype=np.uint8))


def test_matmul_linearity():
    rng = np.random.default_rng(2)
    for _ in range(20):
        g = rng.integers(0, 2, size=(6, 9)).astype(np.uint8)
        u = rng.integers(0, 2, size=(1, 6)).astype(np.uint8)
        v = rng.integers(0, 2, size=(1, 6)).astype(np.uint8)
        lhs = gf2.matmul_gf2(u ^ v, g)
        rhs = gf2.matmul_gf2(u, g) ^ gf2.matmul_gf2(v, g)
        assert np.array_equal(lhs, rhs)


def test_kron_power_base_cases():
    assert np.array_equal(gf2.kron_power(gf2.KERNEL, 0), np.array([[1]]))
    assert np.array_equal(gf2.kron_power(gf2.KERNEL, 1), gf2.KERNEL)


def test_kron_power_hand_expansion():
    expected = np.array([[1, 0, 0, 0],
                         [1, 1, 0, 0],
                         [1, 0, 1, 0],
                         [1, 1, 1, 1]], dtype=np.uint8)
    assert np.array_equal(gf2.kron_power(gf2.KERNEL, 2), expected)


def test_kron_power_additive_in_exponent():
    for a, b in ((1, 2), (2, 1), (0, 3)):
        combined = gf2.kron_power(gf2.KERNEL, a + b)
        split = np.kron(gf2.kron_power(gf2.KERNEL, a),
                        gf2.kron_power(gf2.KERNEL, b))
        assert np.array_equal(combined, split)


def test_min_distance_identity_code():
    for k in (1, 3, 6):
        assert gf2.min_distance(np.eye(k, dtype=np.uint8)) == 1


def test_min_distance_repetition():
    assert gf2.min_distance(np.array([[1, 1, 1]])) == 3


def test_min_distance_guard_and_rank():
    with pytest.raises(ValueError, match="guard"):
        gf2.min_distance(np.eye(29, dtype=np.uint8))
    dep = np.array([[1, 0, 1], [1, 0, 1]], dtype=np.uint8)
    with pytest.raises(ValueError, match="rank"):
        gf2.min_distance(dep)


def test_min_distance_row_operation_invariant():
    rng = np.random.default_rng(3)
    g = rng.integers(0, 2, size=(5, 12)).astype(np.uint8)
    while gf2.systematic_rank(g)[0] < 5:
        g = rng.integers(0, 2, size=(5, 12)).astype(np.uint8)
    d = gf2.min_distance(g)
    for _ in range(10):
        h = g.copy()
        i, j = rng.choice(5, size=2, replace=False)
        h[i] ^= h[j]
        assert gf2.min_distance(h) == d


def test_min_distance_agrees_with_direct_enumeration():
    rng = np.random.default_rng(4)
    from tests.conftest import all_messages
    for _ in range(5):
        g = rng.integers(0, 2, size=(6, 10)).astype(np.uint8)
        if gf2.systematic_rank(g)[0] < 6:
            continue
        msgs = all_messages(6)[1:]
        weights = gf2.matmul_gf2(msgs, g).sum(axis=1)
        assert gf2.min_distance(g) == int(weights.min())


def test_systematic_rank_standard_form():
    rng = np.random.default_rng(5)
    p = rng.integers(0, 2, size=(4, 3)).astype(np.uint8)
    g = np.hstack([np.eye(4, dtype=np.uint8), p])
    assert gf2.systematic_rank(g) == (4, True)


def test_systematic_rank_duplicated_rows():
    g = np.array([[1, 0, 1, 1], [1, 0, 1, 1], [0, 1, 0, 0]], dtype=np.uint8)
    rank, standard = gf2.systematic_rank(g)
    assert rank == 2 and not standard


def test_systematic_rank_kernel_square():
    rank, standard = gf2.systematic_rank(gf2.kron_power(gf2.KERNEL, 2))
    assert rank == 4 and not standard


def test_weight_distribution_small_code():
    g = np.array([[1, 1, 0], [0, 1, 1]], dtype=np.uint8)
    assert list(gf2.weight_distribution(g)) == [1, 0, 3, 0]


def test_matrix_file_roundtrip(tmp_path):
    rng = np.random.default_rng(6)
    g = rng.integers(0, 2, size=(5, 9)).astype(np.uint8)
    path = tmp_path / "m.txt"
    gf2.save_matrix(path, g)
    first = path.read_text().splitlines()[0]
    assert first == "5 9"
    assert np.array_equal(gf2.load_matrix(path), g)
