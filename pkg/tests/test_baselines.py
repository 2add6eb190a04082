import numpy as np
import pytest

from ecclearn import baselines, channel


def boxplus(a, b):
    """Exact check-node LLR combination, numerically stable."""
    m = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    return m + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


def mc_density_evolution(n, design_esn0_db, samples, seed):
    """Monte-Carlo mean-LLR evolution oracle; returns (means, standard errors)."""
    rng = np.random.default_rng(seed)
    sigma = channel.esn0_to_sigma(design_esn0_db)
    pools = [rng.normal(2.0 / sigma ** 2, 2.0 / sigma, size=samples)]
    while len(pools) < n:
        nxt = []
        for pool in pools:
            a = pool[rng.permutation(samples)]
            b = pool[rng.permutation(samples)]
            nxt.append(boxplus(a, b))
            a = pool[rng.permutation(samples)]
            b = pool[rng.permutation(samples)]
            nxt.append(a + b)
        pools = nxt
    means = np.array([p.mean() for p in pools])
    ses = np.array([p.std() / np.sqrt(samples) for p in pools])
    return means, ses


def test_bhattacharyya_base_case():
    prof = baselines.bhattacharyya_bec(1, 0.37)
    assert np.allclose(-prof.metric, [0.37])


def test_bhattacharyya_one_step():
    assert np.allclose(baselines.bhattacharyya_values(2, 0.5), [0.75, 0.25])


def test_bhattacharyya_matches_scalar_recursion():
    # independent oracle: per-index transform chain, most significant bit first
    def z_of(i, n_bits, z0):
        z = z0
        for b in range(n_bits - 1, -1, -1):
            z = z * z if (i >> b) & 1 else 2 * z - z * z
        return z

    for n in (2, 4, 8):
        bits = n.bit_length() - 1
        z = baselines.bhattacharyya_values(n, 0.4)
        for i in range(n):
            assert abs(z[i] - z_of(i, bits, 0.4)) < 1e-12


def test_bhattacharyya_sum_invariant():
    for z0 in (0.2, 0.5, 0.8):
        z = baselines.bhattacharyya_values(16, z0)
        assert abs(z.sum() - 16 * z0) < 1e-9


def test_bhattacharyya_rejects_bad_erasure():
    for z0 in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ValueError):
            baselines.bhattacharyya_bec(8, z0)


def test_dega_n2_identities():
    prof = baselines.dega_reliabilities(2, 1.0)
    m0 = 2.0 / channel.esn0_to_sigma(1.0) ** 2
    assert abs(prof.metric[1] - 2.0 * m0) < 1e-9
    assert prof.metric[0] < m0


def test_phi_inverse_roundtrip():
    x = np.concatenate([np.linspace(0.01, 9.9, 40), np.linspace(10.1, 900, 40)])
    back = baselines._phi_inv(baselines._phi(x))
    assert np.max(np.abs(back - x) / x) < 1e-6


def test_dega_ordering_matches_mc_oracle_n16():
    design = 1.5
    prof = baselines.dega_reliabilities(16, design)
    means, ses = mc_density_evolution(16, design, 1_000_000, seed=42)
    noise = 6.0 * ses  # generous: resolves everything except near-ties
    for i in range(16):
        for j in range(16):
            gap = means[j] - means[i]
            if gap > noise[i] + noise[j]:
                assert prof.metric[j] > prof.metric[i], (i, j, gap)


def test_pw_values():
    prof = baselines.pw_reliabilities(8)
    assert prof.metric[0] == 0.0
    assert abs(prof.metric[3] - (1.0 + 2.0 ** 0.25)) < 1e-12


def test_pw_strictly_increasing_on_bit_flip():
    prof = baselines.pw_reliabilities(64)
    for i in range(64):
        for b in range(6):
            if not (i >> b) & 1:
                assert prof.metric[i | (1 << b)] > prof.metric[i]


def test_profiles_are_permutations():
    for prof in (baselines.bhattacharyya_bec(32, 0.5),
                 baselines.dega_reliabilities(32, 2.0),
                 baselines.pw_reliabilities(32)):
        assert sorted(prof.order.tolist()) == list(range(32))


def test_rm_polar_full_rate_and_single_bit():
    prof = baselines.pw_reliabilities(16)
    assert baselines.rm_polar_select(16, 16, prof).info_set == tuple(range(16))
    assert baselines.rm_polar_select(16, 1, prof).info_set == (15,)


def test_rm_polar_128_64_distance_vs_dega():
    # decreasing monomial codes: min distance is 2^(min index weight)
    rm_polar = baselines.rm_polar_select(128, 64, baselines.pw_reliabilities(128))
    dega = baselines.dega_reliabilities(128, 0.49).top_k(64)
    for code, expected in ((rm_polar, 16), (dega, 8)):
        wts = [bin(i).count("1") for i in code.info_set]
        assert 2 ** min(wts) == expected


def test_upo_quoted_pair():
    assert baselines.upo_dominates(15, 43, 7)
    assert not baselines.upo_dominates(43, 15, 7)


def test_upo_reflexive():
    for i in (0, 5, 21, 127):
        assert baselines.upo_dominates(i, i, 7)


def test_upo_elementary_moves():
    # flipping any 0 to 1 dominates; moving a 1 left dominates
    assert baselines.upo_dominates(0b0101, 0b1101, 4)
    assert baselines.upo_dominates(0b0011, 0b0101, 4)
    assert not baselines.upo_dominates(0b0101, 0b0011, 4)


def test_upo_never_contradicted_by_z_or_dega():
    z = baselines.bhattacharyya_values(64, 0.5)
    m = baselines.dega_reliabilities(64, 2.0).metric
    m_low = baselines.dega_reliabilities(64, -3.0).metric
    for i in range(64):
        for j in range(64):
            if baselines.upo_dominates(i, j, 6):
                assert z[j] <= z[i] + 1e-12
                assert m[j] >= m[i] - 1e-9
                assert m_low[j] >= m_low[i] - 1e-9


def test_bhattacharyya_and_dega_orderings_agree_mostly():
    # report near-tie disagreements without failing
    for n in (16, 32):
        zprof = baselines.bhattacharyya_bec(n, 0.5)
        dprof = baselines.dega_reliabilities(n, 1.5)
        zr, dr = zprof.rank(), dprof.rank()
        disagreements = int((zr != dr).sum())
        if disagreements:
            print(f"N={n}: {disagreements} rank disagreements (near ties)")


def test_profile_csv_dump(tmp_path):
    prof = baselines.pw_reliabilities(16)
    path = tmp_path / "profile.csv"
    baselines.save_profile_csv(path, prof)
    lines = path.read_text().splitlines()
    assert lines[0] == "index,metric,rank"
    assert len(lines) == 17
    ranks = sorted(int(line.split(",")[2]) for line in lines[1:])
    assert ranks == list(range(16))


def test_design_search_returns_grid_argmin():
    from ecclearn import evaluate
    budget = evaluate.EvalBudget(seed=55, min_error_events=300,
                                 max_frames=60000)
    dec = evaluate.DecoderSpec("sc")
    # three-point grid: verify the winner beats every competitor it saw
    result = baselines.design_snr_search(16, 8, dec, budget, grid_lo=-14.0,
                                         grid_hi=-9.0, grid_step=2.5,
                                         search_lo=-2.0)
    assert result.code.k == 8
    competitors = []
    d = -14.0
    while d <= -9.0 + 1e-9:
        code = baselines.dega_reliabilities(16, d).top_k(8)
        if code.info_set != result.code.info_set:
            competitors.append(code)
        d += 2.5
    from ecclearn.channel import derive_seed
    for code in competitors:
        b = evaluate.EvalBudget(derive_seed(56, str(code.info_set)),
                                min_error_events=300, max_frames=60000)
        req = evaluate.required_esn0(code, dec, b, scan_lo=-2.0)
        assert result.required_esn0_db <= req + 0.15


def test_design_search_degenerate_grid():
    from ecclearn import evaluate
    budget = evaluate.EvalBudget(seed=57, min_error_events=200,
                                 max_frames=40000)
    result = baselines.design_snr_search(16, 8, evaluate.DecoderSpec("sc"),
                                         budget, grid_lo=1.49, grid_hi=1.49)
    assert result.design_esn0_db == 1.49
    assert result.code.info_set == \
        baselines.dega_reliabilities(16, 1.49).top_k(8).info_set


def test_design_search_finds_table_anchor_construction():
    # converted design point: 4.50 dB quoted on the 1/sigma^2 axis
    from ecclearn import evaluate
    anchor = baselines.dega_reliabilities(16, 4.50 - 10 * np.log10(2)).top_k(8)
    budget = evaluate.EvalBudget(seed=58, min_error_events=400,
                                 max_frames=60000)
    result = baselines.design_snr_search(16, 8, evaluate.DecoderSpec("sc"),
                                         budget, grid_lo=-20.0, grid_hi=6.0,
                                         grid_step=0.25, search_lo=-2.0)
    assert result.code.info_set == anchor.info_set


def test_design_search_budget_exhausted_flag():
    # the (32,16) grid holds more than one distinct construction, so a
    # one-evaluation budget must return early with the flag set
    from ecclearn import evaluate
    budget = evaluate.EvalBudget(seed=59, min_error_events=100,
                                 max_frames=20000)
    result = baselines.design_snr_search(32, 16, evaluate.DecoderSpec("sc"),
                                         budget, grid_lo=-20.0, grid_hi=6.0,
                                         grid_step=0.25, search_lo=-4.0,
                                         max_evaluations=1)
    assert result.exhausted
    assert result.code.k == 16
