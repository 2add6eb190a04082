import math

import numpy as np
import pytest
from scipy.stats import norm

from ecclearn import channel, evaluate, linear, polar

POLAR_16_8 = polar.PolarCode(16, (7, 9, 10, 11, 12, 13, 14, 15))
UNCODED_16 = linear.LinearCode(np.eye(16, dtype=np.uint8))
HARD = evaluate.DecoderSpec("osd", order=0)


def uncoded_bler(esn0_db: float, n: int) -> float:
    p = norm.sf(1.0 / channel.esn0_to_sigma(esn0_db))
    return 1.0 - (1.0 - p) ** n


def test_budget_validation():
    with pytest.raises(ValueError):
        evaluate.EvalBudget(seed=0, min_error_events=0)
    with pytest.raises(ValueError):
        evaluate.EvalBudget(seed=0, min_error_events=10, max_frames=5)


def test_decoder_spec_validation():
    with pytest.raises(ValueError):
        evaluate.DecoderSpec("bogus")
    with pytest.raises(ValueError):
        evaluate.DecoderSpec("scl_pm", list_size=0)


def test_incompatible_code_decoder_pairs():
    budget = evaluate.EvalBudget(seed=0, min_error_events=1, max_frames=10)
    with pytest.raises(ValueError):
        evaluate.estimate_bler(POLAR_16_8, HARD, 0.0, budget)
    with pytest.raises(ValueError):
        evaluate.estimate_bler(UNCODED_16, evaluate.DecoderSpec("sc"), 0.0, budget)


def test_noiseless_regime_zero_errors():
    budget = evaluate.EvalBudget(seed=1, min_error_events=10, max_frames=20000)
    for decoder, code in ((evaluate.DecoderSpec("sc"), POLAR_16_8),
                          (evaluate.DecoderSpec("scl_pm", list_size=4), POLAR_16_8)):
        est = evaluate.estimate_bler(code, decoder, 20.0, budget)
        assert est.errors == 0
        assert est.frames == budget.max_frames
        assert est.bler == 0.0


def test_estimate_is_deterministic():
    budget = evaluate.EvalBudget(seed=2, min_error_events=200, max_frames=50000)
    a = evaluate.estimate_bler(POLAR_16_8, evaluate.DecoderSpec("sc"), 2.0, budget)
    b = evaluate.estimate_bler(POLAR_16_8, evaluate.DecoderSpec("sc"), 2.0, budget)
    assert (a.frames, a.errors) == (b.frames, b.errors)


def test_worker_invariance():
    budget = evaluate.EvalBudget(seed=3, min_error_events=500, max_frames=50000)
    results = [evaluate.estimate_bler(UNCODED_16, HARD, 1.0, budget, workers=w)
               for w in (1, 4, 16)]
    counts = {(r.frames, r.errors) for r in results}
    assert len(counts) == 1


def test_uncoded_closed_form():
    budget = evaluate.EvalBudget(seed=4, min_error_events=2000, max_frames=200000)
    est = evaluate.estimate_bler(UNCODED_16, HARD, 0.0, budget)
    expected = uncoded_bler(0.0, 16)
    se = math.sqrt(expected * (1 - expected) / est.frames)
    assert abs(est.bler - expected) < 3 * se


def test_confidence_halfwidth_bound_at_stopping():
    budget = evaluate.EvalBudget(seed=5, min_error_events=1000, max_frames=10 ** 6)
    est = evaluate.estimate_bler(UNCODED_16, HARD, 2.0, budget)
    assert est.errors >= 1000
    assert est.halfwidth / est.bler <= 0.07


def test_bler_monotone_in_snr():
    ests = []
    for i, esn0 in enumerate(np.arange(-2.0, 3.0, 1.0)):
        budget = evaluate.EvalBudget(seed=100 + i, min_error_events=2000,
                                     max_frames=300000)
        ests.append(evaluate.estimate_bler(UNCODED_16, HARD, float(esn0), budget))
    for lo, hi in zip(ests, ests[1:]):
        se = math.sqrt(lo.bler * (1 - lo.bler) / lo.frames
                       + hi.bler * (1 - hi.bler) / hi.frames)
        assert hi.bler <= lo.bler + 3 * se


def test_fitness_product_values():
    budget = evaluate.EvalBudget(seed=6, min_error_events=100, max_frames=20000)
    fit = evaluate.fitness_product(UNCODED_16, HARD, (0.0, 2.0), budget)
    b1 = uncoded_bler(0.0, 16)
    b2 = uncoded_bler(2.0, 16)
    assert abs(fit - b1 * b2) < 0.25 * b1 * b2
    with pytest.raises(ValueError):
        evaluate.fitness_product(UNCODED_16, HARD, (2.0, 0.0), budget)


def test_fitness_product_zero_short_circuit():
    budget = evaluate.EvalBudget(seed=7, min_error_events=10, max_frames=5000)
    fit = evaluate.fitness_product(UNCODED_16, HARD, (20.0, 22.0), budget)
    assert fit == 0.0


def test_required_esn0_matches_uncoded_inversion():
    budget = evaluate.EvalBudget(seed=8, min_error_events=1000, max_frames=400000)
    req = evaluate.required_esn0(UNCODED_16, HARD, budget)
    p_target = 1.0 - (1.0 - 0.01) ** (1.0 / 16.0)
    sigma = 1.0 / norm.isf(p_target)
    closed = 10.0 * math.log10(1.0 / (2.0 * sigma * sigma))
    assert abs(req - closed) < 0.1


def test_required_esn0_reproducible():
    budget = evaluate.EvalBudget(seed=9, min_error_events=300, max_frames=100000)
    a = evaluate.required_esn0(POLAR_16_8, evaluate.DecoderSpec("sc"), budget)
    b = evaluate.required_esn0(POLAR_16_8, evaluate.DecoderSpec("sc"), budget)
    assert abs(a - b) < 1e-12


def test_required_esn0_unreachable_reports_bracket():
    budget = evaluate.EvalBudget(seed=10, min_error_events=50, max_frames=5000)
    with pytest.raises(ValueError, match="dB"):
        evaluate.required_esn0(UNCODED_16, HARD, budget, target_bler=1e-6,
                               scan_lo=-2.0, scan_hi=0.0)


def test_reward_kinds():
    assert evaluate.reward("neg_esn0", 3.5) == -3.5
    assert evaluate.reward("log_bler", evaluate.BlerEstimate(0.0, 100, 100)) == 0.0
    floored = evaluate.reward("log_bler", evaluate.BlerEstimate(0.0, 10 ** 5, 0))
    assert abs(floored - math.log(1e-5)) < 1e-12
    with pytest.raises(ValueError):
        evaluate.reward("bogus", 1.0)


def test_bler_csv_schema(tmp_path):
    est = evaluate.BlerEstimate(1.5, 1000, 31)
    path = tmp_path / "bler.csv"
    evaluate.write_bler_csv(path, [("c0", "sc", est, 17)])
    lines = path.read_text().splitlines()
    assert lines[0] == "code_id,decoder,esn0_db,frames,errors,bler,seed"
    fields = lines[1].split(",")
    assert fields[0] == "c0" and int(fields[3]) == 1000 and int(fields[4]) == 31


def test_required_esn0_dega_16_8_table_anchor():
    # design/required point 4.50 dB quoted on the 1/sigma^2 axis
    anchor = 4.50 - 10.0 * math.log10(2.0)
    budget = evaluate.EvalBudget(seed=11, min_error_events=1000,
                                 max_frames=300000)
    req = evaluate.required_esn0(POLAR_16_8, evaluate.DecoderSpec("sc"), budget)
    assert abs(req - anchor) < 0.3
