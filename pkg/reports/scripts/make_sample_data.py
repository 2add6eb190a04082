"""Regenerate the bundled sample CSVs with the primary package's harness.

Small, seeded runs; outputs land in reports/sample_data/. Run from the
repository root with the primary package installed.
"""

import csv
import sys
from pathlib import Path

from ecclearn import baselines, cli, evaluate, genetic, polar
from ecclearn.channel import derive_seed

OUT = Path(__file__).resolve().parent.parent / "sample_data"
OUT.mkdir(exist_ok=True)


def comparison_csv():
    dega = baselines.dega_reliabilities(16, 1.49).top_k(8)
    pw = baselines.pw_reliabilities(16).top_k(8)
    rows = cli.compare_constructions(
        [("dega_16_8", dega), ("pw_16_8", pw)],
        evaluate.DecoderSpec("scl_pm", list_size=4),
        [0.0, 0.5, 1.0, 1.5, 2.0, 2.5],
        evaluate.EvalBudget(seed=11, min_error_events=400, max_frames=200000),
        shared_seed=True)
    with open(OUT / "comparison.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(cli.COMPARE_CSV_FIELDS)
        writer.writerows(rows)


def genetic_trace_csv():
    dega = baselines.dega_reliabilities(16, 1.49).top_k(8)
    cfg = genetic.GeneticConfig(m=80, alpha=0.03, beta=0.01,
                                snr_pair=(-0.96, 1.44), t_max=150, seed=5)
    budget = evaluate.EvalBudget(seed=0, min_error_events=200,
                                 max_frames=20000, batch_frames=4096)
    res = genetic.run_genetic(cfg, 16, 8, evaluate.DecoderSpec("sc"), budget,
                              reference=dega.info_set)
    genetic.write_trace_csv(OUT / "genetic_trace.csv", res.trace)
    # a shorter run that has not converged yet makes a livelier diff figure
    short = genetic.GeneticConfig(m=40, alpha=0.03, beta=0.01,
                                  snr_pair=(-0.96, 1.44), t_max=25, seed=12)
    sbudget = evaluate.EvalBudget(seed=0, min_error_events=150,
                                  max_frames=12000, batch_frames=4096)
    sres = genetic.run_genetic(short, 16, 8, evaluate.DecoderSpec("sc"),
                               sbudget, reference=dega.info_set)
    return sres.best_set, dega.info_set


def info_diff_csv(learned, reference):
    cli._write_info_diff(OUT / "info_diff.csv", 16, learned, reference)


def relative_esn0_csv():
    dec = evaluate.DecoderSpec("sc")
    pw = baselines.pw_reliabilities(16)
    rows = []
    for k in range(4, 13):
        learned = pw.top_k(k)
        base = baselines.dega_reliabilities(16, 1.49).top_k(k)
        lb = evaluate.EvalBudget(derive_seed(21, f"l{k}"), 300, 120000, 4096)
        bb = evaluate.EvalBudget(derive_seed(21, f"b{k}"), 300, 120000, 4096)
        r_l = evaluate.required_esn0(learned, dec, lb, scan_lo=-6.0,
                                     scan_hi=16.0)
        r_b = evaluate.required_esn0(base, dec, bb, scan_lo=-6.0, scan_hi=16.0)
        rows.append([k, repr(r_l), repr(r_b)])
    with open(OUT / "relative_esn0.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "learned_esn0_db", "baseline_esn0_db"])
        writer.writerows(rows)


if __name__ == "__main__":
    comparison_csv()
    print("comparison.csv done", flush=True)
    learned, reference = genetic_trace_csv()
    print("genetic_trace.csv done", flush=True)
    info_diff_csv(learned, reference)
    print("info_diff.csv done", flush=True)
    relative_esn0_csv()
    print("relative_esn0.csv done", flush=True)
    sys.exit(0)
