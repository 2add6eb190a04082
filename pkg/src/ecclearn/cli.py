"""Command-line harness: named experiments from flat INI configs.

Each run writes a manifest (config echo, package version, root seed)
next to its artifact files; the manifest is flagged complete only after
the run finishes, so interrupted runs are identifiable. All randomness
descends from one root seed through labeled substreams.

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, baselines, evaluate, genetic, gf2, linear, polar, rl
from .channel import derive_seed

KINDS = ("evaluate", "genetic", "pg", "a2c", "baseline", "sweep", "compare")

COMPARE_CSV_FIELDS = ["code_id", "decoder", "esn0_db", "frames", "errors",
                      "bler", "ci_halfwidth", "seed"]
INFO_DIFF_FIELDS = ["index", "learned", "reference"]
PG_TRACE_FIELDS = ["iteration", "mean_reward", "best_reward"]


class ConfigError(Exception):
    pass


def load_config(path) -> dict:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    return {section: dict(parser.items(section)) for section in parser.sections()}


def save_config(path, cfg: dict) -> None:
    parser = configparser.ConfigParser()
    for section, values in cfg.items():
        parser[section] = {k: str(v) for k, v in values.items()}
    with open(path, "w") as fh:
        parser.write(fh)


def _section(cfg: dict, name: str, required: bool = True) -> dict:
    if name not in cfg:
        if required:
            raise ConfigError(f"missing [{name}] section")
        return {}
    return cfg[name]


def _get(sec: dict, section: str, key: str, cast, default=None):
    if key not in sec:
        if default is not None:
            return default
        raise ConfigError(f"missing key '{key}' in [{section}]")
    try:
        return cast(sec[key])
    except ValueError as exc:
        raise ConfigError(f"bad value for '{key}' in [{section}]: {exc}") from exc


def _parse_bool(v: str) -> bool:
    lv = v.strip().lower()
    if lv in ("1", "true", "yes", "on"):
        return True
    if lv in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _decoder_from(cfg: dict) -> evaluate.DecoderSpec:
    sec = _section(cfg, "decoder")
    kind = _get(sec, "decoder", "kind", str)
    try:
        return evaluate.DecoderSpec(kind,
                                    list_size=_get(sec, "decoder", "list_size", int, 1),
                                    order=_get(sec, "decoder", "order", int, 2))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _budget_from(cfg: dict, seed: int) -> evaluate.EvalBudget:
    sec = _section(cfg, "budget", required=False)
    try:
        return evaluate.EvalBudget(
            seed=seed,
            min_error_events=_get(sec, "budget", "min_error_events", int, 1000),
            max_frames=_get(sec, "budget", "max_frames", int, 1_000_000),
            batch_frames=_get(sec, "budget", "batch_frames", int, 4096))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _load_code(cfg: dict):
    sec = _section(cfg, "code")
    ctype = _get(sec, "code", "type", str)
    if ctype == "polar_file":
        path = Path(_get(sec, "code", "file", str))
        if not path.exists():
            raise ConfigError(f"construction file not found: {path}")
        return polar.load_construction(path)
    if ctype == "matrix_file":
        path = Path(_get(sec, "code", "file", str))
        if not path.exists():
            raise ConfigError(f"matrix file not found: {path}")
        return linear.LinearCode(gf2.load_matrix(path))
    if ctype == "polar":
        n = _get(sec, "code", "n", int)
        k = _get(sec, "code", "k", int)
        method = _get(sec, "code", "construction", str, "dega")
        profile = _profile(method, n, sec)
        return profile.top_k(k)
    raise ConfigError(f"unknown code type {ctype!r}")


def _profile(method: str, n: int, sec: dict) -> baselines.ReliabilityProfile:
    if method == "dega":
        return baselines.dega_reliabilities(
            n, _get(sec, "code", "design_esn0_db", float))
    if method == "pw":
        return baselines.pw_reliabilities(n)
    if method == "bhattacharyya":
        return baselines.bhattacharyya_bec(
            n, _get(sec, "code", "design_erasure", float, 0.5))
    raise ConfigError(f"unknown construction method {method!r}")


def _esn0_points(cfg: dict) -> list[float]:
    sec = _section(cfg, "channel")
    if "esn0_grid" in sec:
        try:
            lo, hi, step = (float(v) for v in sec["esn0_grid"].split(":"))
        except ValueError as exc:
            raise ConfigError(f"esn0_grid must be 'lo:hi:step': {exc}") from exc
        points = []
        v = lo
        while v <= hi + 1e-9:
            points.append(round(v, 6))
            v += step
        return points
    return [_get(sec, "channel", "esn0_db", float)]


def _write_manifest(out_dir: Path, cfg: dict, seed: int, completed: bool) -> None:
    manifest = {
        "version": __version__,
        "seed": seed,
        "completed": completed,
        "config": cfg,
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _code_id(code) -> str:
    if isinstance(code, polar.PolarCode):
        return f"polar_n{code.n}_k{code.k}"
    return f"linear_n{code.n}_k{code.k}"


def _run_evaluate(cfg: dict, seed: int, out_dir: Path, workers: int) -> None:
    code = _load_code(cfg)
    decoder = _decoder_from(cfg)
    rows = []
    for i, esn0 in enumerate(_esn0_points(cfg)):
        budget = _budget_from(cfg, derive_seed(seed, f"channel:{i}"))
        est = evaluate.estimate_bler(code, decoder, esn0, budget, workers)
        rows.append((_code_id(code), decoder.label(), est, budget.seed))
    evaluate.write_bler_csv(out_dir / "bler.csv", rows)


def _run_sweep(cfg: dict, seed: int, out_dir: Path, workers: int) -> None:
    _run_evaluate(cfg, seed, out_dir, workers)


def _run_baseline(cfg: dict, seed: int, out_dir: Path, workers: int) -> None:
    sec = _section(cfg, "code")
    n = _get(sec, "code", "n", int)
    method = _get(sec, "code", "construction", str)
    if method == "rm_polar":
        profile = baselines.pw_reliabilities(n)
        code = baselines.rm_polar_select(n, _get(sec, "code", "k", int), profile)
    else:
        profile = _profile(method, n, sec)
        code = profile.top_k(_get(sec, "code", "k", int))
    baselines.save_profile_csv(out_dir / "profile.csv", profile)
    polar.save_construction(out_dir / "construction.txt", code)


def _run_genetic(cfg: dict, seed: int, out_dir: Path, workers: int) -> None:
    sec = _section(cfg, "genetic")
    code_sec = _section(cfg, "code")
    n = _get(code_sec, "code", "n", int)
    k = _get(code_sec, "code", "k", int)
    pair = _get(sec, "genetic", "snr_pair", str)
    try:
        snr_pair = tuple(float(v) for v in pair.split(","))
    except ValueError as exc:
        raise ConfigError(f"snr_pair must be 'lo,hi': {exc}") from exc
    try:
        gcfg = genetic.GeneticConfig(
            m=_get(sec, "genetic", "m", int),
            alpha=_get(sec, "genetic", "alpha", float),
            beta=_get(sec, "genetic", "beta", float),
            snr_pair=snr_pair,
            t_max=_get(sec, "genetic", "t_max", int),
            seed=derive_seed(seed, "population"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    reference = None
    if "reference" in sec and sec["reference"]:
        ref_path = Path(sec["reference"])
        if not ref_path.exists():
            raise ConfigError(f"reference construction not found: {ref_path}")
        reference = polar.load_construction(ref_path).info_set
    stop = _get(sec, "genetic", "stop_on_reference", _parse_bool, False)
    budget = _budget_from(cfg, 0)
    decoder = _decoder_from(cfg)
    result = genetic.run_genetic(gcfg, n, k, decoder, budget, reference,
                                 stop_on_reference=stop, workers=workers)
    genetic.write_trace_csv(out_dir / "trace.csv", result.trace)
    polar.save_construction(out_dir / "construction.txt",
                            polar.PolarCode(n, result.best_set))
    if reference is not None:
        _write_info_diff(out_dir / "info_diff.csv", n, result.best_set, reference)
    with open(out_dir / "result.json", "w") as fh:
        json.dump({"best_fitness": result.best_fitness,
                   "iterations_used": result.iterations_used,
                   "converged_at": result.converged_at}, fh, indent=2)
        fh.write("\n")


def _write_info_diff(path, n: int, learned, reference) -> None:
    lset, rset = set(learned), set(reference)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(INFO_DIFF_FIELDS)
        for i in range(n):
            writer.writerow([i, int(i in lset), int(i in rset)])


def _run_pg(cfg: dict, seed: int, out_dir: Path, workers: int) -> None:
    sec = _section(cfg, "pg")
    code_sec = _section(cfg, "code")
    try:
        pcfg = rl.PgConfig(
            k=_get(code_sec, "code", "k", int),
            n=_get(code_sec, "code", "n", int),
            batch_size=_get(sec, "pg", "batch_size", int, 1024),
            learning_rate=_get(sec, "pg", "learning_rate", float, 1e-5),
            sigma2=_get(sec, "pg", "sigma2", float, 0.1),
            seed=derive_seed(seed, "policy"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    budget = _budget_from(cfg, 0)
    decoder = _decoder_from(cfg)
    result = rl.run_pg(pcfg, decoder, budget,
                       iterations=_get(sec, "pg", "iterations", int),
                       workers=workers)
    with open(out_dir / "trace.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PG_TRACE_FIELDS)
        for i, (mean_r, best_r) in enumerate(zip(result.mean_reward_trace,
                                                 result.best_reward_trace)):
            writer.writerow([i, repr(mean_r), repr(best_r)])
    gf2.save_matrix(out_dir / "generator.txt", result.best_code.g)


def _run_a2c(cfg: dict, seed: int, out_dir: Path, workers: int) -> None:
    sec = _section(cfg, "a2c")
    code_sec = _section(cfg, "code")
    try:
        acfg = rl.A2cConfig(
            n=_get(code_sec, "code", "n", int),
            k_low=_get(sec, "a2c", "k_low", int),
            k_high=_get(sec, "a2c", "k_high", int),
            esn0_db=_get(sec, "a2c", "esn0_db", float),
            batch_size=_get(sec, "a2c", "batch_size", int, 32),
            actor_lr=_get(sec, "a2c", "actor_lr", float, 1e-3),
            critic_lr=_get(sec, "a2c", "critic_lr", float, 2e-3),
            gamma=_get(sec, "a2c", "gamma", float, 0.2),
            preset_style=_get(sec, "a2c", "preset_style", str, "short"),
            seed=derive_seed(seed, "policy"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    budget = _budget_from(cfg, 0)
    decoder = _decoder_from(cfg)
    result = rl.run_a2c(acfg, decoder, budget,
                        episodes=_get(sec, "a2c", "episodes", int),
                        workers=workers)
    rl.write_a2c_trace_csv(out_dir / "trace.csv", result.trace)
    rl.save_sequence(out_dir / "sequence.txt", acfg.n, acfg.k_low, acfg.k_high,
                     result.sequence)


def _run_compare(cfg: dict, seed: int, out_dir: Path, workers: int) -> None:
    sec = _section(cfg, "compare")
    files = [p.strip() for p in _get(sec, "compare", "files", str).split(",")]
    if not files:
        raise ConfigError("compare needs at least one construction file")
    shared = _get(sec, "compare", "shared_seed", _parse_bool, False)
    codes = []
    for path in files:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"construction file not found: {p}")
        codes.append((p.stem, polar.load_construction(p)))
    shape = {(c.n, c.k) for _, c in codes}
    if len(shape) > 1:
        raise ConfigError(f"constructions disagree on (N, K): {sorted(shape)}")
    decoder = _decoder_from(cfg)
    points = _esn0_points(cfg)
    rows = compare_constructions(codes, decoder, points,
                                 _budget_from(cfg, seed), shared_seed=shared,
                                 workers=workers)
    with open(out_dir / "comparison.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COMPARE_CSV_FIELDS)
        writer.writerows(rows)


def compare_constructions(codes, decoder, esn0_points, budget,
                          shared_seed: bool = False, workers: int = 1) -> list:
    """One measured row per (construction, SNR point).

    With shared_seed, every construction sees identical noise at a given
    point (paired comparison); otherwise each (construction, point) pair
    draws an independent substream.
    """
    rows = []
    for name, code in codes:
        for i, esn0 in enumerate(esn0_points):
            label = f"point:{i}" if shared_seed else f"point:{i}:{name}"
            sub = evaluate.EvalBudget(derive_seed(budget.seed, label),
                                      budget.min_error_events,
                                      budget.max_frames, budget.batch_frames)
            est = evaluate.estimate_bler(code, decoder, esn0, sub, workers)
            rows.append([name, decoder.label(), repr(float(esn0)), est.frames,
                         est.errors, repr(est.bler), repr(est.halfwidth),
                         sub.seed])
    return rows


_RUNNERS = {
    "evaluate": _run_evaluate,
    "sweep": _run_sweep,
    "baseline": _run_baseline,
    "genetic": _run_genetic,
    "pg": _run_pg,
    "a2c": _run_a2c,
    "compare": _run_compare,
}


def run_experiment(kind: str, cfg: dict, seed: int, out_dir: Path,
                   workers: int = 1) -> None:
    if kind not in _RUNNERS:
        raise ConfigError(f"unknown experiment kind {kind!r}")
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_manifest(out_dir, cfg, seed, completed=False)
    _RUNNERS[kind](cfg, seed, out_dir, workers)
    _write_manifest(out_dir, cfg, seed, completed=True)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ecclearn",
        description="Construct and evaluate error-correction codes")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind)
        sp.add_argument("--config", required=True, help="INI config file")
        sp.add_argument("--seed", type=int, default=None,
                        help="root seed override")
        sp.add_argument("--out", default=None, help="output directory override")
        sp.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        exp = _section(cfg, "experiment", required=False)
        declared = exp.get("kind")
        if declared is not None and declared != args.kind:
            raise ConfigError(
                f"config declares kind {declared!r}, command line says "
                f"{args.kind!r}")
        out_sec = _section(cfg, "output", required=False)
        seed = args.seed if args.seed is not None else int(out_sec.get("seed", 0))
        out_dir = Path(args.out if args.out is not None
                       else out_sec.get("dir", "out"))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    try:
        run_experiment(args.kind, cfg, seed, out_dir, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - runtime failures exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
