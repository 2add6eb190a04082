"""Render experiment CSVs into deterministic SVG/PNG figures.

Four figure kinds, each tied to one CSV schema produced by the
experiment harness:

  bler_curves   comparison rows: one log-scale BLER curve per code_id,
                with 95% confidence whiskers.
  evolution     per-iteration traces (fitness products on a log axis,
                rewards on a linear axis).
  info_diff     learned vs reference membership: +1 stems where only
                the learned set has the position, -1 where only the
                reference does.
  relative_esn0 per-dimension SNR deltas; positive bars mean the
                learned construction needs less SNR.

Figures carry no timestamps, so identical inputs give identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "eccreports"

import matplotlib.pyplot as plt

KINDS = ("bler_curves", "evolution", "info_diff", "relative_esn0")

SCHEMAS = {
    "bler_curves": ("code_id", "decoder", "esn0_db", "frames", "errors",
                    "bler", "ci_halfwidth", "seed"),
    "info_diff": ("index", "learned", "reference"),
    "relative_esn0": ("k", "learned_esn0_db", "baseline_esn0_db"),
}


class SchemaError(Exception):
    pass


def read_rows(path) -> tuple[list[str], list[dict]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file, no header row")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return list(reader.fieldnames), rows


def _require_columns(path, fields, required) -> None:
    for column in required:
        if column not in fields:
            raise SchemaError(f"{path}: missing required column '{column}'")


def _save(fig, out_path) -> None:
    out = Path(out_path)
    fmt = out.suffix.lstrip(".").lower() or "svg"
    fig.savefig(out, format=fmt, metadata={"Date": None} if fmt == "svg"
                else None)
    plt.close(fig)


def render_bler_curves(csv_paths, out_path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for path in csv_paths:
        fields, rows = read_rows(path)
        _require_columns(path, fields, SCHEMAS["bler_curves"])
        series: dict[str, list] = {}
        for row in rows:
            series.setdefault(row["code_id"], []).append(
                (float(row["esn0_db"]), float(row["bler"]),
                 float(row["ci_halfwidth"])))
        for code_id in sorted(series):
            pts = sorted(series[code_id])
            x = [p[0] for p in pts]
            y = [max(p[1], 1e-12) for p in pts]
            err = [p[2] for p in pts]
            ax.errorbar(x, y, yerr=err, marker="o", capsize=3, label=code_id)
    ax.set_yscale("log")
    ax.set_xlabel("Es/N0 (dB)")
    ax.set_ylabel("block error rate")
    ax.grid(True, which="both", alpha=0.4)
    ax.legend()
    if title:
        ax.set_title(title)
    _save(fig, out_path)


def render_evolution(csv_paths, out_path, title: str = "") -> None:
    """Fitness-like series go on a log axis; everything else (rewards,
    set-difference counts) on a linear axis, twinned when both appear."""
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    log_series, lin_series = [], []
    for path in csv_paths:
        fields, rows = read_rows(path)
        x_col = next((c for c in ("iteration", "episode") if c in fields), None)
        if x_col is None:
            raise SchemaError(f"{path}: missing required column 'iteration'")
        x = [float(r[x_col]) for r in rows]
        for col in fields:
            if col == x_col:
                continue
            try:
                y = [float(r[col]) for r in rows]
            except (TypeError, ValueError):
                continue
            if "fitness" in col and all(v > 0 for v in y):
                log_series.append((col, x, y))
            else:
                lin_series.append((col, x, y))
    handles = []
    if log_series:
        ax.set_yscale("log")
        ax.set_ylabel("fitness")
        for col, x, y in log_series:
            handles += ax.plot(x, y, label=col)
        lin_ax = ax.twinx() if lin_series else None
    else:
        lin_ax = ax
    if lin_series:
        for col, x, y in lin_series:
            handles += lin_ax.plot(x, y, linestyle="--", label=col)
    ax.set_xlabel("iteration")
    ax.grid(True, alpha=0.4)
    ax.legend(handles, [h.get_label() for h in handles])
    if title:
        ax.set_title(title)
    _save(fig, out_path)


def render_info_diff(csv_paths, out_path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    for path in csv_paths:
        fields, rows = read_rows(path)
        _require_columns(path, fields, SCHEMAS["info_diff"])
        idx, diff = [], []
        for row in rows:
            learned = int(row["learned"])
            reference = int(row["reference"])
            if learned != reference:
                idx.append(int(row["index"]))
                diff.append(1 if learned else -1)
        if idx:
            markers, stems, base = ax.stem(idx, diff)
            plt.setp(stems, linewidth=1.2)
        ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_ylim(-1.5, 1.5)
    ax.set_xlabel("subchannel index")
    ax.set_ylabel("learned (+1) vs reference (-1)")
    ax.grid(True, alpha=0.4)
    if title:
        ax.set_title(title)
    _save(fig, out_path)


def render_relative_esn0(csv_paths, out_path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for path in csv_paths:
        fields, rows = read_rows(path)
        _require_columns(path, fields, SCHEMAS["relative_esn0"])
        k = [int(r["k"]) for r in rows]
        gain = [float(r["baseline_esn0_db"]) - float(r["learned_esn0_db"])
                for r in rows]
        ax.bar(k, gain, width=0.8)
    ax.axhline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("code dimension K")
    ax.set_ylabel("SNR gain over baseline (dB)")
    ax.grid(True, axis="y", alpha=0.4)
    if title:
        ax.set_title(title)
    _save(fig, out_path)


_RENDERERS = {
    "bler_curves": render_bler_curves,
    "evolution": render_evolution,
    "info_diff": render_info_diff,
    "relative_esn0": render_relative_esn0,
}


def render(kind: str, csv_paths, out_path, title: str = "") -> None:
    if kind not in _RENDERERS:
        raise SchemaError(f"unknown figure kind {kind!r}; choose from {KINDS}")
    _RENDERERS[kind](csv_paths, out_path, title)
