"""CSV, summary and manifest files for Monte-Carlo results.

All numbers are written with ``%.9g`` so identical inputs give identical bytes.
"""

import json
import os
from dataclasses import asdict

import numpy as np

from .errors import IoError
from .harness import METRIC_KEYS, SummaryStats, rates_hz

FMT = "%.9g"

AXES = ("x", "y", "z")
EULER = ("roll", "pitch", "yaw")
CSV_COLUMNS = (
    ["t"]
    + [f"p_{a}" for a in AXES]
    + [f"p_r_{a}" for a in AXES]
    + [f"euler_deg_{a}" for a in EULER]
    + [f"euler_r_deg_{a}" for a in EULER]
    + [f"u_{i}" for i in range(1, 7)]
    + [f"rates_hz_{i}" for i in range(1, 7)]
    + [f"wind_{a}" for a in AXES]
    + ["e_p", "e_a_deg", "u_n", "u_e"]
)

TABLE_ORDER = ("FC-ideal", "FC-A", "HC-A", "FC-B", "HC-B", "FC-C", "HC-C")
ROW_LABELS = {
    "e_p": "e_p [m]",
    "e_a": "e_a [deg]",
    "u_n": "u_n [Hz]",
    "u_n_sq": "u_n^2 [Hz^2]",
    "u_e": "u_e [Hz]",
}


def run_filename(rec):
    return f"{rec.controller}_{rec.scenario}_seed{rec.seed}.csv"


def run_table(rec):
    """Per-tick rows of a run as an (n, 46) array, columns as in CSV_COLUMNS."""
    n = len(rec.t)
    cols = [
        rec.t[:, None],
        rec.p,
        rec.p_r,
        rec.euler_deg,
        rec.euler_r_deg,
        rec.u,
        rates_hz(rec.u),
        rec.wind,
        rec.e_p[:, None],
        rec.e_a_deg[:, None],
        rec.u_n[:, None],
        rec.u_e[:, None],
    ]
    return np.hstack([np.asarray(c, dtype=float).reshape(n, -1) for c in cols])


def write_run_csv(rec, path):
    lines = [",".join(CSV_COLUMNS)]
    for row in run_table(rec):
        lines.append(",".join(FMT % v for v in row))
    _write_text(path, "\n".join(lines) + "\n")


def _write_text(path, text):
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def stats_to_dict(stats):
    return {
        "controller": stats.controller,
        "scenario": stats.scenario,
        "label": stats.label,
        "runs": stats.runs,
        "diverged": stats.diverged,
        "ticks": stats.ticks,
        "sums": {k: stats.sums[k] for k in METRIC_KEYS},
        "means": stats.means,
        "max_e_p": stats.max_e_p,
        "divergence_times": list(stats.divergence_times),
    }


def stats_from_dict(d):
    return SummaryStats(
        controller=d["controller"],
        scenario=d["scenario"],
        runs=d["runs"],
        diverged=d["diverged"],
        ticks=d["ticks"],
        sums={k: float(d["sums"][k]) for k in METRIC_KEYS},
        max_e_p=float(d["max_e_p"]),
        divergence_times=list(d["divergence_times"]),
    )


def _label_key(label):
    return (TABLE_ORDER.index(label), label) if label in TABLE_ORDER else (len(TABLE_ORDER), label)


def format_table(stats_list):
    """Controller performance indexes: one column per controller/scenario pair."""
    stats_list = sorted(stats_list, key=lambda s: _label_key(s.label))
    header = [
        "# Mean performance indexes over post-take-off ticks (take-off transient excluded)",
        "# u_n: norm of the six rotor rates; u_n^2: norm of the squared rates",
        "",
    ]
    if not stats_list:
        return "\n".join(header + ["runs 0", "diverged 0", ""])
    width = 14
    lines = [f"{'index':<14}" + "".join(f"{s.label:>{width}}" for s in stats_list)]
    for key in METRIC_KEYS:
        cells = "".join(f"{FMT % s.means[key]:>{width}}" for s in stats_list)
        lines.append(f"{ROW_LABELS[key]:<14}" + cells)
    lines.append(f"{'runs':<14}" + "".join(f"{s.runs:>{width}d}" for s in stats_list))
    lines.append(f"{'diverged':<14}" + "".join(f"{s.diverged:>{width}d}" for s in stats_list))
    lines.append(f"{'max e_p [m]':<14}" + "".join(f"{FMT % s.max_e_p:>{width}}" for s in stats_list))
    return "\n".join(header + lines) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def _dump_json(path, data):
    _write_text(path, json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n")


def export(records, summary, out_dir, config=None):
    """Write one CSV per run plus ``summary.txt``/``summary.json`` and a manifest."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {out_dir}: {exc}") from exc
    files = []
    for rec in records:
        name = run_filename(rec)
        write_run_csv(rec, os.path.join(out_dir, name))
        files.append(name)
    stats = [summary] if summary is not None and summary.runs > 0 else []
    _write_text(os.path.join(out_dir, "summary.txt"), format_table(stats))
    _dump_json(os.path.join(out_dir, "summary.json"), stats_to_dict(summary) if stats else {"runs": 0, "diverged": 0})
    manifest = {
        "runs": [
            {
                "file": f,
                "seed": r.seed,
                "status": r.status,
                "divergence_time": r.divergence_time,
                "divergence_reason": r.divergence_reason,
            }
            for f, r in zip(files, records)
        ],
    }
    if config is not None:
        manifest["config"] = asdict(config)
    _dump_json(os.path.join(out_dir, "manifest.json"), manifest)
    return files


def collect(root):
    """Summaries of every result directory found under ``root``."""
    found = []
    for dirpath, _, names in sorted(os.walk(root)):
        if "summary.json" in names:
            with open(os.path.join(dirpath, "summary.json")) as fh:
                d = json.load(fh)
            if d.get("runs", 0) > 0:
                found.append(stats_from_dict(d))
    # one column per label: merge repeated groups
    merged = {}
    for s in found:
        merged[s.label] = merged[s.label].merge(s) if s.label in merged else s
    return list(merged.values())
