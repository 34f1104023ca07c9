"""CSV/structured-text assembly of pipeline results.

Layouts: per-method cost components and relative errors (table-2 style),
per-agent R-squared per method (table-1 style), per-phase timing, and the
per-round acceptance log. All numeric formatting is explicit so identical
inputs always produce identical bytes.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..energy.costs import COMPONENT_NAMES
from .pipeline import PipelineReport

F = "{:.10g}".format


def write_cost_table(report: PipelineReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["scenario_seed", "method", *COMPONENT_NAMES, "total",
                    "rel_error_vs_central", "slack_total", "verified"])
        for row in report.cost_rows:
            costs = [F(row.costs.get(k, np.nan)) for k in COMPONENT_NAMES]
            w.writerow([row.scenario_seed, row.method, *costs,
                        F(row.costs.get("total", np.nan)),
                        F(row.rel_error) if np.isfinite(row.rel_error) else "",
                        F(row.slack_total), int(row.verified)])


def write_r2_table(report: PipelineReport, path) -> None:
    agents = sorted({a for per in report.r2.values() for a in per})
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["method", *agents, "mean"])
        for method, per in report.r2.items():
            vals = [per[a] for a in agents]
            w.writerow([method, *[F(v) for v in vals], F(float(np.mean(vals)))])


def write_round_log(report: PipelineReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "agent", "I", "T", "S", "C", "accepted",
                    "participating"])
        for row in report.round_rows:
            w.writerow([row["round"], row["agent"],
                        *(F(row[k]) if np.isfinite(row[k]) else ""
                          for k in ("I", "T", "S", "C")),
                        int(row["accepted"]), int(row["participating"])])


def write_timing(report: PipelineReport, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["phase", "median_seconds"])
        for phase, sec in report.timing.items():
            w.writerow([phase, F(sec)])
        if np.isfinite(report.speedup):
            w.writerow(["speedup_central_over_pipeline", F(report.speedup)])


def write_acceptance(report: PipelineReport, path) -> None:
    doc = {"acceptance_rates": {k: round(v, 6)
                                for k, v in sorted(report.acceptance.items())}}
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def write_all(report: PipelineReport, outdir) -> dict:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "costs": outdir / "cost_table.csv",
        "r2": outdir / "r2_table.csv",
        "rounds": outdir / "round_log.csv",
        "timing": outdir / "timing.csv",
        "acceptance": outdir / "acceptance.json",
    }
    write_cost_table(report, paths["costs"])
    write_r2_table(report, paths["r2"])
    write_round_log(report, paths["rounds"])
    write_timing(report, paths["timing"])
    write_acceptance(report, paths["acceptance"])
    return paths


def consolidate(indirs, outdir) -> Path:
    """Pure consolidation of previously written tables into one report
    file; a deterministic function of the input bytes."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    out = outdir / "report.txt"
    chunks = []
    for d in indirs:
        d = Path(d)
        for name in ("r2_table.csv", "cost_table.csv", "timing.csv",
                     "round_log.csv", "acceptance.json"):
            f = d / name
            if f.exists():
                chunks.append(f"== {name} ({d.name}) ==")
                chunks.append(f.read_text().rstrip("\n"))
    out.write_text("\n".join(chunks) + "\n")
    return out
