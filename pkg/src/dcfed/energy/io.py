"""File formats: system parameters as nested JSON, scenario series and
solution variable families as CSV."""

from __future__ import annotations

import csv
import dataclasses
import json
from pathlib import Path

import numpy as np

from .params import (
    DataCenterParams,
    EnergySystemModel,
    GeneratorParams,
    GridParams,
    Scenario,
    ScheduleSolution,
    StorageParams,
)


def save_system(system: EnergySystemModel, path) -> None:
    def enc(obj):
        d = dataclasses.asdict(obj)
        for k, v in d.items():
            if isinstance(v, np.ndarray):
                d[k] = v.tolist()
        return d

    doc = {
        "data_centers": [enc(dc) for dc in system.data_centers],
        "generators": [enc(g) for g in system.generators],
        "storages": [enc(s) for s in system.storages],
        "grid": enc(system.grid),
        "horizon_T": system.horizon_T,
        "delta_t": system.delta_t,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def load_system(path) -> EnergySystemModel:
    doc = json.loads(Path(path).read_text())

    def dc(d):
        if d.get("eta_factors") is not None:
            d = dict(d, eta_factors=np.asarray(d["eta_factors"]))
        return DataCenterParams(**d)

    return EnergySystemModel(
        data_centers=tuple(dc(d) for d in doc["data_centers"]),
        generators=tuple(GeneratorParams(**g) for g in doc["generators"]),
        storages=tuple(StorageParams(**s) for s in doc["storages"]),
        grid=GridParams(**doc["grid"]),
        horizon_T=doc["horizon_T"],
        delta_t=doc["delta_t"],
    )


def save_scenario(scenario: Scenario, path) -> None:
    n_dc, T = scenario.u_arrivals.shape
    header = ["t", "lambda_imp", "lambda_exp", "lambda_reg", "T_ambient",
              "L_base"] + [f"u_dc{k}" for k in range(n_dc)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for t in range(T):
            row = [t, scenario.lambda_imp[t], scenario.lambda_exp[t],
                   scenario.lambda_reg[t], scenario.T_ambient[t],
                   scenario.L_base[t]]
            row += [scenario.u_arrivals[k, t] for k in range(n_dc)]
            w.writerow([f"{v:.10g}" if isinstance(v, float) else v for v in row])


def load_scenario(path, seed: int = 0) -> Scenario:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    T = len(rows)
    dc_cols = sorted((k for k in rows[0] if k.startswith("u_dc")),
                     key=lambda s: int(s[4:]))
    get = lambda col: np.array([float(r[col]) for r in rows])
    return Scenario(
        lambda_imp=get("lambda_imp"),
        lambda_exp=get("lambda_exp"),
        lambda_reg=get("lambda_reg"),
        u_arrivals=np.vstack([get(c) for c in dc_cols]) if dc_cols else np.zeros((0, T)),
        T_ambient=get("T_ambient"),
        L_base=get("L_base"),
        seed=seed,
    )


_DC_FAMILIES = ("x", "r", "eta_eff", "r_eff", "q", "t_queue", "delta_sla",
                "p_dyn", "p_server", "p_cool", "q_cool", "temp", "p_grid")
_SYS_FAMILIES = ("p_imp", "p_exp", "delta_imp")
_UNIT_FAMILIES = ("p_gen", "z_st", "p_ch", "p_dch", "e_soc")


def save_solution(sol: ScheduleSolution, directory) -> None:
    """One CSV per variable family: columns unit,t,value."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for fam in _DC_FAMILIES + _UNIT_FAMILIES:
        arr = getattr(sol, fam)
        with open(directory / f"{fam}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["unit", "t", "value"])
            for u in range(arr.shape[0]):
                for t in range(arr.shape[1]):
                    w.writerow([u, t, f"{arr[u, t]:.12g}"])
    for fam in _SYS_FAMILIES:
        arr = getattr(sol, fam)
        with open(directory / f"{fam}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for t in range(len(arr)):
                w.writerow([t, f"{arr[t]:.12g}"])
    summary = {"objective_value": sol.objective_value,
               "optimality_gap": sol.optimality_gap}
    (directory / "summary.json").write_text(
        json.dumps(summary, indent=2) + "\n")


def load_solution(directory) -> ScheduleSolution:
    directory = Path(directory)

    def read2d(fam):
        with open(directory / f"{fam}.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            return np.zeros((0, 0))
        nu = max(int(r["unit"]) for r in rows) + 1
        nt = max(int(r["t"]) for r in rows) + 1
        arr = np.zeros((nu, nt))
        for r in rows:
            arr[int(r["unit"]), int(r["t"])] = float(r["value"])
        return arr

    def read1d(fam):
        with open(directory / f"{fam}.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        arr = np.zeros(len(rows))
        for r in rows:
            arr[int(r["t"])] = float(r["value"])
        return arr

    kwargs = {fam: read2d(fam) for fam in _DC_FAMILIES + _UNIT_FAMILIES}
    kwargs.update({fam: read1d(fam) for fam in _SYS_FAMILIES})
    summary = json.loads((directory / "summary.json").read_text())
    return ScheduleSolution(objective_value=summary["objective_value"],
                            optimality_gap=summary["optimality_gap"], **kwargs)
