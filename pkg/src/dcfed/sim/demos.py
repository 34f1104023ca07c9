"""Expert-demonstration generation: centralized solves over sampled
scenarios, flattened into per-agent (input, decision) pairs.

Inputs per period: import/export/regulation prices, the start-of-period
backlog, and the arrival rate. Targets: the ten per-DC decision series of
the expert schedule. Both sides carry per-agent standardization stats so
training sees zero-mean unit-variance data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..energy import ScheduleSolution, build_centralized, validate_schedule
from ..milp.highs import solve_milp_auto
from .profiles import ScenarioProfile
from .scenario_gen import sample_scenario

INPUT_NAMES = ("lambda_imp", "lambda_exp", "lambda_reg", "q_state", "arrivals")
TARGET_NAMES = ("x", "r", "eta_eff", "temp", "r_eff", "p_dyn", "p_server",
                "p_cool", "q_cool", "delta_sla")
STD_FLOOR = 1e-8


@dataclass
class AgentTable:
    inputs: np.ndarray    # (N, 5) raw units
    targets: np.ndarray   # (N, 10) raw units
    mu_u: np.ndarray = field(default=None)
    sd_u: np.ndarray = field(default=None)
    mu_y: np.ndarray = field(default=None)
    sd_y: np.ndarray = field(default=None)

    def fit_scalers(self):
        self.mu_u = self.inputs.mean(axis=0)
        self.sd_u = np.maximum(self.inputs.std(axis=0), STD_FLOOR)
        self.mu_y = self.targets.mean(axis=0)
        self.sd_y = np.maximum(self.targets.std(axis=0), STD_FLOOR)
        return self

    def std_inputs(self, raw=None):
        raw = self.inputs if raw is None else raw
        return (raw - self.mu_u) / self.sd_u

    def std_targets(self, raw=None):
        raw = self.targets if raw is None else raw
        return (raw - self.mu_y) / self.sd_y

    def unstd_targets(self, std):
        return std * self.sd_y + self.mu_y

    def informative_dims(self) -> np.ndarray:
        """Target columns whose raw values actually vary; degenerate
        columns (pinned temperature, never-violated SLA slack, constant
        efficiency) carry no prediction signal either way."""
        spread = self.targets.std(axis=0)
        return np.where(spread > 1e-6 * (1.0 + np.abs(self.mu_y)))[0]


@dataclass
class DemoDataset:
    train: dict[str, AgentTable]
    test: dict[str, AgentTable]
    scenario_seeds_train: list
    scenario_seeds_test: list
    solver_gaps: list
    test_scenarios: list
    test_solutions: list
    agent_ids: tuple


def agent_rows(system, scenario, sched: ScheduleSolution):
    """Per-agent (inputs, targets) arrays for one solved scenario."""
    T = system.horizon_T
    rows = {}
    for i, dc in enumerate(system.data_centers):
        q_state = np.concatenate([[0.0], sched.q[i, :-1]])
        u = np.column_stack([
            scenario.lambda_imp, scenario.lambda_exp, scenario.lambda_reg,
            q_state, scenario.u_arrivals[i]])
        y = np.column_stack([
            sched.x[i], sched.r[i], sched.eta_eff[i], sched.temp[i],
            sched.r_eff[i], sched.p_dyn[i], sched.p_server[i],
            sched.p_cool[i], sched.q_cool[i], sched.delta_sla[i]])
        rows[dc.name] = (u, y)
    return rows


def solve_scenario(system, scenario, gap_target=5e-3, time_budget=60.0):
    inst = build_centralized(system, scenario)
    sol = solve_milp_auto(inst, gap_target=gap_target, time_budget=time_budget)
    if not sol.feasible:
        raise RuntimeError(f"central solve failed: {sol.status}")
    sched = ScheduleSolution.from_vector(inst, sol.x)
    sched.objective_value = sol.objective
    sched.optimality_gap = sol.gap
    report = validate_schedule(system, scenario, sched, tol=1e-5)
    if not report["ok"]:
        raise RuntimeError(f"expert schedule failed validation: {report}")
    return sched, sol


def generate_demonstrations(system, profile: ScenarioProfile,
                            n_train: int, n_test: int, seed0: int = 1000,
                            gap_target: float = 8e-3,
                            time_budget: float = 20.0,
                            progress=None) -> DemoDataset:
    """Solve n_train + n_test scenarios and split by scenario."""
    agent_ids = tuple(dc.name for dc in system.data_centers)
    buf_train = {a: ([], []) for a in agent_ids}
    buf_test = {a: ([], []) for a in agent_ids}
    seeds_train, seeds_test, gaps = [], [], []
    test_scen, test_sol = [], []
    for k in range(n_train + n_test):
        seed = seed0 + k
        scenario = sample_scenario(profile, seed)
        sched, sol = solve_scenario(system, scenario, gap_target, time_budget)
        gaps.append(sol.gap)
        if progress is not None:
            progress(k, n_train + n_test, sol)
        rows = agent_rows(system, scenario, sched)
        is_test = k >= n_train
        (seeds_test if is_test else seeds_train).append(seed)
        if is_test:
            test_scen.append(scenario)
            test_sol.append(sched)
        for a in agent_ids:
            u, y = rows[a]
            dest = buf_test if is_test else buf_train
            dest[a][0].append(u)
            dest[a][1].append(y)

    def pack(buf, scalers_from=None):
        out = {}
        for a in agent_ids:
            table = AgentTable(np.vstack(buf[a][0]), np.vstack(buf[a][1]))
            if scalers_from is None:
                table.fit_scalers()
            else:
                src = scalers_from[a]
                table.mu_u, table.sd_u = src.mu_u, src.sd_u
                table.mu_y, table.sd_y = src.mu_y, src.sd_y
            out[a] = table
        return out

    train = pack(buf_train)
    test = pack(buf_test, scalers_from=train)
    return DemoDataset(train, test, seeds_train, seeds_test, gaps,
                       test_scen, test_sol, agent_ids)


def training_arrays(dataset: DemoDataset) -> dict:
    """agent -> (std inputs, std targets) for the training loop."""
    return {a: (t.std_inputs(), t.std_targets())
            for a, t in dataset.train.items()}


def save_dataset(dataset: DemoDataset, directory) -> None:
    import json
    from pathlib import Path

    from ..energy.io import save_scenario, save_solution

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    meta = {
        "agent_ids": list(dataset.agent_ids),
        "seeds_train": dataset.scenario_seeds_train,
        "seeds_test": dataset.scenario_seeds_test,
        "gaps": dataset.solver_gaps,
    }
    (directory / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    for split, tables in (("train", dataset.train), ("test", dataset.test)):
        for a, t in tables.items():
            np.savez(directory / f"{split}_{a}.npz", inputs=t.inputs,
                     targets=t.targets, mu_u=t.mu_u, sd_u=t.sd_u,
                     mu_y=t.mu_y, sd_y=t.sd_y)
    for k, (scen, sol) in enumerate(zip(dataset.test_scenarios,
                                        dataset.test_solutions)):
        save_scenario(scen, directory / f"scenario_test_{k}.csv")
        save_solution(sol, directory / f"solution_test_{k}")


def load_dataset(directory) -> DemoDataset:
    import json
    from pathlib import Path

    from ..energy.io import load_scenario, load_solution

    directory = Path(directory)
    meta = json.loads((directory / "meta.json").read_text())

    def tables(split):
        out = {}
        for a in meta["agent_ids"]:
            z = np.load(directory / f"{split}_{a}.npz")
            t = AgentTable(z["inputs"], z["targets"])
            t.mu_u, t.sd_u = z["mu_u"], z["sd_u"]
            t.mu_y, t.sd_y = z["mu_y"], z["sd_y"]
            out[a] = t
        return out

    scen, sol = [], []
    for k, seed in enumerate(meta["seeds_test"]):
        scen.append(load_scenario(directory / f"scenario_test_{k}.csv",
                                  seed=seed))
        sol.append(load_solution(directory / f"solution_test_{k}"))
    return DemoDataset(tables("train"), tables("test"), meta["seeds_train"],
                       meta["seeds_test"], meta["gaps"], scen, sol,
                       tuple(meta["agent_ids"]))
