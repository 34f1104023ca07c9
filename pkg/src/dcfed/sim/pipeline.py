"""End-to-end pipeline: demonstrations, the three training arms, the
verified coordination round per test scenario, the reduced dispatch, and
cost/timing assembly."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from ..crypto import keygen
from ..energy import build_reduced
from ..energy.costs import cost_components, cost_components_reduced, extract_reduced
from ..masking import new_mask
from ..milp.highs import solve_milp_auto
from ..nn import ensemble_predict
from ..verify import run_verified_sums
from .adversary import AdversaryScript, apply_adversary
from .channel import ChannelNetwork
from .demos import DemoDataset, generate_demonstrations, solve_scenario
from .experiment import METHODS, TrainResult, run_training
from .profiles import DESK_EXPERIMENT, ScenarioProfile, desk_profile, desk_system
from .restore import restore_feasible

PHASES = ("inference", "crypto", "optimization")


@dataclass
class SimConfig:
    master_seed: int = 7
    n_train_scenarios: int = 40
    n_test_scenarios: int = 10
    n_eval_scenarios: int = 5      # coordination runs on this many test days
    widths: tuple = (32, 128, 32)
    ensemble_n: int = 3
    dropout_p: float = 0.1
    warmup_steps: int = 900
    fed_steps: int = 40
    rounds: int = 15
    batch_size: int = 64
    lr: float = 2e-3
    demo_gap: float = 8e-3
    demo_time_budget: float = 20.0
    reduced_gap: float = 1e-4
    psi: float = 1e-4
    timing_runs: int = 10
    methods: tuple = METHODS

    @classmethod
    def desk(cls, master_seed: int = 7, **overrides) -> "SimConfig":
        kw = dict(
            n_train_scenarios=DESK_EXPERIMENT["n_train_scenarios"],
            n_test_scenarios=DESK_EXPERIMENT["n_test_scenarios"],
            widths=DESK_EXPERIMENT["widths"],
            ensemble_n=DESK_EXPERIMENT["ensemble_n"],
            dropout_p=DESK_EXPERIMENT["dropout_p"],
            warmup_steps=DESK_EXPERIMENT["warmup_steps"],
            fed_steps=DESK_EXPERIMENT["fed_steps"],
            rounds=DESK_EXPERIMENT["rounds"],
            batch_size=DESK_EXPERIMENT["batch_size"],
            lr=DESK_EXPERIMENT["lr"],
            master_seed=master_seed,
        )
        kw.update(overrides)
        return cls(**kw)

    def fed_config(self) -> "FedConfig":
        from ..fed import FedConfig
        return FedConfig(rounds=self.rounds, warmup_steps=self.warmup_steps,
                         fed_steps=self.fed_steps,
                         batch_size=self.batch_size, lr=self.lr)


@dataclass
class CoordinationOutcome:
    scenario_seed: int
    method: str
    verified: bool
    halted_at: int | None
    costs: dict = field(default_factory=dict)
    slack_total: float = 0.0
    rel_error: float = np.nan
    timers: dict = field(default_factory=dict)


@dataclass
class PipelineReport:
    config: SimConfig
    r2: dict = field(default_factory=dict)            # method -> agent -> r2
    acceptance: dict = field(default_factory=dict)    # agent -> rate
    round_rows: list = field(default_factory=list)
    cost_rows: list = field(default_factory=list)     # CoordinationOutcome + M0 rows
    timing: dict = field(default_factory=dict)        # phase -> median seconds
    speedup: float = np.nan

    def rows_for(self, method: str):
        return [r for r in self.cost_rows if r.method == method]


def predict_agent_series(state, dataset: DemoDataset, scenario, sched):
    """Raw-unit (T, 10) prediction for one agent on one test day; the
    backlog feature comes from the expert trace, as during training."""
    table = dataset.test[state.agent_id]
    idx = dataset.agent_ids.index(state.agent_id)
    q_state = np.concatenate([[0.0], sched.q[idx, :-1]])
    u = np.column_stack([scenario.lambda_imp, scenario.lambda_exp,
                         scenario.lambda_reg, q_state,
                         scenario.u_arrivals[idx]])
    mean_std, _ = ensemble_predict(state.ensemble, table.std_inputs(u))
    return table.unstd_targets(mean_std)


def run_coordination(system, scenario, sched_expert, dataset: DemoDataset,
                     train_result: TrainResult, cfg: SimConfig,
                     adversary: AdversaryScript = None,
                     m0_costs=None,
                     utility_keys=None) -> CoordinationOutcome:
    """Online phase for one scenario and one trained method. The
    utility keypair is long-lived infrastructure; pass it in to keep key
    generation out of the timed crypto phase."""
    out = CoordinationOutcome(scenario.seed, train_result.method,
                              verified=False, halted_at=None)
    seed = cfg.master_seed * 131 + scenario.seed
    if utility_keys is None:
        utility_keys = keygen(512, seed=seed)
        utility_keys.public.precompute_obfuscators(32, random.Random(seed + 1))
    t0 = time.perf_counter()
    pgrid = {}
    penalty = {}
    for idx, state in enumerate(train_result.agents):
        dc = system.data_centers[idx]
        pred = predict_agent_series(state, dataset, scenario, sched_expert)
        restored = restore_feasible(dc, pred, scenario.u_arrivals[idx],
                                    system.delta_t)
        pgrid[state.agent_id] = restored["p_grid"]
        penalty[state.agent_id] = restored["penalty_cost"]
    out.timers["inference"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    agent_ids = list(dataset.agent_ids)
    masks = dict(train_result.masks)
    for j, aid in enumerate(agent_ids):
        if aid not in masks:  # fresh masks when no learning round supplied one
            rng = np.random.default_rng((seed, 7, j))
            masks[aid] = new_mask(rng, len(agent_ids), owner=aid)
        elif len(masks[aid].coeffs) != len(agent_ids) - 1:
            rng = np.random.default_rng((seed, 7, j))
            masks[aid] = new_mask(rng, len(agent_ids), owner=aid)

    packet_tap = None
    if adversary is not None:
        _, packet_tap = apply_adversary(adversary, pk=utility_keys.public,
                                        rng=random.Random(seed + 2),
                                        seed=cfg.master_seed)
    channel = ChannelNetwork()
    for aid in agent_ids:
        channel.register(aid)
    channel.register("utility")
    res_p = run_verified_sums(channel, "utility", agent_ids, pgrid, masks,
                              utility_keys, seed=seed, name="pgrid",
                              psi=cfg.psi, packet_tap=packet_tap)
    channel2 = ChannelNetwork()
    for aid in agent_ids:
        channel2.register(aid)
    channel2.register("utility")
    res_d = run_verified_sums(channel2, "utility", agent_ids, penalty, masks,
                              utility_keys, seed=seed + 1, name="penalty",
                              psi=cfg.psi, packet_tap=packet_tap)
    out.timers["crypto"] = time.perf_counter() - t0

    if not (res_p.all_accepted and res_d.all_accepted):
        out.verified = False
        out.halted_at = res_p.halted_at if not res_p.all_accepted else res_d.halted_at
        out.timers["optimization"] = 0.0
        return out
    out.verified = True

    t0 = time.perf_counter()
    rinst = build_reduced(system, scenario, res_p.sums, res_d.sums)
    rsol = solve_milp_auto(rinst, gap_target=cfg.reduced_gap,
                           time_budget=60.0)
    out.timers["optimization"] = time.perf_counter() - t0
    if not rsol.feasible:
        out.verified = False
        return out
    disp = extract_reduced(rinst, rsol.x)
    out.slack_total = float(disp["slack_pos"].sum() + disp["slack_neg"].sum())
    out.costs = cost_components_reduced(system, scenario, disp,
                                        float(res_d.sums.sum()))
    if m0_costs is not None:
        out.rel_error = abs(out.costs["total"] - m0_costs["total"]) / \
            max(abs(m0_costs["total"]), 1e-9)
    return out


def run_pipeline(cfg: SimConfig, system=None, profile: ScenarioProfile = None,
                 adversary: AdversaryScript = None,
                 dataset: DemoDataset = None) -> PipelineReport:
    """Offline training plus online coordination over the evaluation
    scenarios, with per-phase wall-clock timing against the centralized
    baseline."""
    system = system or desk_system()
    profile = profile or desk_profile()
    report = PipelineReport(cfg)

    if dataset is None:
        dataset = generate_demonstrations(
            system, profile, cfg.n_train_scenarios, cfg.n_test_scenarios,
            seed0=1000 + cfg.master_seed, gap_target=cfg.demo_gap,
            time_budget=cfg.demo_time_budget)

    model_tap = None
    if adversary is not None:
        model_tap, _ = apply_adversary(adversary, seed=cfg.master_seed)

    results = {}
    for method in cfg.methods:
        tap = model_tap if method == "adaptive-fl" else None
        results[method] = run_training(
            dataset, method, cfg.fed_config(), cfg.widths, cfg.ensemble_n,
            cfg.dropout_p, cfg.master_seed, adversary_model_tap=tap)
        report.r2[method] = results[method].r2
    if "adaptive-fl" in results:
        report.acceptance = results["adaptive-fl"].acceptance_rates()
        for rep in results["adaptive-fl"].reports:
            for row in rep.rows:
                report.round_rows.append({"round": rep.round_idx, **row})

    utility_keys = keygen(512, seed=cfg.master_seed * 131)
    utility_keys.public.precompute_obfuscators(
        32, random.Random(cfg.master_seed * 131 + 1))
    n_eval = min(cfg.n_eval_scenarios, len(dataset.test_scenarios))
    for k in range(n_eval):
        scenario = dataset.test_scenarios[k]
        sched = dataset.test_solutions[k]
        m0_costs = cost_components(system, scenario, sched)
        report.cost_rows.append(CoordinationOutcome(
            scenario.seed, "central", True, None, m0_costs, 0.0, 0.0, {}))
        for method in cfg.methods:
            out = run_coordination(system, scenario, sched, dataset,
                                   results[method], cfg,
                                   adversary=adversary, m0_costs=m0_costs,
                                   utility_keys=utility_keys)
            report.cost_rows.append(out)

    _measure_timing(report, system, dataset, results, cfg,
                    utility_keys=utility_keys)
    return report


def _measure_timing(report, system, dataset, results, cfg,
                    utility_keys=None):
    """Median per-phase online times vs the centralized solve on the same
    instance, over timing_runs repetitions."""
    if "adaptive-fl" not in results or not dataset.test_scenarios:
        return
    scenario = dataset.test_scenarios[0]
    sched = dataset.test_solutions[0]
    phases = {p: [] for p in PHASES}
    central = []
    for _ in range(cfg.timing_runs):
        out = run_coordination(system, scenario, sched, dataset,
                               results["adaptive-fl"], cfg,
                               utility_keys=utility_keys)
        for p in PHASES:
            phases[p].append(out.timers.get(p, 0.0))
        t0 = time.perf_counter()
        solve_scenario(system, scenario, gap_target=cfg.demo_gap,
                       time_budget=cfg.demo_time_budget)
        central.append(time.perf_counter() - t0)
    report.timing = {p: float(np.median(v)) for p, v in phases.items()}
    report.timing["pipeline_total"] = float(
        np.median([sum(phases[p][i] for p in PHASES)
                   for i in range(cfg.timing_runs)]))
    report.timing["central_solve"] = float(np.median(central))
    report.speedup = report.timing["central_solve"] / \
        max(report.timing["pipeline_total"], 1e-12)
