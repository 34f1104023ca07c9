"""Training arms over one demonstration dataset: independent, default
federated averaging, and the adaptive protocol. All arms share agent
initialization and batch streams, so they differ only in aggregation."""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

import numpy as np

from ..crypto import keygen
from ..fed import AgentState, FedConfig, run_default_round, run_independent_round, run_round, run_warmup
from ..nn import EnsembleModel, ensemble_predict, r2_score
from .channel import ChannelNetwork
from .demos import DemoDataset, training_arrays

METHODS = ("independent", "default-fl", "adaptive-fl")


@dataclass
class TrainResult:
    method: str
    agents: list
    reports: list = field(default_factory=list)
    r2: dict = field(default_factory=dict)
    masks: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def mean_r2(self) -> float:
        return float(np.mean(list(self.r2.values())))

    def acceptance_rates(self) -> dict:
        return {a.agent_id: a.acceptance_rate for a in self.agents}


def make_agents(dataset: DemoDataset, widths, n_members: int,
                dropout_p: float, master_seed: int):
    dims = (5, *widths, 10)
    agents = []
    for idx, aid in enumerate(dataset.agent_ids):
        ens = EnsembleModel.create(dims, n_members, dropout_p,
                                   seed=master_seed * 1009 + idx)
        agents.append(AgentState(agent_id=aid, ensemble=ens))
    return agents


def evaluate_r2(dataset: DemoDataset, agents) -> dict:
    out = {}
    for state in agents:
        table = dataset.test[state.agent_id]
        dims = dataset.train[state.agent_id].informative_dims()
        pred, _ = ensemble_predict(state.ensemble, table.std_inputs())
        out[state.agent_id] = r2_score(table.std_targets()[:, dims],
                                       pred[:, dims])
    return out


def run_training(dataset: DemoDataset, method: str, cfg: FedConfig,
                 widths, n_members: int, dropout_p: float,
                 master_seed: int, adversary_model_tap=None) -> TrainResult:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; pick from {METHODS}")
    t0 = time.perf_counter()
    agents = make_agents(dataset, widths, n_members, dropout_p, master_seed)
    data = training_arrays(dataset)
    run_warmup(agents, data, cfg)
    result = TrainResult(method, agents)

    if method == "independent":
        for r in range(cfg.rounds):
            run_independent_round(agents, data, cfg, r)
    elif method == "default-fl":
        for r in range(cfg.rounds):
            run_default_round(agents, data, cfg, r)
    else:
        utility_keys = keygen(512, seed=master_seed * 31 + 5)
        utility_keys.public.precompute_obfuscators(
            32, random.Random(master_seed * 17 + 3))
        channel = ChannelNetwork()
        for a in agents:
            channel.register(a.agent_id)
        channel.register("utility")
        masks = {}
        for r in range(cfg.rounds):
            report = run_round(agents, data, cfg, r, channel, "utility",
                               utility_keys, master_seed=master_seed,
                               model_tap=adversary_model_tap,
                               fresh_masks=True, mask_store=masks)
            result.reports.append(report)
        result.masks = masks
    result.r2 = evaluate_r2(dataset, agents)
    result.wall_time = time.perf_counter() - t0
    return result
