"""Round orchestration: warmup, adaptive rounds over the masked
aggregation channel, and the two baseline arms.

A federated round trial-adopts the aggregate into the shared layers,
trains on it, and only keeps the result when the acceptance criteria
clear; a rejected trial restores the pre-round ensemble bit for bit, so
rejected aggregates can never contaminate an agent.

Every arm draws training batches from the same per-round streams
(warmup 0, round r stream r+1), so arms differ only through aggregation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from ..masking import MaskDegenerateError, aggregate_masked, mask_update, new_mask
from ..masking.session import mask_sum_round
from ..masking.shamir import FIXED_SCALE
from ..nn.ensemble import SharedBlock, TrainSettings, apply_block, block_average, train_steps
from .criteria import acceptance_metrics, accepts, momentum_mix, participation_gate
from .state import AgentState, FedConfig


@dataclass
class RoundReport:
    round_idx: int
    rows: list = field(default_factory=list)
    skipped: bool = False
    w_r: float | None = None
    aggregation_check: float | None = None

    def row_for(self, agent_id: str) -> dict:
        return next(r for r in self.rows if r["agent"] == agent_id)


def _train_cfg(cfg: FedConfig, steps: int) -> TrainSettings:
    return TrainSettings(steps=steps, batch_size=cfg.batch_size, lr=cfg.lr,
                         lambda_reg=cfg.lambda_reg)


def run_warmup(agents, datasets, cfg: FedConfig):
    """Independent warmup, losses to the independent history, then the
    federated history bootstraps from the warmup tail."""
    for state in agents:
        u, y = datasets[state.agent_id]
        trace = train_steps(state.ensemble, u, y,
                            _train_cfg(cfg, cfg.warmup_steps), stream=0)
        state.loss_hist_ind.extend(trace.tolist())
        state.bootstrap_fed_history(cfg.window_L)
    return agents


def _train_independent(state, datasets, cfg, round_idx):
    u, y = datasets[state.agent_id]
    trace = train_steps(state.ensemble, u, y,
                        _train_cfg(cfg, cfg.fed_steps), stream=round_idx + 1)
    state.loss_hist_ind.extend(trace.tolist())


def run_independent_round(agents, datasets, cfg: FedConfig, round_idx: int):
    for state in agents:
        _train_independent(state, datasets, cfg, round_idx)


def run_default_round(agents, datasets, cfg: FedConfig, round_idx: int):
    """Unconditional federated averaging: adopt the plain mean of shared
    blocks, then train locally."""
    mean = np.mean([block_average(a.ensemble).data for a in agents], axis=0)
    shapes = block_average(agents[0].ensemble).shapes
    for state in agents:
        state.ensemble = apply_block(state.ensemble, SharedBlock(mean, shapes))
        u, y = datasets[state.agent_id]
        trace = train_steps(state.ensemble, u, y,
                            _train_cfg(cfg, cfg.fed_steps), stream=round_idx + 1)
        state.loss_hist_fed.extend(trace.tolist())


def run_round(agents, datasets, cfg: FedConfig, round_idx: int, channel,
              utility_id: str, utility_keys, master_seed: int = 0,
              model_tap=None, fresh_masks: bool = True,
              mask_store: dict | None = None) -> RoundReport:
    """One adaptive federated round. model_tap, when given, may corrupt
    the aggregate block each agent receives (model-layer adversary);
    mask_store, when given, records this round's mask per agent for reuse
    by the coordination protocol."""
    report = RoundReport(round_idx)
    states = {a.agent_id: a for a in agents}
    participants = [a for a in agents
                    if participation_gate(a, round_idx, cfg) == "in"]
    part_ids = [a.agent_id for a in participants]

    if len(participants) < cfg.min_participants:
        report.skipped = True
        for state in agents:
            _train_independent(state, datasets, cfg, round_idx)
            report.rows.append(_row(state.agent_id, False, None, False))
        return report

    m = len(participants)
    secrets = {}
    for j, aid in enumerate(part_ids):
        rng = np.random.default_rng(
            (master_seed, 101, round_idx, j))
        secrets[aid] = new_mask(rng, m, owner=aid)
    if mask_store is not None:
        mask_store.update({aid: secrets[aid] for aid in part_ids})

    crypto_rng = random.Random(master_seed * 1_000_003 + round_idx)
    try:
        w_r_mant = mask_sum_round(channel, utility_id, part_ids, secrets,
                                  utility_keys, crypto_rng, round_idx)
        blocks = {aid: block_average(states[aid].ensemble) for aid in part_ids}
        updates = [mask_update(secrets[aid], blocks[aid], round_idx)
                   for aid in part_ids]
        theta_bar = aggregate_masked(updates, w_r_mant)
    except MaskDegenerateError:
        report.skipped = True
        for state in agents:
            _train_independent(state, datasets, cfg, round_idx)
            report.rows.append(_row(state.agent_id, False, None, False))
        return report

    report.w_r = w_r_mant / FIXED_SCALE
    ws = np.array([secrets[aid].value for aid in part_ids])
    clear = np.sum([w * blocks[aid].data
                    for w, aid in zip(ws, part_ids)], axis=0) / ws.sum()
    report.aggregation_check = float(np.max(np.abs(theta_bar.data - clear)))

    for state in participants:
        received = theta_bar.copy()
        if model_tap is not None:
            received = model_tap(state.agent_id, round_idx, received)
        snapshot = state.ensemble.copy()
        state.ensemble = apply_block(state.ensemble, received)
        u, y = datasets[state.agent_id]
        trace = train_steps(state.ensemble, u, y,
                            _train_cfg(cfg, cfg.fed_steps),
                            stream=round_idx + 1)
        state.loss_hist_fed.extend(trace.tolist())
        I, T, S, C = acceptance_metrics(state.loss_hist_ind,
                                        state.loss_hist_fed,
                                        cfg.window_L, cfg.eps, cfg.kappa)
        if accepts(I, T, C, cfg):
            trial = block_average(state.ensemble)
            mixed, v_new = momentum_mix(trial.data, received.data,
                                        state.momentum(), round_idx, C,
                                        cfg.beta)
            state.v = v_new
            state.ensemble = apply_block(
                state.ensemble, SharedBlock(mixed, trial.shapes))
            state.T_acc += 1
            accepted = True
        else:
            state.ensemble = snapshot
            state.T_rej += 1
            accepted = False
        report.rows.append(_row(state.agent_id, True, (I, T, S, C), accepted))

    for state in agents:
        if state.agent_id not in part_ids:
            _train_independent(state, datasets, cfg, round_idx)
            report.rows.append(_row(state.agent_id, False, None, False))
    report.rows.sort(key=lambda r: r["agent"])
    return report


def _row(agent_id, participating, metrics, accepted):
    I, T, S, C = metrics if metrics else (np.nan,) * 4
    return {"agent": agent_id, "participating": participating,
            "I": I, "T": T, "S": S, "C": C, "accepted": accepted}
