"""Acceptance criteria over loss histories, momentum mixing, and the
participation gate.

The composite score C = k1*[median improved] + k2*[slope improved] + k3*S
can only clear the 0.8 threshold when both indicators fire and the
volatility score exceeds 1/3, since 0.4 + 0.3 = 0.7 falls short.
"""

from __future__ import annotations

import numpy as np

from .state import AgentState, FedConfig


def _slope(series: np.ndarray) -> float:
    """Least-squares slope over (index, value); 0 for fewer than 2 points."""
    n = len(series)
    if n < 2:
        return 0.0
    x = np.arange(n, dtype=float)
    xc = x - x.mean()
    denom = float(xc @ xc)
    return float(xc @ (series - series.mean())) / denom


def acceptance_metrics(hist_ind, hist_fed, window_L: int = 20,
                       eps: float = 1e-6,
                       kappa=(0.4, 0.3, 0.3)):
    """(I, T, S, C) from the last window_L entries of both histories."""
    if len(hist_ind) == 0 or len(hist_fed) == 0:
        raise ValueError("empty loss history")
    ind = np.asarray(hist_ind[-window_L:], dtype=float)
    fed = np.asarray(hist_fed[-window_L:], dtype=float)

    med_ind = float(np.median(ind))
    med_fed = float(np.median(fed))
    I = float(np.clip((med_ind - med_fed) / (med_ind + eps), -1.0, 1.0))

    if len(ind) < 2 or len(fed) < 2:
        T = 0.0
        S = 0.0
    else:
        T = float(np.clip(_slope(ind) - _slope(fed), -1.0, 1.0))
        std_ind = float(np.std(ind))
        std_fed = float(np.std(fed))
        S = float(np.clip(1.0 - std_fed / (std_ind + eps), 0.0, 1.0))

    C = (kappa[0] * (1.0 if I > 0 else 0.0)
         + kappa[1] * (1.0 if T > 0 else 0.0)
         + kappa[2] * S)
    return I, T, S, C


def accepts(I: float, T: float, C: float, cfg: FedConfig) -> bool:
    return (I > cfg.tau1 or T > cfg.tau2) and C > cfg.tau3


def momentum_mix(theta: np.ndarray, theta_bar: np.ndarray, v: np.ndarray,
                 round_idx: int, C: float, beta: float = 0.9):
    """alpha = 0.1 * 0.95^r * C; v' = beta v + (1-beta)(theta - theta_bar);
    theta' = theta + alpha v'."""
    if theta.shape != theta_bar.shape or theta.shape != v.shape:
        raise ValueError("block shape mismatch in momentum mixing")
    alpha = 0.1 * (0.95 ** round_idx) * C
    v_new = beta * v + (1.0 - beta) * (theta - theta_bar)
    return theta + alpha * v_new, v_new


def participation_gate(state: AgentState, round_idx: int,
                       cfg: FedConfig) -> str:
    """'in' or 'out'. Tripping the low-acceptance rule opts the agent out
    for the next optout_k rounds."""
    if round_idx < state.optout_until:
        return "out"
    if round_idx >= cfg.optout_k and state.acceptance_rate < cfg.optout_rate:
        state.optout_until = round_idx + cfg.optout_k
        return "out"
    return "in"
