"""Feasibility restoration of raw network predictions.

Before anything is shared with the utility, predictions are clipped to
physical bounds, dependent quantities re-derived, and the processing plan
passed through a one-sweep dispatch guard: commitments rise just enough
to keep the implied queueing delay inside the SLA whenever capacity
allows. Without the guard, small mis-timings in the predicted plan pile
up backlog and the shared penalty series swamps the cost comparison.
"""

from __future__ import annotations

import math

import numpy as np

from ..energy.params import DataCenterParams
from .demos import TARGET_NAMES

_IDX = {name: k for k, name in enumerate(TARGET_NAMES)}


def restore_feasible(dc: DataCenterParams, predictions: np.ndarray,
                     arrivals: np.ndarray, delta_t: float = 1.0) -> dict:
    """predictions: (T, 10) raw-unit network output for one agent.

    Returns the restored series including the grid draw and the SLA
    penalty cost actually implied by the restored processing plan.
    """
    T = predictions.shape[0]
    x_pred = np.clip(np.round(predictions[:, _IDX["x"]]), 0, dc.x_max)
    eta = np.clip(predictions[:, _IDX["eta_eff"]], dc.eta_min, dc.eta_max)
    r_pred = np.clip(predictions[:, _IDX["r"]], 0.0, x_pred * dc.R_max)
    reff_pred = r_pred * eta
    q_cool = np.clip(predictions[:, _IDX["q_cool"]], 0.0, dc.Q_cool_max)

    q_allow = dc.SLA * dc.R_nominal  # backlog the SLA tolerates
    x = np.zeros(T)
    r = np.zeros(T)
    r_eff = np.zeros(T)
    q = np.zeros(T)
    backlog = 0.0
    for t in range(T):
        avail = backlog / delta_t + arrivals[t]          # work on the table
        needed = max(avail - q_allow / delta_t, 0.0)     # rate to stay in SLA
        target = min(max(reff_pred[t], needed), avail)
        # commit exactly the units the served load needs: idle units only
        # burn power, so no operator keeps them on
        units = min(math.ceil(target / (dc.R_max * eta[t]) - 1e-9), dc.x_max)
        x[t] = max(units, 0)
        r[t] = min(target / eta[t], units * dc.R_max)
        r_eff[t] = r[t] * eta[t]
        backlog = max(backlog + (arrivals[t] - r_eff[t]) * delta_t, 0.0)
        q[t] = backlog

    t_queue = q / dc.R_nominal
    delta_sla = np.maximum(t_queue - dc.SLA, 0.0)
    p_dyn = r_eff / dc.capacity * dc.P_dyn_bar
    p_server = x * dc.P_idle + p_dyn
    p_cool = x * dc.P_cool_base + q_cool / dc.COP
    p_grid = p_server + p_cool
    penalty_cost = delta_sla * dc.C_penalty * delta_t
    return {
        "x": x, "r": r, "eta_eff": eta, "r_eff": r_eff, "q": q,
        "t_queue": t_queue, "delta_sla": delta_sla, "p_dyn": p_dyn,
        "p_server": p_server, "q_cool": q_cool, "p_cool": p_cool,
        "p_grid": p_grid, "penalty_cost": penalty_cost,
    }
