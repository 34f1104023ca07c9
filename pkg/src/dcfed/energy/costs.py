"""Cost decomposition of solved schedules.

Component layout used in all reports:
    cost_1  import minus export
    cost_2  generation (true quadratic, not the solver's chord model)
    cost_3  SLA penalties
    cost_4  ancillary revenue from discharge (negative)
    cost_5  storage degradation throughput
"""

from __future__ import annotations

import numpy as np

from .params import EnergySystemModel, Scenario, ScheduleSolution

COMPONENT_NAMES = ("cost_1", "cost_2", "cost_3", "cost_4", "cost_5")


def cost_components(system: EnergySystemModel, scenario: Scenario,
                    sol: ScheduleSolution) -> dict[str, float]:
    dt = system.delta_t
    out = _grid_side(system, scenario, dt,
                     sol.p_imp, sol.p_exp, sol.p_gen, sol.p_ch, sol.p_dch)
    pen = 0.0
    for i, dc in enumerate(system.data_centers):
        pen += float(np.sum(sol.delta_sla[i]) * dc.C_penalty * dt)
    out["cost_3"] = pen
    out["total"] = sum(out[k] for k in COMPONENT_NAMES)
    return out


def cost_components_reduced(system: EnergySystemModel, scenario: Scenario,
                            dispatch: dict, penalty_total: float) -> dict[str, float]:
    """Same layout for the utility-side dispatch; the data-center penalty
    arrives pre-aggregated."""
    dt = system.delta_t
    out = _grid_side(system, scenario, dt, dispatch["p_imp"],
                     dispatch["p_exp"], dispatch["p_gen"],
                     dispatch["p_ch"], dispatch["p_dch"])
    out["cost_3"] = float(penalty_total)
    out["total"] = sum(out[k] for k in COMPONENT_NAMES)
    return out


def _grid_side(system, scenario, dt, p_imp, p_exp, p_gen, p_ch, p_dch):
    out = {}
    out["cost_1"] = float(np.sum(p_imp * scenario.lambda_imp
                                 - p_exp * scenario.lambda_exp) * dt)
    gen = 0.0
    for g, gp in enumerate(system.generators):
        gen += float(np.sum(gp.alpha * p_gen[g] + gp.beta * p_gen[g] ** 2) * dt)
    out["cost_2"] = gen
    anc = 0.0
    deg = 0.0
    for s, st in enumerate(system.storages):
        anc -= float(np.sum(p_dch[s] * scenario.lambda_reg) * dt)
        deg += float(np.sum((p_ch[s] + p_dch[s]) * st.c_deg) * dt)
    out["cost_4"] = anc
    out["cost_5"] = deg
    return out


def extract_reduced(instance, xvec) -> dict:
    """Pull the dispatch arrays out of a reduced-model solution vector."""
    dims = instance.meta["dims"]
    G, S, T = dims["n_gen"], dims["n_storage"], dims["T"]

    def grab(pattern, shape):
        out = np.zeros(shape)
        it = np.nditer(out, flags=["multi_index"], op_flags=["writeonly"])
        for cell in it:
            cell[...] = xvec[instance.var_index(pattern.format(*it.multi_index))]
        return out

    return {
        "p_imp": grab("Pimp[{0}]", (T,)),
        "p_exp": grab("Pexp[{0}]", (T,)),
        "delta_imp": grab("dimp[{0}]", (T,)),
        "p_gen": grab("pg[{0},{1}]", (G, T)),
        "z_st": grab("z[{0},{1}]", (S, T)),
        "p_ch": grab("pch[{0},{1}]", (S, T)),
        "p_dch": grab("pdch[{0},{1}]", (S, T)),
        "e_soc": grab("E[{0},{1}]", (S, T)),
        "slack_pos": grab("slp[{0}]", (T,)),
        "slack_neg": grab("slm[{0}]", (T,)),
    }
