"""Pure residual checks of a ScheduleSolution against every constraint
family of the central model. Never mutates; reports max violation per
family so solver output and restored predictions can be audited alike."""

from __future__ import annotations

import numpy as np

from .build import mccormick_envelope
from .params import EnergySystemModel, Scenario, ScheduleSolution


def validate_schedule(system: EnergySystemModel, scenario: Scenario,
                      sol: ScheduleSolution, tol: float = 1e-6) -> dict:
    T = system.horizon_T
    I, G, S = system.n_dc, system.n_gen, system.n_storage
    shapes = {
        "x": (I, T), "r": (I, T), "eta_eff": (I, T), "r_eff": (I, T),
        "q": (I, T), "t_queue": (I, T), "delta_sla": (I, T),
        "p_dyn": (I, T), "p_server": (I, T), "p_cool": (I, T),
        "q_cool": (I, T), "temp": (I, T), "p_grid": (I, T),
        "p_imp": (T,), "p_exp": (T,), "delta_imp": (T,),
        "p_gen": (G, T), "z_st": (S, T), "p_ch": (S, T),
        "p_dch": (S, T), "e_soc": (S, T),
    }
    for name, shape in shapes.items():
        arr = np.asarray(getattr(sol, name))
        if arr.shape != shape:
            return {"ok": False, "max_violation": np.inf,
                    "error": f"dimension mismatch: {name} has shape "
                             f"{arr.shape}, expected {shape}",
                    "families": {}}

    dt = system.delta_t
    fam: dict[str, float] = {}

    def put(name, value):
        fam[name] = max(fam.get(name, 0.0), float(value))

    for i, dc in enumerate(system.data_centers):
        cap = dc.capacity
        q_prev = 0.0
        for t in range(T):
            put("queue", abs(sol.q[i, t] - q_prev
                             - (scenario.u_arrivals[i, t] - sol.r_eff[i, t]) * dt))
            q_prev = sol.q[i, t]
            put("cap", sol.r[i, t] - sol.x[i, t] * dc.R_max)
            eta_lo = dc.eta_min if dc.eta_factors is None else dc.eta_min * dc.eta_factors[t]
            eta_hi = dc.eta_max if dc.eta_factors is None else dc.eta_max * dc.eta_factors[t]
            for row in mccormick_envelope((0.0, cap), (eta_lo, eta_hi), cap):
                put("mccormick", row.violation(sol.r[i, t], sol.eta_eff[i, t],
                                               sol.r_eff[i, t]))
            put("pdyn", abs(sol.p_dyn[i, t]
                            - sol.r_eff[i, t] * dc.P_dyn_bar / cap))
            put("pserv", abs(sol.p_server[i, t]
                             - sol.x[i, t] * dc.P_idle - sol.p_dyn[i, t]))
            put("tqueue", sol.q[i, t] / dc.R_nominal - sol.t_queue[i, t])
            put("sla", sol.t_queue[i, t] - dc.SLA - sol.delta_sla[i, t])
            put("pcool", abs(sol.p_cool[i, t] - sol.x[i, t] * dc.P_cool_base
                             - sol.q_cool[i, t] / dc.COP))
            put("pgrid", abs(sol.p_grid[i, t] - sol.p_server[i, t]
                             - sol.p_cool[i, t]))
            if t == 0:
                put("temp", abs(sol.temp[i, 0] - scenario.T_ambient[0]))
            else:
                drift = (sol.p_server[i, t - 1] * dc.beta_heat
                         - sol.q_cool[i, t - 1] * dc.beta_cool
                         - (sol.temp[i, t - 1] - scenario.T_ambient[t - 1])
                         * dc.beta_loss) / dc.C_dis
                put("temp", abs(sol.temp[i, t] - sol.temp[i, t - 1] - drift))
            put("bounds", max(-sol.x[i, t], sol.x[i, t] - dc.x_max,
                              eta_lo - sol.eta_eff[i, t],
                              sol.eta_eff[i, t] - eta_hi,
                              -sol.q[i, t], -sol.delta_sla[i, t],
                              -sol.r[i, t], -sol.q_cool[i, t],
                              sol.q_cool[i, t] - dc.Q_cool_max,
                              dc.T_min - sol.temp[i, t],
                              sol.temp[i, t] - dc.T_max))
            put("integrality", abs(sol.x[i, t] - round(sol.x[i, t])))

    grid = system.grid
    for t in range(T):
        put("imp", sol.p_imp[t] - sol.delta_imp[t] * grid.P_imp_max)
        put("exp", sol.p_exp[t] - (1.0 - sol.delta_imp[t]) * grid.P_exp_max)
        put("contract", sol.p_imp[t] - grid.P_contract)
        put("binary", min(abs(sol.delta_imp[t]), abs(sol.delta_imp[t] - 1.0)))
        put("mutex_grid", min(sol.p_imp[t], sol.p_exp[t]))
        supply = (sol.p_gen[:, t].sum() + sol.p_imp[t] - sol.p_exp[t]
                  + sol.p_dch[:, t].sum() - sol.p_ch[:, t].sum())
        put("balance", abs(supply - sol.p_grid[:, t].sum() - scenario.L_base[t]))

    for g, gen in enumerate(system.generators):
        for t in range(T):
            put("bounds", max(gen.P_min - sol.p_gen[g, t],
                              sol.p_gen[g, t] - gen.P_max))
            if t > 0:
                put("rampup", sol.p_gen[g, t] - sol.p_gen[g, t - 1] - gen.R_up * dt)
                put("rampdn", sol.p_gen[g, t - 1] - sol.p_gen[g, t] - gen.R_down * dt)

    for s, st in enumerate(system.storages):
        e_prev = st.E_min
        for t in range(T):
            put("binary", min(abs(sol.z_st[s, t]), abs(sol.z_st[s, t] - 1.0)))
            put("chg", sol.p_ch[s, t] - sol.z_st[s, t] * st.P_ch_max)
            put("dch", sol.p_dch[s, t] - (1.0 - sol.z_st[s, t]) * st.P_dch_max)
            put("mutex_storage", min(sol.p_ch[s, t], sol.p_dch[s, t]))
            put("soc", abs(sol.e_soc[s, t] - e_prev
                           - (st.eta_ch * sol.p_ch[s, t]
                              - sol.p_dch[s, t] / st.eta_dch) * dt))
            e_prev = sol.e_soc[s, t]
            put("bounds", max(st.E_min - sol.e_soc[s, t],
                              sol.e_soc[s, t] - st.E_max,
                              -sol.p_ch[s, t], -sol.p_dch[s, t]))

    worst = max(fam.values(), default=0.0)
    return {"ok": worst <= tol, "max_violation": worst, "families": fam}
