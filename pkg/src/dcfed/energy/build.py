"""MILP builders for the central scheduling model and the utility-side
reduced dispatch, plus the shared linearization helpers.

Time indexing: periods t = 0..T-1. Queue and storage states are
end-of-period values driven by that period's flows (initial backlog 0,
initial charge E_min). Data-hall temperature is the start-of-period value,
driven by the previous period's server heat and cooling, with temp[0]
pinned to ambient; the final period's heat has no observed successor state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..milp.instance import InstanceBuilder, MilpInstance, ModelError
from .params import EnergySystemModel, ParameterError, Scenario

# bounded slack on the reduced power balance: predicted aggregates may be
# physically inconsistent, so absorb and bill at a deterrent price
SLACK_PENALTY = 1e4  # $/kWh


@dataclass(frozen=True)
class EnvelopeRow:
    """One linear relation over the symbols r, eta, reff."""
    coeffs: dict[str, float]
    sense: str
    rhs: float

    def violation(self, r: float, eta: float, reff: float) -> float:
        val = (self.coeffs.get("r", 0.0) * r
               + self.coeffs.get("eta", 0.0) * eta
               + self.coeffs.get("reff", 0.0) * reff)
        if self.sense == "<=":
            return val - self.rhs
        if self.sense == ">=":
            return self.rhs - val
        return abs(val - self.rhs)


def mccormick_envelope(r_bounds, eta_bounds, capacity) -> list[EnvelopeRow]:
    """Relax the product reff = r * eta over the box
    r in [0, capacity], eta in [eta_min, eta_max]:

        reff <= r * eta_max
        reff <= capacity * eta
        reff >= r * eta_min
    """
    r_lo, r_hi = r_bounds
    eta_lo, eta_hi = eta_bounds
    if r_lo > r_hi or eta_lo > eta_hi:
        raise ParameterError("inverted bounds for envelope")
    if r_lo < 0 or eta_lo < 0 or capacity < 0:
        raise ParameterError("envelope bounds must be non-negative")
    return [
        EnvelopeRow({"reff": 1.0, "r": -eta_hi}, "<=", 0.0),
        EnvelopeRow({"reff": 1.0, "eta": -capacity}, "<=", 0.0),
        EnvelopeRow({"reff": -1.0, "r": eta_lo}, "<=", 0.0),
    ]


def piecewise_linearize_cost(alpha, beta, p_range, n_segments):
    """Breakpoints (p_k, alpha*p_k + beta*p_k^2) over p_range.

    Chords through consecutive breakpoints over-estimate the convex
    quadratic by at most beta*(width/n_segments)^2/4 per segment. With
    beta = 0 the cost is linear and two breakpoints suffice.
    """
    lo, hi = float(p_range[0]), float(p_range[1])
    if n_segments < 1:
        raise ParameterError("n_segments must be >= 1")
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
        raise ParameterError(f"p_range {p_range} must be finite and ordered")
    if beta == 0.0:
        n_segments = 1
    pts = np.linspace(lo, hi, n_segments + 1)
    return [(float(p), float(alpha * p + beta * p * p)) for p in pts]


def _chords(breakpoints):
    """(slope, intercept) per segment; degenerate ranges give a flat chord."""
    out = []
    for (p0, c0), (p1, c1) in zip(breakpoints, breakpoints[1:]):
        if p1 - p0 < 1e-12:
            out.append((0.0, c0))
        else:
            s = (c1 - c0) / (p1 - p0)
            out.append((s, c0 - s * p0))
    if not out:
        out.append((0.0, breakpoints[0][1]))
    return out


def build_centralized(system: EnergySystemModel, scenario: Scenario,
                      n_cost_segments: int = 8) -> MilpInstance:
    """Full scheduling MILP over all data centers, generators, storage and
    grid exchange."""
    scenario.check(system)
    if not (system.data_centers and system.generators and system.storages):
        raise ModelError("central model needs at least one of each asset class")
    T = system.horizon_T
    dt = system.delta_t
    for dc in system.data_centers:
        if not dc.T_min <= scenario.T_ambient[0] <= dc.T_max:
            raise ModelError(
                f"{dc.name}: initial ambient {scenario.T_ambient[0]} outside "
                f"temperature band [{dc.T_min}, {dc.T_max}]")

    b = InstanceBuilder()
    _add_dc_block(b, system, scenario)
    _add_system_block(b, system, scenario, n_cost_segments)

    # power balance: generation + imports + net discharge serve DC load
    # plus the base load, exports count as load
    for t in range(T):
        coeffs = {}
        for g in range(system.n_gen):
            coeffs[b.index(f"pg[{g},{t}]")] = 1.0
        coeffs[b.index(f"Pimp[{t}]")] = 1.0
        coeffs[b.index(f"Pexp[{t}]")] = -1.0
        for s in range(system.n_storage):
            coeffs[b.index(f"pdch[{s},{t}]")] = 1.0
            coeffs[b.index(f"pch[{s},{t}]")] = -1.0
        for i in range(system.n_dc):
            coeffs[b.index(f"pgrid[{i},{t}]")] = -1.0
        b.row(coeffs, "==", float(scenario.L_base[t]), f"balance[{t}]")

    # objective: import/export, SLA penalties, generation, ancillary
    # revenue for discharge, degradation throughput
    for t in range(T):
        b.obj(b.index(f"Pimp[{t}]"), scenario.lambda_imp[t] * dt)
        b.obj(b.index(f"Pexp[{t}]"), -scenario.lambda_exp[t] * dt)
        for i, dc in enumerate(system.data_centers):
            b.obj(b.index(f"dsla[{i},{t}]"), dc.C_penalty * dt)
        for g in range(system.n_gen):
            b.obj(b.index(f"cg[{g},{t}]"), dt)
        for s, st in enumerate(system.storages):
            b.obj(b.index(f"pdch[{s},{t}]"), (st.c_deg - scenario.lambda_reg[t]) * dt)
            b.obj(b.index(f"pch[{s},{t}]"), st.c_deg * dt)

    meta = {
        "kind": "central",
        "dims": {"n_dc": system.n_dc, "n_gen": system.n_gen,
                 "n_storage": system.n_storage, "T": T},
        "n_cost_segments": n_cost_segments,
    }
    return b.build(meta)


def build_reduced(system: EnergySystemModel, scenario: Scenario,
                  agg_p_grid, agg_penalty_cost,
                  n_cost_segments: int = 8) -> MilpInstance:
    """Utility-side dispatch with the data-center side fixed to shared
    aggregates: grid exchange, generators and storage only. agg_p_grid is
    the per-period sum of DC grid draws (kW); agg_penalty_cost the
    per-period summed SLA penalty cost ($), entering as a constant."""
    scenario.check(system)
    T = system.horizon_T
    dt = system.delta_t
    agg_p_grid = np.asarray(agg_p_grid, dtype=float)
    agg_penalty_cost = np.asarray(agg_penalty_cost, dtype=float)
    if agg_p_grid.shape != (T,) or agg_penalty_cost.shape != (T,):
        raise ModelError("aggregate series must have length horizon_T")
    if not (np.all(np.isfinite(agg_p_grid)) and np.all(np.isfinite(agg_penalty_cost))):
        raise ModelError("aggregate series must be finite")

    b = InstanceBuilder()
    _add_system_block(b, system, scenario, n_cost_segments)
    slack_cap = 10.0 * (float(np.abs(agg_p_grid).max()) +
                        float(np.abs(scenario.L_base).max()) + 1.0)
    for t in range(T):
        b.var(f"slp[{t}]", 0.0, slack_cap)
        b.var(f"slm[{t}]", 0.0, slack_cap)

    for t in range(T):
        coeffs = {}
        for g in range(system.n_gen):
            coeffs[b.index(f"pg[{g},{t}]")] = 1.0
        coeffs[b.index(f"Pimp[{t}]")] = 1.0
        coeffs[b.index(f"Pexp[{t}]")] = -1.0
        for s in range(system.n_storage):
            coeffs[b.index(f"pdch[{s},{t}]")] = 1.0
            coeffs[b.index(f"pch[{s},{t}]")] = -1.0
        coeffs[b.index(f"slp[{t}]")] = 1.0
        coeffs[b.index(f"slm[{t}]")] = -1.0
        b.row(coeffs, "==", float(agg_p_grid[t] + scenario.L_base[t]),
              f"balance[{t}]")

    for t in range(T):
        b.obj(b.index(f"Pimp[{t}]"), scenario.lambda_imp[t] * dt)
        b.obj(b.index(f"Pexp[{t}]"), -scenario.lambda_exp[t] * dt)
        for g in range(system.n_gen):
            b.obj(b.index(f"cg[{g},{t}]"), dt)
        for s, st in enumerate(system.storages):
            b.obj(b.index(f"pdch[{s},{t}]"), (st.c_deg - scenario.lambda_reg[t]) * dt)
            b.obj(b.index(f"pch[{s},{t}]"), st.c_deg * dt)
        b.obj(b.index(f"slp[{t}]"), SLACK_PENALTY * dt)
        b.obj(b.index(f"slm[{t}]"), SLACK_PENALTY * dt)
    b.offset(float(agg_penalty_cost.sum()))

    meta = {
        "kind": "reduced",
        "dims": {"n_dc": 0, "n_gen": system.n_gen,
                 "n_storage": system.n_storage, "T": T},
        "n_cost_segments": n_cost_segments,
        "slack_names": [f"slp[{t}]" for t in range(T)] +
                       [f"slm[{t}]" for t in range(T)],
    }
    return b.build(meta)


def _add_dc_block(b: InstanceBuilder, system: EnergySystemModel,
                  scenario: Scenario) -> None:
    T = system.horizon_T
    dt = system.delta_t
    amb = scenario.T_ambient
    for i, dc in enumerate(system.data_centers):
        cap = dc.capacity
        for t in range(T):
            eta_lo, eta_hi = dc.eta_min, dc.eta_max
            if dc.eta_factors is not None:
                eta_lo = eta_lo * dc.eta_factors[t]
                eta_hi = eta_hi * dc.eta_factors[t]
            b.var(f"x[{i},{t}]", 0, dc.x_max, integer=True)
            b.var(f"r[{i},{t}]", 0.0, cap)
            b.var(f"eta[{i},{t}]", eta_lo, eta_hi)
            b.var(f"reff[{i},{t}]", 0.0, cap * eta_hi)
            b.var(f"q[{i},{t}]", 0.0)
            b.var(f"tq[{i},{t}]", 0.0)
            b.var(f"dsla[{i},{t}]", 0.0)
            b.var(f"pdyn[{i},{t}]", 0.0, dc.P_dyn_bar)
            b.var(f"pserv[{i},{t}]", 0.0)
            b.var(f"pcool[{i},{t}]", 0.0)
            b.var(f"qcool[{i},{t}]", 0.0, dc.Q_cool_max)
            b.var(f"temp[{i},{t}]", dc.T_min, dc.T_max)
            b.var(f"pgrid[{i},{t}]", 0.0)
        for t in range(T):
            # backlog recursion, initial queue empty
            coeffs = {b.index(f"q[{i},{t}]"): 1.0,
                      b.index(f"reff[{i},{t}]"): dt}
            if t > 0:
                coeffs[b.index(f"q[{i},{t - 1}]")] = -1.0
            b.row(coeffs, "==", float(scenario.u_arrivals[i, t]) * dt,
                  f"queue[{i},{t}]")
            # processing limited by committed units
            b.row({b.index(f"r[{i},{t}]"): 1.0,
                   b.index(f"x[{i},{t}]"): -dc.R_max}, "<=", 0.0,
                  f"cap[{i},{t}]")
            # product envelope for reff = r * eta
            eta_lo = dc.eta_min if dc.eta_factors is None \
                else dc.eta_min * dc.eta_factors[t]
            eta_hi = dc.eta_max if dc.eta_factors is None \
                else dc.eta_max * dc.eta_factors[t]
            rows = mccormick_envelope((0.0, cap), (eta_lo, eta_hi), cap)
            sym = {"r": b.index(f"r[{i},{t}]"),
                   "eta": b.index(f"eta[{i},{t}]"),
                   "reff": b.index(f"reff[{i},{t}]")}
            for k, row in enumerate(rows, 1):
                b.row({sym[s]: v for s, v in row.coeffs.items()},
                      row.sense, row.rhs, f"mc{k}[{i},{t}]")
            # dynamic power tracks utilization
            b.row({b.index(f"pdyn[{i},{t}]"): 1.0,
                   b.index(f"reff[{i},{t}]"): -dc.P_dyn_bar / cap},
                  "==", 0.0, f"pdyn[{i},{t}]")
            b.row({b.index(f"pserv[{i},{t}]"): 1.0,
                   b.index(f"x[{i},{t}]"): -dc.P_idle,
                   b.index(f"pdyn[{i},{t}]"): -1.0},
                  "==", 0.0, f"pserv[{i},{t}]")
            # queueing delay and SLA slack
            b.row({b.index(f"tq[{i},{t}]"): 1.0,
                   b.index(f"q[{i},{t}]"): -1.0 / dc.R_nominal},
                  ">=", 0.0, f"tqueue[{i},{t}]")
            b.row({b.index(f"dsla[{i},{t}]"): 1.0,
                   b.index(f"tq[{i},{t}]"): -1.0},
                  ">=", -dc.SLA, f"sla[{i},{t}]")
            # hall temperature: previous period's heat minus cooling and
            # ambient losses; start pinned at ambient
            if t == 0:
                b.row({b.index(f"temp[{i},0]"): 1.0}, "==", float(amb[0]),
                      f"temp[{i},0]")
            else:
                k_loss = dc.beta_loss / dc.C_dis
                b.row({b.index(f"temp[{i},{t}]"): 1.0,
                       b.index(f"temp[{i},{t - 1}]"): -(1.0 - k_loss),
                       b.index(f"pserv[{i},{t - 1}]"): -dc.beta_heat / dc.C_dis,
                       b.index(f"qcool[{i},{t - 1}]"): dc.beta_cool / dc.C_dis},
                      "==", float(k_loss * amb[t - 1]), f"temp[{i},{t}]")
            b.row({b.index(f"pcool[{i},{t}]"): 1.0,
                   b.index(f"x[{i},{t}]"): -dc.P_cool_base,
                   b.index(f"qcool[{i},{t}]"): -1.0 / dc.COP},
                  "==", 0.0, f"pcool[{i},{t}]")
            b.row({b.index(f"pgrid[{i},{t}]"): 1.0,
                   b.index(f"pserv[{i},{t}]"): -1.0,
                   b.index(f"pcool[{i},{t}]"): -1.0},
                  "==", 0.0, f"pgrid[{i},{t}]")


def _add_system_block(b: InstanceBuilder, system: EnergySystemModel,
                      scenario: Scenario, n_cost_segments: int) -> None:
    T = system.horizon_T
    dt = system.delta_t
    grid = system.grid
    for t in range(T):
        b.var(f"Pimp[{t}]", 0.0, grid.P_imp_max)
        b.var(f"Pexp[{t}]", 0.0, grid.P_exp_max)
        b.var(f"dimp[{t}]", 0, 1, integer=True)
    for g, gen in enumerate(system.generators):
        for t in range(T):
            b.var(f"pg[{g},{t}]", gen.P_min, gen.P_max)
            b.var(f"cg[{g},{t}]", -np.inf, np.inf)
    for s, st in enumerate(system.storages):
        for t in range(T):
            b.var(f"z[{s},{t}]", 0, 1, integer=True)
            b.var(f"pch[{s},{t}]", 0.0, st.P_ch_max)
            b.var(f"pdch[{s},{t}]", 0.0, st.P_dch_max)
            b.var(f"E[{s},{t}]", st.E_min, st.E_max)

    for t in range(T):
        # import/export mutual exclusion and contracted import ceiling
        b.row({b.index(f"Pimp[{t}]"): 1.0,
               b.index(f"dimp[{t}]"): -grid.P_imp_max}, "<=", 0.0,
              f"imp[{t}]")
        b.row({b.index(f"Pexp[{t}]"): 1.0,
               b.index(f"dimp[{t}]"): grid.P_exp_max}, "<=",
              grid.P_exp_max, f"exp[{t}]")
        b.row({b.index(f"Pimp[{t}]"): 1.0}, "<=", grid.P_contract,
              f"contract[{t}]")

    for g, gen in enumerate(system.generators):
        chord = _chords(piecewise_linearize_cost(
            gen.alpha, gen.beta, (gen.P_min, gen.P_max), n_cost_segments))
        for t in range(T):
            if t > 0:
                b.row({b.index(f"pg[{g},{t}]"): 1.0,
                       b.index(f"pg[{g},{t - 1}]"): -1.0}, "<=",
                      gen.R_up * dt, f"rampup[{g},{t}]")
                b.row({b.index(f"pg[{g},{t - 1}]"): 1.0,
                       b.index(f"pg[{g},{t}]"): -1.0}, "<=",
                      gen.R_down * dt, f"rampdn[{g},{t}]")
            for k, (slope, intercept) in enumerate(chord):
                b.row({b.index(f"cg[{g},{t}]"): 1.0,
                       b.index(f"pg[{g},{t}]"): -slope}, ">=", intercept,
                      f"gcost[{g},{t},{k}]")

    for s, st in enumerate(system.storages):
        for t in range(T):
            b.row({b.index(f"pch[{s},{t}]"): 1.0,
                   b.index(f"z[{s},{t}]"): -st.P_ch_max}, "<=", 0.0,
                  f"chg[{s},{t}]")
            b.row({b.index(f"pdch[{s},{t}]"): 1.0,
                   b.index(f"z[{s},{t}]"): st.P_dch_max}, "<=",
                  st.P_dch_max, f"dch[{s},{t}]")
            # end-of-period charge driven by this period's flows
            coeffs = {b.index(f"E[{s},{t}]"): 1.0,
                      b.index(f"pch[{s},{t}]"): -st.eta_ch * dt,
                      b.index(f"pdch[{s},{t}]"): dt / st.eta_dch}
            rhs = 0.0
            if t > 0:
                coeffs[b.index(f"E[{s},{t - 1}]")] = -1.0
            else:
                rhs = st.E_min
            b.row(coeffs, "==", rhs, f"soc[{s},{t}]")
