"""Energy model: linearization helpers, central/reduced builders,
schedule validation, file formats."""

import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dcfed.energy import (
    Scenario,
    ScheduleSolution,
    build_centralized,
    build_reduced,
    mccormick_envelope,
    piecewise_linearize_cost,
    validate_schedule,
)
from dcfed.energy.costs import cost_components, cost_components_reduced, extract_reduced
from dcfed.energy.io import (
    load_scenario,
    load_solution,
    load_system,
    save_scenario,
    save_solution,
    save_system,
)
from dcfed.energy.params import ParameterError
from dcfed.milp import solve_milp
from dcfed.milp.instance import ModelError
from dcfed.sim import sample_scenario, tiny_profile, tiny_system


def _zero_scenario(system, T=None):
    T = T or system.horizon_T
    return Scenario(
        lambda_imp=np.zeros(T), lambda_exp=np.zeros(T),
        lambda_reg=np.zeros(T),
        u_arrivals=np.zeros((system.n_dc, T)),
        T_ambient=np.full(T, 295.0), L_base=np.zeros(T))


# ---------------------------------------------------------------- envelope

def test_envelope_rows_substituted_coefficients():
    rows = mccormick_envelope((0.0, 10.0), (0.8, 1.0), 10.0)
    assert len(rows) == 3
    assert rows[0].coeffs == {"reff": 1.0, "r": -1.0} and rows[0].sense == "<="
    assert rows[1].coeffs == {"reff": 1.0, "eta": -10.0}
    assert rows[2].coeffs == {"reff": -1.0, "r": 0.8}


def test_envelope_degenerate_interval_pins_product():
    rows = mccormick_envelope((0.0, 10.0), (1.0, 1.0), 10.0)
    # at eta fixed to 1 the first and third rows force reff = r
    for r in (0.0, 4.2, 10.0):
        assert rows[0].violation(r, 1.0, r) <= 1e-12
        assert rows[2].violation(r, 1.0, r) <= 1e-12
        assert rows[0].violation(r, 1.0, r + 1e-3) > 0


def test_envelope_contains_true_product_point():
    rows = mccormick_envelope((0.0, 10.0), (0.8, 1.0), 10.0)
    for row in rows:
        assert row.violation(5.0, 0.9, 4.5) <= 0.0


def test_envelope_rejects_inverted_bounds():
    with pytest.raises(ParameterError):
        mccormick_envelope((5.0, 1.0), (0.8, 1.0), 10.0)
    with pytest.raises(ParameterError):
        mccormick_envelope((0.0, 10.0), (1.0, 0.8), 10.0)


@settings(max_examples=200, deadline=None)
@given(r=st.floats(0.0, 10.0), eta=st.floats(0.8, 1.0))
def test_envelope_validity_over_box(r, eta):
    rows = mccormick_envelope((0.0, 10.0), (0.8, 1.0), 10.0)
    for row in rows:
        assert row.violation(r, eta, r * eta) <= 1e-9


def test_envelope_tight_at_box_corners():
    lo, hi = 0.8, 1.0
    cap = 10.0
    rows = mccormick_envelope((0.0, cap), (lo, hi), cap)
    for r, eta in [(0.0, lo), (0.0, hi), (cap, lo), (cap, hi)]:
        reff = r * eta
        # the true product at every corner sits on at least one facet
        residuals = [row.violation(r, eta, reff) for row in rows]
        assert max(residuals) <= 1e-12
        assert any(abs(v) <= 1e-12 for v in residuals)


# ------------------------------------------------------------- piecewise

def test_piecewise_linear_cost_exact_two_points():
    pts = piecewise_linearize_cost(2.0, 0.0, (1.0, 5.0), 8)
    assert pts == [(1.0, 2.0), (5.0, 10.0)]


def test_piecewise_breakpoints_and_gap_hand_case():
    pts = piecewise_linearize_cost(0.0, 1.0, (0.0, 2.0), 2)
    assert pts == [(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]
    # chord on [0, 1] is y = x; gap to x^2 peaks at 0.25 in the middle
    assert (0.5 - 0.25) == pytest.approx(0.25)


@pytest.mark.parametrize("alpha,beta,rng,n", [
    (0.05, 1e-4, (0.0, 500.0), 8),
    (0.0, 1.0, (0.0, 2.0), 2),
    (0.3, 0.02, (10.0, 60.0), 5),
])
def test_piecewise_overestimates_within_analytic_bound(alpha, beta, rng, n):
    pts = piecewise_linearize_cost(alpha, beta, rng, n)
    width = (rng[1] - rng[0]) / max(n, 1)
    bound = beta * width * width / 4.0
    for (p0, c0), (p1, c1) in zip(pts, pts[1:]):
        for frac in np.linspace(0.0, 1.0, 17):
            p = p0 + frac * (p1 - p0)
            chord = c0 + (c1 - c0) * frac
            true = alpha * p + beta * p * p
            assert chord >= true - 1e-12
            assert chord - true <= bound + 1e-12


def test_piecewise_rejects_bad_arguments():
    with pytest.raises(ParameterError):
        piecewise_linearize_cost(1.0, 1.0, (0.0, 1.0), 0)
    with pytest.raises(ParameterError):
        piecewise_linearize_cost(1.0, 1.0, (0.0, np.inf), 4)


# ------------------------------------------------------------- builders

def test_central_build_hand_counted_rows_and_columns():
    system = tiny_system(horizon_T=2)
    scen = _zero_scenario(system)
    inst = build_centralized(system, scen, n_cost_segments=8)
    T, I, G, S = 2, 1, 1, 1
    # columns: 13 per DC-period; imp/exp/flag per period; pg+cg per
    # generator-period; z/pch/pdch/E per storage-period
    expect_cols = 13 * I * T + 3 * T + 2 * G * T + 4 * S * T
    assert inst.n_vars == expect_cols == 44
    counts = {}
    for row in inst.rows:
        counts[row.family] = counts.get(row.family, 0) + 1
    expect = {
        "queue": I * T, "cap": I * T, "mc1": I * T, "mc2": I * T,
        "mc3": I * T, "pdyn": I * T, "pserv": I * T, "tqueue": I * T,
        "sla": I * T, "temp": I * T, "pcool": I * T, "pgrid": I * T,
        "imp": T, "exp": T, "contract": T,
        "rampup": G * (T - 1), "rampdn": G * (T - 1),
        "gcost": G * T * 8,
        "chg": S * T, "dch": S * T, "soc": S * T,
        "balance": T,
    }
    assert counts == expect
    assert inst.n_rows == sum(expect.values()) == 56
    ints = {inst.variables[j].name.split("[")[0] for j in inst.integer_indices()}
    assert ints == {"x", "dimp", "z"}


def test_null_scenario_costs_nothing():
    system = tiny_system(horizon_T=2)
    scen = _zero_scenario(system)
    sol = solve_milp(build_centralized(system, scen, n_cost_segments=2),
                     gap_target=1e-9)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(0.0, abs=1e-7)
    sched = ScheduleSolution.from_vector(
        build_centralized(system, scen, n_cost_segments=2), sol.x)
    report = validate_schedule(system, scen, sched, tol=1e-6)
    assert report["ok"], report


def test_overloaded_fleet_queue_grows_linearly():
    # arrivals far beyond fleet capacity: backlog must grow at the
    # closed-form rate u - cap*eta_max and the SLA slack activate once
    # the implied delay crosses the SLA
    system = tiny_system(horizon_T=4)
    dc = system.data_centers[0]
    u = dc.capacity * dc.eta_max + 300.0
    scen = _zero_scenario(system)
    scen = dataclasses.replace(scen, u_arrivals=np.full((1, 4), u))
    inst = build_centralized(system, scen, n_cost_segments=2)
    sol = solve_milp(inst, gap_target=1e-9)
    sched = ScheduleSolution.from_vector(inst, sol.x)
    for t in range(4):
        q_expected = (u - dc.capacity * dc.eta_max) * (t + 1)
        assert sched.q[0, t] == pytest.approx(q_expected, rel=1e-6)
        delay = q_expected / dc.R_nominal
        assert sched.delta_sla[0, t] == pytest.approx(
            max(delay - dc.SLA, 0.0), rel=1e-6)


def test_build_rejects_bad_static_data():
    system = tiny_system(horizon_T=2)
    scen = _zero_scenario(system)
    hot = dataclasses.replace(scen, T_ambient=np.full(2, 320.0))
    with pytest.raises(ModelError):
        build_centralized(system, hot)
    with pytest.raises(ParameterError):
        dataclasses.replace(system.data_centers[0], SLA=-1.0)


def test_reduced_matches_central_on_its_own_aggregates():
    system = tiny_system(horizon_T=3)
    scen = sample_scenario(tiny_profile(3), seed=5)
    inst = build_centralized(system, scen, n_cost_segments=4)
    central = solve_milp(inst, gap_target=1e-9)
    sched = ScheduleSolution.from_vector(inst, central.x)
    agg_p = sched.p_grid.sum(axis=0)
    agg_pen = sched.delta_sla[0] * system.data_centers[0].C_penalty * system.delta_t
    rinst = build_reduced(system, scen, agg_p, agg_pen, n_cost_segments=4)
    reduced = solve_milp(rinst, gap_target=1e-9)
    assert reduced.status == "optimal"
    disp = extract_reduced(rinst, reduced.x)
    assert disp["slack_pos"].sum() + disp["slack_neg"].sum() == pytest.approx(0.0, abs=1e-7)
    cc_central = cost_components(system, scen, sched)
    cc_reduced = cost_components_reduced(system, scen, disp, float(agg_pen.sum()))
    # the reduced optimum can only improve on the central dispatch's
    # grid-side cost, and both satisfy the same balance
    assert cc_reduced["total"] <= cc_central["total"] + 1e-6
    assert cc_reduced["total"] == pytest.approx(cc_central["total"],
                                                rel=2e-2)


def test_reduced_zero_aggregates_idle():
    system = tiny_system(horizon_T=3)
    scen = _zero_scenario(system)
    rinst = build_reduced(system, scen, np.zeros(3), np.zeros(3))
    sol = solve_milp(rinst, gap_target=1e-9)
    assert sol.objective == pytest.approx(0.0, abs=1e-7)
    disp = extract_reduced(rinst, sol.x)
    assert np.allclose(disp["p_imp"], 0.0, atol=1e-7)
    assert np.allclose(disp["p_ch"], 0.0, atol=1e-7)


def test_reduced_impossible_aggregate_uses_slack():
    system = tiny_system(horizon_T=3)
    scen = _zero_scenario(system)
    cap = (system.grid.P_imp_max
           + sum(g.P_max for g in system.generators)
           + sum(s.P_dch_max for s in system.storages))
    agg = np.array([0.0, cap + 500.0, 0.0])
    rinst = build_reduced(system, scen, agg, np.zeros(3))
    sol = solve_milp(rinst, gap_target=1e-6)
    assert sol.status in ("optimal", "gap_limit")
    disp = extract_reduced(rinst, sol.x)
    assert disp["slack_pos"][1] >= 499.0  # infeasible without the slack
    assert disp["slack_pos"][[0, 2]].max() <= 1e-6


def test_reduced_constant_penalty_enters_objective():
    system = tiny_system(horizon_T=3)
    scen = _zero_scenario(system)
    pen = np.array([5.0, 7.0, 1.0])
    rinst = build_reduced(system, scen, np.zeros(3), pen)
    sol = solve_milp(rinst, gap_target=1e-9)
    assert sol.objective == pytest.approx(pen.sum(), abs=1e-7)


# ------------------------------------------------------------- validation

def _solved_tiny(seed=5, T=3):
    system = tiny_system(horizon_T=T)
    scen = sample_scenario(tiny_profile(T), seed=seed)
    inst = build_centralized(system, scen, n_cost_segments=4)
    sol = solve_milp(inst, gap_target=1e-9)
    return system, scen, ScheduleSolution.from_vector(inst, sol.x)


def test_solver_output_validates_clean():
    system, scen, sched = _solved_tiny()
    report = validate_schedule(system, scen, sched, tol=1e-6)
    assert report["ok"], report
    assert report["max_violation"] <= 1e-6


def test_conservation_and_mutual_exclusion_properties():
    for seed in (1, 5, 9):
        system, scen, sched = _solved_tiny(seed=seed)
        dt = system.delta_t
        q_prev = 0.0
        for t in range(system.horizon_T):
            flow = (scen.u_arrivals[0, t] - sched.r_eff[0, t]) * dt
            assert sched.q[0, t] - q_prev == pytest.approx(flow, abs=1e-6)
            q_prev = sched.q[0, t]
        st = system.storages[0]
        e_prev = st.E_min
        for t in range(system.horizon_T):
            delta = (st.eta_ch * sched.p_ch[0, t]
                     - sched.p_dch[0, t] / st.eta_dch) * dt
            assert sched.e_soc[0, t] - e_prev == pytest.approx(delta, abs=1e-9)
            e_prev = sched.e_soc[0, t]
        assert float(np.max(sched.p_imp * sched.p_exp)) <= 1e-9
        assert float(np.max(sched.p_ch * sched.p_dch)) <= 1e-9


def test_perturbed_commitment_shows_up_in_definition_rows():
    system, scen, sched = _solved_tiny()
    dc = system.data_centers[0]
    bad = dataclasses.replace(sched, x=sched.x + 1.0)
    report = validate_schedule(system, scen, bad, tol=1e-6)
    assert not report["ok"]
    # an extra unit changes idle draw and cooling base draw exactly
    assert report["families"]["pserv"] == pytest.approx(dc.P_idle, rel=1e-9)
    assert report["families"]["pcool"] == pytest.approx(dc.P_cool_base, rel=1e-9)


def test_validation_reports_dimension_error():
    system, scen, sched = _solved_tiny()
    bad = dataclasses.replace(sched, x=np.zeros((0, 0)))
    report = validate_schedule(system, scen, bad)
    assert not report["ok"]
    assert "dimension" in report["error"]


# ------------------------------------------------------------------- io

def test_system_and_scenario_roundtrip(tmp_path):
    system = tiny_system()
    save_system(system, tmp_path / "sys.json")
    again = load_system(tmp_path / "sys.json")
    assert again == system

    scen = sample_scenario(tiny_profile(3), seed=2)
    save_scenario(scen, tmp_path / "scen.csv")
    back = load_scenario(tmp_path / "scen.csv", seed=2)
    for field in ("lambda_imp", "lambda_exp", "lambda_reg", "T_ambient",
                  "L_base", "u_arrivals"):
        assert np.allclose(getattr(back, field), getattr(scen, field),
                           atol=1e-9)
    header = (tmp_path / "scen.csv").read_text().splitlines()[0]
    assert header == "t,lambda_imp,lambda_exp,lambda_reg,T_ambient,L_base,u_dc0"


def test_solution_roundtrip(tmp_path):
    system, scen, sched = _solved_tiny()
    sched.objective_value = 12.5
    sched.optimality_gap = 1e-9
    save_solution(sched, tmp_path / "sol")
    back = load_solution(tmp_path / "sol")
    for fam in ("x", "q", "p_grid", "p_imp", "e_soc"):
        assert np.allclose(getattr(back, fam), getattr(sched, fam), atol=1e-9)
    assert back.objective_value == 12.5
