"""LP/MILP solver contracts: oracle equivalence, determinism, budgets."""

import numpy as np
import pytest

from dcfed import _kernels
from dcfed.milp import (
    EnumerationCapError,
    InstanceBuilder,
    SimplexError,
    brute_force_milp,
    solve_lp,
    solve_milp,
    write_lp_text,
)
from dcfed.milp.instance import ModelError

from helpers.tableau_ref import solve_instance as tableau_solve_instance


def _simple_lp():
    b = InstanceBuilder()
    x = b.var("x", 0.0, np.inf)
    b.row({x: 1.0}, ">=", 3.0, "floor")
    b.obj(x, 1.0)
    return b.build()


def test_min_x_at_least_3():
    sol = solve_lp(_simple_lp())
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(3.0, abs=1e-9)
    assert sol.x[0] == pytest.approx(3.0, abs=1e-9)


def test_degenerate_tie_is_deterministic():
    # two optimal vertices: min -x - y over the unit square's diagonal face
    def build():
        b = InstanceBuilder()
        x = b.var("x", 0.0, 1.0)
        y = b.var("y", 0.0, 1.0)
        b.row({x: 1.0, y: 1.0}, "<=", 1.0, "diag")
        b.obj(x, -1.0)
        b.obj(y, -1.0)
        return b.build()

    first = solve_lp(build())
    for _ in range(5):
        again = solve_lp(build())
        assert np.array_equal(first.x, again.x)
        assert first.iterations == again.iterations


def _random_instance(rng, n, m, integers=0, int_span=1):
    # MILP cases keep every bound finite so relaxations cannot be unbounded
    b = InstanceBuilder()
    for j in range(n):
        if j < integers:
            b.var(f"x{j}", 0, int_span, integer=True)
        else:
            lo = 0.0 if rng.random() < 0.5 else float(rng.uniform(-3, 0))
            unbounded = integers == 0 and rng.random() < 0.25
            hi = np.inf if unbounded else lo + float(rng.integers(1, 6))
            b.var(f"x{j}", lo, hi)
    A = np.round(rng.normal(size=(m, n)) * (rng.random((m, n)) < 0.7) * 2) / 2
    for i in range(m):
        coeffs = {j: A[i, j] for j in range(n) if A[i, j]}
        if not coeffs:
            continue
        sense = rng.choice(["<=", ">=", "=="], p=[0.7, 0.25, 0.05])
        rhs = float(np.round(rng.normal() * 3, 1))
        if sense == "<=":
            rhs += 2.0  # keep the origin-ish region feasible most of the time
        elif sense == ">=":
            rhs -= 2.0
        b.row(coeffs, sense, rhs, f"r{i}")
    for j in range(n):
        b.obj(j, float(np.round(rng.normal(), 2)))
    return b.build()


def test_random_lps_match_tableau_oracle():
    rng = np.random.default_rng(101)
    checked = 0
    for _ in range(60):
        inst = _random_instance(rng, 10, 10)
        got = solve_lp(inst)
        status, obj = tableau_solve_instance(inst)
        if status == "stall":
            continue
        assert got.status == status
        if status == "optimal":
            checked += 1
            assert got.objective == pytest.approx(obj, abs=1e-7 * (1 + abs(obj)))
    assert checked >= 30


def test_unbounded_and_infeasible_detection():
    b = InstanceBuilder()
    x = b.var("x", -np.inf, np.inf)
    b.obj(x, 1.0)
    b.row({x: 1.0}, "<=", 5.0, "cap")
    assert solve_lp(b.build()).status == "unbounded"

    b = InstanceBuilder()
    x = b.var("x", 0.0, 1.0)
    b.row({x: 1.0}, ">=", 2.0, "imposs")
    assert solve_lp(b.build()).status == "infeasible"


def test_iteration_budget_raises_with_diagnostics():
    rng = np.random.default_rng(5)
    inst = _random_instance(rng, 12, 12)
    with pytest.raises(SimplexError) as err:
        solve_lp(inst, max_iter=2)
    assert err.value.iterations <= 2
    assert err.value.size[1] == 12


def test_kernel_backends_agree():
    if "cython" not in _kernels.available_backends():
        pytest.skip("compiled kernel not built")
    rng = np.random.default_rng(77)
    for _ in range(40):
        inst = _random_instance(rng, int(rng.integers(3, 15)),
                                int(rng.integers(3, 15)))
        a = solve_lp(inst, backend="python")
        c = solve_lp(inst, backend="cython")
        assert a.status == c.status
        if a.status == "optimal":
            assert a.objective == pytest.approx(c.objective, abs=1e-8 * (1 + abs(a.objective)))


def test_knapsack_binary():
    b = InstanceBuilder()
    x = b.var("x", 0, 1, integer=True)
    y = b.var("y", 0, 1, integer=True)
    b.row({x: 1.0, y: 1.0}, "<=", 1.0, "pick")
    b.obj(x, -3.0)
    b.obj(y, -2.0)
    sol = solve_milp(b.build())
    assert sol.objective == pytest.approx(-3.0, abs=1e-9)
    assert sol.x[0] == 1 and sol.x[1] == 0


def test_gap_target_terminates_early():
    rng = np.random.default_rng(11)
    inst = _random_instance(rng, 10, 8, integers=6, int_span=3)
    tight = solve_milp(inst, gap_target=1e-9)
    loose = solve_milp(inst, gap_target=0.5)
    assert loose.gap <= 0.5
    assert loose.node_count <= tight.node_count


def test_brute_force_no_integers_is_lp():
    rng = np.random.default_rng(3)
    inst = _random_instance(rng, 6, 6)
    lp = solve_lp(inst)
    bf = brute_force_milp(inst)
    assert bf.status == ("optimal" if lp.status == "optimal" else "infeasible")
    if lp.status == "optimal":
        assert bf.objective == pytest.approx(lp.objective, abs=1e-9)


def test_brute_force_enumerates_all_binaries():
    b = InstanceBuilder()
    for j in range(3):
        b.var(f"x{j}", 0, 1, integer=True)
        b.obj(j, [-1.0, -2.0, 1.5][j])
    inst = b.build()
    bf = brute_force_milp(inst)
    assert bf.node_count == 8
    assert bf.objective == pytest.approx(-3.0, abs=1e-12)


def test_brute_force_cap_refuses():
    b = InstanceBuilder()
    for j in range(13):
        b.var(f"x{j}", 0, 1, integer=True)
        b.obj(j, -1.0)
    with pytest.raises(EnumerationCapError):
        brute_force_milp(b.build(), enumeration_cap=4096)


def test_milp_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(2024)
    agreements = 0
    for _ in range(30):
        n = int(rng.integers(3, 8))
        inst = _random_instance(rng, n, int(rng.integers(2, 8)),
                                integers=int(rng.integers(1, min(n, 5) + 1)),
                                int_span=int(rng.integers(1, 4)))
        bb = solve_milp(inst, gap_target=1e-9)
        bf = brute_force_milp(inst, enumeration_cap=4096)
        assert bb.status == bf.status or (
            bb.status == "optimal" and bf.status == "optimal")
        if bf.status == "optimal":
            assert bb.objective == pytest.approx(bf.objective, abs=1e-6)
            assert bb.bound <= bb.objective + 1e-9
            agreements += 1
    assert agreements >= 10


def test_milp_determinism_bitwise():
    rng = np.random.default_rng(9)
    inst = _random_instance(rng, 8, 8, integers=4, int_span=2)
    a = solve_milp(inst, gap_target=1e-9)
    b = solve_milp(inst, gap_target=1e-9)
    assert a.node_count == b.node_count
    assert np.array_equal(a.x, b.x)
    assert a.objective == b.objective


def test_integer_variables_need_finite_bounds():
    b = InstanceBuilder()
    b.var("x", 0, np.inf, integer=True)
    with pytest.raises(ModelError):
        b.build()


def test_lp_text_dump_mentions_everything():
    inst = _simple_lp()
    text = write_lp_text(inst)
    assert "Minimize" in text and "floor" in text and "x" in text
    assert text.endswith("End\n")
