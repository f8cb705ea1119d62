"""Cost estimators, the closed-form gate count, and report audits."""
from __future__ import annotations

import pytest

from trottersmith import (
    GateTimingModel,
    ResourceReport,
    audit,
    build_lattice,
    build_trotter_circuit,
    color_model,
    estimate_first_order,
    estimate_higher_order,
    estimate_scaled,
    first_order,
    formula_for_order,
    report_for_plan,
    steps_for_accuracy,
)
from trottersmith.resources import class_repetitions, first_order_gate_closed_form


class TestTimingModel:
    def test_defaults(self):
        tm = GateTimingModel()
        assert tm.t_inf == 1.0
        assert tm.s == 0.0

    def test_rejects_negative_and_all_zero(self):
        with pytest.raises(ValueError, match="nonnegative"):
            GateTimingModel(t_inf=-1.0)
        with pytest.raises(ValueError, match="positive"):
            GateTimingModel(t_inf=0.0, s=0.0)
        GateTimingModel(t_inf=0.0, s=2.0)


class TestClassRepetitions:
    def test_values(self):
        assert class_repetitions(1) == 1
        assert class_repetitions(2) == 2
        assert class_repetitions(4) == 10
        assert class_repetitions(6) == 50

    def test_odd_order_rejected(self):
        with pytest.raises(ValueError, match="even"):
            class_repetitions(3)


class TestFirstOrderEstimate:
    def test_worked_chain_example(self):
        rep = estimate_first_order(n=4, num_classes=2, j=1.0, t=1.0, epsilon=0.01)
        assert rep.m == 150
        assert rep.interaction_gates == 600
        assert rep.depth == 300
        assert rep.simulation_time == pytest.approx(300.0)
        assert rep.cnots == 6 * 600
        assert rep.assumptions["bound_used"] == "first_order_explicit"
        assert rep.assumptions["template"] == "general-6cnot"

    def test_heisenberg_template_halves_cnots(self):
        rep = estimate_first_order(4, 2, 1.0, 1.0, 0.01, heisenberg=True)
        assert rep.cnots == 3 * 600 == 1800
        assert rep.assumptions["template"] == "heisenberg-3cnot"

    def test_closed_form_matches_unceiled_count(self):
        assert first_order_gate_closed_form(2, 4, 1.0, 1.0, 0.01) == pytest.approx(600.0)
        # the ceiled estimate can only exceed the closed form
        for eps in (0.01, 0.007, 0.0031):
            rep = estimate_first_order(4, 2, 1.0, 1.0, eps)
            assert rep.interaction_gates >= first_order_gate_closed_form(
                2, 4, 1.0, 1.0, eps
            ) - 1e-9

    def test_halving_epsilon_doubles_gates(self):
        a = estimate_first_order(4, 2, 1.0, 1.0, 0.01)
        b = estimate_first_order(4, 2, 1.0, 1.0, 0.005)
        assert b.m == 2 * a.m
        assert b.interaction_gates == 2 * a.interaction_gates

    def test_edges_per_sweep_corrects_open_boundaries(self):
        # chain on 4 sites has 3 bonds, not n*K/2 = 4
        rep = estimate_first_order(4, 2, 1.0, 1.0, 0.01, edges_per_sweep=3)
        assert rep.interaction_gates == 150 * 3
        assert "regular_lattice_gates" not in rep.assumptions
        full = estimate_first_order(4, 2, 1.0, 1.0, 0.01)
        assert full.assumptions["regular_lattice_gates"] == 600


class TestHigherOrderEstimate:
    def test_worked_fourth_order_example(self):
        rep = estimate_higher_order(2, 4, 2, 1.0, 1.0, 0.01)
        assert rep.order == 4
        assert rep.m == 11
        assert rep.interaction_gates == 11 * 10 * 4 == 440
        assert rep.depth == 11 * 10 * 2 == 220
        assert rep.simulation_time == pytest.approx(220.0)
        assert rep.assumptions["bound_used"] == "higher_order_scaling"
        assert rep.assumptions["stages_per_step"] == 20

    def test_q_validation(self):
        with pytest.raises(ValueError, match=">= 1"):
            estimate_higher_order(0, 4, 2, 1.0, 1.0, 0.01)

    def test_constants_echoed(self):
        rep = estimate_higher_order(2, 4, 2, 1.0, 1.0, 0.01, c3=2.0, c4=3.0)
        assert rep.assumptions["c3"] == 2.0
        assert rep.assumptions["c4"] == 3.0


class TestMonotonicity:
    def test_in_time(self):
        reps = [estimate_first_order(4, 2, 1.0, t, 0.01) for t in (0.5, 1.0, 2.0, 4.0)]
        for a, b in zip(reps, reps[1:]):
            assert b.interaction_gates >= a.interaction_gates
            assert b.simulation_time >= a.simulation_time

    def test_in_accuracy(self):
        reps = [estimate_first_order(4, 2, 1.0, 1.0, e) for e in (0.1, 0.03, 0.01, 0.001)]
        for a, b in zip(reps, reps[1:]):
            assert b.interaction_gates >= a.interaction_gates
            assert b.simulation_time >= a.simulation_time

    def test_in_system_size(self):
        reps = [estimate_first_order(n, 2, 1.0, 1.0, 0.01) for n in (4, 6, 8, 12)]
        for a, b in zip(reps, reps[1:]):
            assert b.interaction_gates >= a.interaction_gates

    def test_in_class_count(self):
        reps = [estimate_first_order(8, k, 1.0, 1.0, 0.01) for k in (2, 3, 4)]
        for a, b in zip(reps, reps[1:]):
            assert b.interaction_gates >= a.interaction_gates
            assert b.simulation_time >= a.simulation_time

    def test_higher_order_in_time(self):
        reps = [estimate_higher_order(2, 4, 2, 1.0, t, 0.01) for t in (1.0, 2.0, 4.0)]
        for a, b in zip(reps, reps[1:]):
            assert b.interaction_gates >= a.interaction_gates


class TestScaledRegime:
    def test_independence_of_everything_but_kst(self):
        assert estimate_scaled(2, 2.0, 2.0) == pytest.approx(8.0)
        assert estimate_scaled(4, 0.5, 3.0) == pytest.approx(6.0)
        assert estimate_scaled(3, 1.0, 0.0) == 0.0

    def test_slope_must_be_positive(self):
        with pytest.raises(ValueError, match="positive"):
            estimate_scaled(2, 0.0, 1.0)
        with pytest.raises(ValueError, match="positive"):
            estimate_scaled(2, -1.0, 1.0)

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            estimate_scaled(2, 1.0, -1.0)


class TestReportValidation:
    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError, match="nonnegative"):
            ResourceReport(order=1, m=1, interaction_gates=-1, cnots=0, depth=0,
                           simulation_time=0.0)
        with pytest.raises(ValueError, match="nonnegative"):
            ResourceReport(order=1, m=1, interaction_gates=0, cnots=0, depth=0,
                           simulation_time=-1.0)


class TestAudit:
    def test_scaled_first_order_pass(self, heis_chain4):
        col = color_model(heis_chain4)
        plan = steps_for_accuracy(1, 2, 4, 1.0, 1.0, 0.2)
        circ = build_trotter_circuit(
            heis_chain4, col, first_order(2), plan.m, 1.0, mode="scaled"
        )
        report = report_for_plan(plan, 4, edges_per_sweep=3)
        assert audit(report, circ) == []

    def test_first_order_mismatch_flagged_both_ways(self, heis_chain4):
        col = color_model(heis_chain4)
        plan = steps_for_accuracy(1, 2, 4, 1.0, 1.0, 0.2)
        circ = build_trotter_circuit(
            heis_chain4, col, first_order(2), plan.m, 1.0, mode="scaled"
        )
        good = report_for_plan(plan, 4, edges_per_sweep=3)
        for delta in (-1, +1):
            bad = ResourceReport(
                order=good.order,
                m=good.m,
                interaction_gates=good.interaction_gates + delta,
                cnots=good.cnots,
                depth=good.depth,
                simulation_time=good.simulation_time,
            )
            issues = audit(bad, circ)
            assert any("interaction gates" in msg for msg in issues)

    def test_decomposed_checks_cnots(self, heis_chain4):
        col = color_model(heis_chain4)
        plan = steps_for_accuracy(1, 2, 4, 1.0, 1.0, 0.75)
        circ = build_trotter_circuit(
            heis_chain4, col, first_order(2), plan.m, 1.0, mode="heisenberg"
        )
        report = report_for_plan(plan, 4, heisenberg=True, edges_per_sweep=3)
        assert audit(report, circ) == []

    def test_higher_order_merging_is_not_an_overrun(self, heis_chain4):
        col = color_model(heis_chain4)
        plan = steps_for_accuracy(2, 2, 4, 1.0, 1.0, 0.05)
        f = formula_for_order(2, 2)
        circ = build_trotter_circuit(heis_chain4, col, f, plan.m, 1.0, mode="scaled")
        report = report_for_plan(plan, 4, edges_per_sweep=3)
        # merged stages land below the unmerged prediction; that is fine
        from trottersmith import counts

        assert counts(circ)["interaction"] < report.interaction_gates
        assert audit(report, circ) == []

    def test_higher_order_overrun_still_flagged(self, heis_chain4):
        col = color_model(heis_chain4)
        plan = steps_for_accuracy(2, 2, 4, 1.0, 1.0, 0.05)
        f = formula_for_order(2, 2)
        circ = build_trotter_circuit(heis_chain4, col, f, plan.m, 1.0, mode="scaled")
        from trottersmith import counts

        measured = counts(circ)["interaction"]
        bad = ResourceReport(
            order=2,
            m=plan.m,
            interaction_gates=measured - 1,
            cnots=6 * (measured - 1),
            depth=10**6,
            simulation_time=0.0,
        )
        issues = audit(bad, circ)
        assert any("interaction gates" in msg for msg in issues)
