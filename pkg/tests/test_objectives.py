import pytest

from ptlhen.case_data import minimal_case
from ptlhen.milp import SolveOptions, new_model, solve
from ptlhen.objectives import (
    MWH_PER_KWH,
    Boxes,
    build_capex,
    build_objectives,
    build_opex,
    exact_objectives,
    m_prod_from_cost,
)
from ptlhen.pareto import build_problem
from ptlhen.pwl_fit import build_simplex_surface
from ptlhen.superstructure import HenDesign, MatchRecord, Mode, build_hen, extract_design

T = 8000.0


def _empty_design(u=1.305, n=0):
    recs = tuple(MatchRecord(f"H{k}", "C1", 0, 1.0, 0.0, 10.0) for k in range(n))
    return HenDesign(u, recs, (), {}, {})


class TestElectricity:
    def test_utility_terms(self, ref_case):
        e = ref_case.economics
        assert e.eps_cu * 155.62 == pytest.approx(7.781)
        assert e.eps_hu * 5.90 == pytest.approx(6.195)

    def test_p_el_without_utilities(self, ref_case):
        m = new_model()
        hen = build_hen(m, ref_case, Mode.fixed(1.29))
        b = build_objectives(m, ref_case, hen, None)
        off = {sv.q_util: (0.0, 0.0) for sv in hen.streams.values() if sv.q_util is not None}
        off.update({sv.z_util: (0.0, 0.0) for sv in hen.streams.values() if sv.z_util is not None})
        sol = solve(m, SolveOptions(mip_gap_target=0.05), bounds=off, objective=b.p_el_var)
        if sol.has_solution:
            assert sol[b.p_el_var] == pytest.approx(ref_case.performance.p_sys.model(1.29))

    def test_p_el_identity(self, ref_case):
        m = new_model()
        hen = build_hen(m, ref_case, Mode.fixed(1.305))
        b = build_objectives(m, ref_case, hen, None)
        sol = solve(m, SolveOptions(mip_gap_target=0.02), objective=b.tac_var)
        d = extract_design(sol, hen)
        e = ref_case.economics
        expect = ref_case.performance.p_sys.model(1.305) + e.eps_hu * d.sum_q_hu + e.eps_cu * d.sum_q_cu
        assert sol[b.p_el_var] == pytest.approx(expect, rel=1e-9)


class TestEfficiency:
    def test_node_exact_half(self):
        s = build_simplex_surface(lambda h, p: h / p, (400, 600), (800, 1200), 3, 3)
        assert s(500.0, 1000.0) == pytest.approx(0.5, abs=1e-15)

    def test_back_computed_corner(self):
        s = build_simplex_surface(lambda h, p: h / p, (600, 700), (1100, 1200), 2, 2)
        assert s(657.6, 1132.0) == pytest.approx(0.5809, abs=1e-3)

    def test_eta_is_minimized_negated(self, ref_case, ref_boxes):
        p = build_problem(ref_case, Mode.fixed(1.305), boxes=ref_boxes)
        assert p.f1.terms == {p.obj.eta_var.index: -1.0}

    def test_surface_values_close_to_exact(self, ref_case, ref_boxes):
        p = build_problem(ref_case, Mode.fixed(1.305), boxes=ref_boxes)
        sol = solve(p.model, SolveOptions(mip_gap_target=0.01), objective=p.f2)
        d = extract_design(sol, p.hen)
        ex = exact_objectives(ref_case, d)
        assert sol[p.obj.eta_var] == pytest.approx(ex["eta"], rel=0.01)
        assert sol[p.obj.cprod_var] == pytest.approx(ex["c_prod"], rel=0.03)


class TestCapex:
    def test_capex_sys(self, ref_case):
        m = new_model()
        hen = build_hen(m, ref_case, Mode.fixed(1.305))
        sys_, _ = build_capex(m, ref_case, hen)
        assert sys_.constant == pytest.approx(500_000.0)

    def test_fixed_part_27_units(self, ref_case):
        assert _empty_design(n=27).hen_capex(ref_case) == pytest.approx(1368.36)

    def test_no_exchangers(self, ref_case):
        assert _empty_design().hen_capex(ref_case) == 0.0


class TestOpex:
    def test_zero_flows(self):
        c = minimal_case([("H1", 150, 50, 1.0)], [("C1", 20, 120, 1.0)])
        m = new_model()
        hen = build_hen(m, c, Mode.fixed(0.5))
        assert build_opex(m, c, hen, 0.0).value([0.0] * len(m.variables)) == 0.0

    def test_electricity_only(self):
        c = minimal_case([("H1", 150, 50, 1.0)], [("C1", 20, 120, 1.0)])
        m = new_model()
        hen = build_hen(m, c, Mode.fixed(0.5))
        assert build_opex(m, c, hen, 1000.0).constant == pytest.approx(20 * 1000 * MWH_PER_KWH * 8000)
        assert build_opex(m, c, hen, 1000.0).constant == pytest.approx(160_000.0)

    def test_reference_opex_at_upper_voltage(self, ref_case):
        m = new_model()
        hen = build_hen(m, ref_case, Mode.fixed(1.305))
        b = build_objectives(m, ref_case, hen, None)
        sol = solve(m, SolveOptions(mip_gap_target=0.01), objective=b.tac_var)
        assert sol.value(b.opex_expr) == pytest.approx(259_880.0, rel=0.01)


class TestProductionCost:
    def test_inverted_cost(self):
        assert m_prod_from_cost(785_870.0, 1.834, T) == pytest.approx(53.56, rel=1e-3)

    def test_tac_doubling_at_nodes(self):
        s = build_simplex_surface(lambda a, b: a / (T * b), (1000, 3000), (40, 60), 3, 3)
        for j in range(3):
            assert s.node_values[1, j] == pytest.approx(2 * s.node_values[0, j])

    def test_tac_identity(self, ref_case):
        m = new_model()
        hen = build_hen(m, ref_case, Mode.fixed(1.29))
        b = build_objectives(m, ref_case, hen, None)
        sol = solve(m, SolveOptions(mip_gap_target=0.02), objective=b.tac_var)
        parts = sum(sol.value(e) for e in (b.capex_sys_expr, b.capex_hen_expr, b.opex_expr))
        assert sol[b.tac_var] == pytest.approx(parts, rel=1e-9)
        assert sol.value(b.tac_expr()) == pytest.approx(parts, rel=1e-9)


class TestBoxes:
    def test_boxes_ordered_and_positive(self, ref_boxes):
        for lo, hi in (ref_boxes.h_dot, ref_boxes.p_el, ref_boxes.tac, ref_boxes.m_prod):
            assert 0 < lo < hi

    def test_bad_box_rejected(self, ref_case):
        from ptlhen.pwl_fit import DomainError

        m = new_model()
        hen = build_hen(m, ref_case, Mode.fixed(1.305))
        with pytest.raises(DomainError):
            build_objectives(m, ref_case, hen, Boxes((400, 700), (-5, 1200), (6e5, 8e5), (30, 60)))
