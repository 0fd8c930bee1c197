"""PtL efficiency and specific production cost on top of a HEN block.

    eta    = H_prod / P_el,          P_el = P_sys(u) + eps_hu*sum(q_hu) + eps_cu*sum(q_cu)
    c_prod = TAC / (t * m_prod),     TAC  = CAPEX_sys + CAPEX_HEN + OPEX

Both ratios are triangulated surfaces over boxes of their arguments; the
boxes come from cost-optimal and utility-optimal designs at both ends of the
operating range, widened by a margin.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .case_data import CaseDefinition
from .milp import LinExpr, MilpModel, SolveOptions, Var, new_model, polish, quicksum, solve
from .pwl_encode import EncodedBlock, encode_simplex_surface
from .pwl_fit import DomainError, SimplexSurface, build_simplex_surface
from .superstructure import HenBlock, Mode, build_hen, extract_design

log = logging.getLogger(__name__)

MWH_PER_KWH = 1e-3
ETA_GRID = (4, 4)
COST_GRID = (3, 3)


class ObjectiveBuildError(ValueError):
    pass


@dataclass(frozen=True)
class Boxes:
    h_dot: tuple[float, float]  # kW
    p_el: tuple[float, float]  # kW
    tac: tuple[float, float]  # EUR/yr
    m_prod: tuple[float, float]  # kg/h


@dataclass
class ObjectiveBundle:
    eta_var: Var
    cprod_var: Var
    p_el_var: Var
    h_dot_var: Var
    tac_var: Var
    m_prod_var: Var
    capex_hen_expr: LinExpr
    capex_sys_expr: LinExpr
    opex_expr: LinExpr
    boxes: Boxes | None = None
    eta_surface: SimplexSurface | None = None
    cost_surface: SimplexSurface | None = None
    eta_block: EncodedBlock | None = None
    cost_block: EncodedBlock | None = None
    extras: dict = field(default_factory=dict)

    def tac_expr(self) -> LinExpr:
        return self.capex_sys_expr + self.capex_hen_expr + self.opex_expr


def _box(lo: float, hi: float, margin: float) -> tuple[float, float]:
    """Widen [lo, hi] by ``margin`` of its width on each side.

    A degenerate interval (fixed operating point) is widened by ``margin`` of
    its value instead so the surface keeps a proper rectangle.
    """
    a, b = min(lo, hi), max(lo, hi)
    w = b - a
    if w <= 1e-9 * max(1.0, abs(b)):
        d = margin * max(abs(b), 1e-9)
        return a - d, b + d
    return a - margin * w, b + margin * w


def build_p_el(m: MilpModel, c: CaseDefinition, hen: HenBlock) -> Var:
    e = c.economics
    expr = hen.expr_of(c.performance.p_sys.model) + e.eps_hu * hen.sum_q_hu() + e.eps_cu * hen.sum_q_cu()
    p = m.add_variable("p_el", 0.0)
    m.add_constraint(p, "==", expr, name="def_p_el")
    return p


def build_capex(m: MilpModel, c: CaseDefinition, hen: HenBlock) -> tuple[LinExpr, LinExpr]:
    """(CAPEX_sys, CAPEX_HEN) in EUR/yr."""
    e = c.economics
    capex_sys = LinExpr.of(e.af_inv * e.c_sys)
    capex_hen = e.af_inv * (hen.area_cost() + e.c_f_hex * hen.unit_count())
    return capex_sys, capex_hen


def build_opex(m: MilpModel, c: CaseDefinition, hen: HenBlock, p_el: Var | LinExpr) -> LinExpr:
    """AF_op * t * (sum_f c_f * mdot_f + c_el * P_el), feeds in t/h, P_el in kW."""
    e = c.economics
    feeds = quicksum(e.feed_price(name) * hen.expr_of(p.model) for name, p in c.performance.feed_flows)
    return e.af_op * e.t_full_load * (feeds + e.c_el * MWH_PER_KWH * p_el)


def build_efficiency(m: MilpModel, c: CaseDefinition, b: ObjectiveBundle, h_box, p_box,
                     grid: tuple[int, int] = ETA_GRID) -> Var:
    if p_box[0] <= 0:
        raise DomainError("P_el box must be strictly positive for the efficiency ratio")
    surf = build_simplex_surface(lambda h, p: h / p, h_box, p_box, *grid)
    _clip(b.h_dot_var, h_box)
    _clip(b.p_el_var, p_box)
    lo, hi = surf.node_values.min(), surf.node_values.max()
    b.eta_var.lower, b.eta_var.upper = float(lo), float(hi)
    b.eta_block = encode_simplex_surface(m, surf, b.h_dot_var, b.p_el_var, b.eta_var, name="eta_surf")
    b.eta_surface = surf
    return b.eta_var


def build_production_cost(m: MilpModel, c: CaseDefinition, b: ObjectiveBundle, tac_box, m_box,
                          grid: tuple[int, int] = COST_GRID) -> Var:
    if m_box[0] <= 0:
        raise DomainError("product flow box must be strictly positive for the cost ratio")
    t = c.economics.t_full_load
    surf = build_simplex_surface(lambda tac, mp: tac / (t * mp), tac_box, m_box, *grid)
    _clip(b.tac_var, tac_box)
    _clip(b.m_prod_var, m_box)
    b.cprod_var.lower, b.cprod_var.upper = float(surf.node_values.min()), float(surf.node_values.max())
    b.cost_block = encode_simplex_surface(m, surf, b.tac_var, b.m_prod_var, b.cprod_var, name="cost_surf")
    b.cost_surface = surf
    return b.cprod_var


def _clip(v: Var, box) -> None:
    v.lower = max(v.lower, box[0])
    v.upper = min(v.upper, box[1])


def build_objectives(m: MilpModel, c: CaseDefinition, hen: HenBlock, boxes: Boxes | None = None) -> ObjectiveBundle:
    """Install P_el, H_prod, m_prod, TAC and (given boxes) both ratio surfaces."""
    p_el = build_p_el(m, c, hen)
    pf = c.performance
    h = m.add_variable("h_dot", 0.0)
    m.add_constraint(h, "==", hen.expr_of(pf.h_dot_prod.model), name="def_h_dot")
    mp = m.add_variable("m_prod", 0.0)
    m.add_constraint(mp, "==", hen.expr_of(pf.m_prod_total.model), name="def_m_prod")
    capex_sys, capex_hen = build_capex(m, c, hen)
    opex = build_opex(m, c, hen, p_el)
    tac = m.add_variable("tac", 0.0)
    m.add_constraint(tac, "==", capex_sys + capex_hen + opex, name="def_tac")
    eta = m.add_variable("eta", 0.0, 1.0)
    cprod = m.add_variable("c_prod", 0.0)
    b = ObjectiveBundle(eta, cprod, p_el, h, tac, mp, capex_hen, capex_sys, opex, boxes)
    if boxes is not None:
        build_efficiency(m, c, b, boxes.h_dot, boxes.p_el)
        build_production_cost(m, c, b, boxes.tac, boxes.m_prod)
    return b


def presolve_boxes(c: CaseDefinition, mode: Mode, opts: SolveOptions | None = None,
                   margin: float = 0.10) -> Boxes:
    """Argument boxes of both ratio surfaces from single-objective pre-solves.

    At each end of the admissible operating range (or the fixed point) the HEN
    is solved twice, once for minimum TAC and once for minimum P_el. The boxes
    span all recorded values plus ``margin`` of their width on each side.
    """
    opts = opts or SolveOptions(mip_gap_target=0.01, time_limit_s=60.0)
    us = [mode.u] if mode.kind == "fixed" else [c.opvar.lower, c.opvar.upper]
    rec = {"h": [], "p": [], "tac": [], "m": []}
    for u in us:
        m = new_model(f"presolve_{u}")
        hen = build_hen(m, c, Mode.fixed(u))
        b = build_objectives(m, c, hen, None)
        for obj in (b.tac_var, b.p_el_var):
            sol = solve(m, opts, objective=obj)
            if not sol.has_solution:
                raise ObjectiveBuildError(f"pre-solve at u = {u} failed with status {sol.status}")
            sol = polish(m, sol, opts, objective=obj)
            design = extract_design(sol, hen)
            tac_exact = sol.value(b.capex_sys_expr + b.opex_expr) + design.hen_capex(c)
            rec["h"].append(sol[b.h_dot_var])
            rec["p"].append(sol[b.p_el_var])
            rec["tac"].extend([sol[b.tac_var], tac_exact])
            rec["m"].append(sol[b.m_prod_var])
    return Boxes(_box(min(rec["h"]), max(rec["h"]), margin), _box(min(rec["p"]), max(rec["p"]), margin),
                 _box(min(rec["tac"]), max(rec["tac"]), margin), _box(min(rec["m"]), max(rec["m"]), margin))


def exact_objectives(c: CaseDefinition, design) -> dict:
    """Post-hoc objective values of an extracted design with exact division and exact areas."""
    e = c.economics
    pf = c.performance
    u = design.u
    p_el = float(pf.p_sys.model(u)) + e.eps_hu * design.sum_q_hu + e.eps_cu * design.sum_q_cu
    h = float(pf.h_dot_prod.model(u))
    mp = float(pf.m_prod_total.model(u))
    feeds = sum(e.feed_price(n) * float(p.model(u)) for n, p in pf.feed_flows)
    opex = e.af_op * e.t_full_load * (feeds + e.c_el * MWH_PER_KWH * p_el)
    capex_sys = e.af_inv * e.c_sys
    capex_hen = design.hen_capex(c)
    tac = capex_sys + capex_hen + opex
    return {"eta": h / p_el, "c_prod": tac / (e.t_full_load * mp), "p_el": p_el, "h_dot": h, "m_prod": mp,
            "tac": tac, "opex": opex, "capex_sys": capex_sys, "capex_hen": capex_hen}


def m_prod_from_cost(tac: float, c_prod: float, t_full_load: float) -> float:
    """Invert c_prod = TAC / (t * m_prod) for the product flow (kg/h)."""
    return tac / (c_prod * t_full_load)


__all__ = [
    "Boxes", "ObjectiveBundle", "build_p_el", "build_capex", "build_opex", "build_efficiency",
    "build_production_cost", "build_objectives", "presolve_boxes", "exact_objectives", "m_prod_from_cost",
    "ObjectiveBuildError",
]
