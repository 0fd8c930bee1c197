"""Adapted epsilon-constraint method for the (efficiency, production cost) front.

f1 = -eta is minimized; f2 = c_prod is held inside a closed band
[eps_i, eps_{i+1}] per window. The f2 range is split into equal windows.
A small multiple of the other objective is added as a tie-breaker so that
slack cost terms stay tight.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .case_data import CaseDefinition
from .milp import (INFEASIBLE, OPTIMAL, TIMEOUT_WITH_INCUMBENT, MilpModel, Solution, SolveOptions, new_model,
                   polish, solve)
from .objectives import Boxes, ObjectiveBundle, build_objectives, exact_objectives, presolve_boxes
from .superstructure import HenBlock, HenDesign, Mode, build_hen, check_solution, extract_design

log = logging.getLogger(__name__)

TIE_BREAK = 1e-4


class SweepError(RuntimeError):
    pass


@dataclass
class Problem:
    """A built coupled (or fixed-point) model with both objectives."""

    case: CaseDefinition
    mode: Mode
    model: MilpModel
    hen: HenBlock
    obj: ObjectiveBundle
    boxes: Boxes

    @property
    def f1(self):
        return -1.0 * self.obj.eta_var

    @property
    def f2(self):
        return self.obj.cprod_var


def build_problem(c: CaseDefinition, mode: Mode | str = "coupled", opts: SolveOptions | None = None,
                  boxes: Boxes | None = None) -> Problem:
    from .superstructure import parse_mode

    mode = parse_mode(mode) if isinstance(mode, str) else mode
    if boxes is None:
        pre = SolveOptions(**{**(opts or SolveOptions()).__dict__})
        pre.mip_gap_target = min(pre.mip_gap_target, 0.01)
        pre.time_limit_s = min(pre.time_limit_s, 120.0)
        boxes = presolve_boxes(c, mode, pre)
    m = new_model(f"ptl_{mode}")
    hen = build_hen(m, c, mode)
    obj = build_objectives(m, c, hen, boxes)
    return Problem(c, mode, m, hen, obj, boxes)


@dataclass(frozen=True)
class ParetoPoint:
    eta: float  # fraction (encoded surface value)
    c_prod: float  # EUR/kg (encoded surface value)
    u: float  # V
    design: HenDesign | None
    mip_gap: float
    solve_seconds: float
    window_index: int  # -1 for the cost-optimal corner
    status: str = OPTIMAL
    band: tuple[float, float] = (-math.inf, math.inf)
    exact: dict = field(default_factory=dict, compare=False)
    diagnostics: tuple = ()

    @property
    def accepted(self) -> bool:
        return self.design is not None


def _tol_band(lo: float, hi: float, tol: float = 1e-7) -> tuple[float, float]:
    return lo - tol * max(1.0, abs(lo)), hi + tol * max(1.0, abs(hi))


def _acceptable(sol: Solution, opts: SolveOptions) -> bool:
    if sol.status == OPTIMAL:
        return True
    return sol.status == TIMEOUT_WITH_INCUMBENT and sol.mip_gap <= 2.0 * opts.mip_gap_target


def solve_point(p: Problem, objective, opts: SolveOptions, band: tuple[float, float] | None = None,
                window_index: int = -1) -> ParetoPoint:
    """Solve one scalarized problem and turn it into a ParetoPoint (possibly rejected)."""
    bounds = {p.obj.cprod_var: _tol_band(*band)} if band is not None else None
    sol = solve(p.model, opts, bounds=bounds, objective=objective)
    b = band or (-math.inf, math.inf)
    if not _acceptable(sol, opts):
        return ParetoPoint(math.nan, math.nan, math.nan, None, sol.mip_gap, sol.solve_seconds, window_index,
                           sol.status, b)
    sol = polish(p.model, sol, opts, bounds=bounds, objective=objective)
    design = extract_design(sol, p.hen)
    diags = tuple(check_solution(sol, p.hen))
    if diags:
        log.warning("window %d: structural check failed: %s", window_index, diags)
    return ParetoPoint(sol[p.obj.eta_var], sol[p.obj.cprod_var], sol[p.hen.u], design, sol.mip_gap,
                       sol.solve_seconds, window_index, sol.status, b, exact_objectives(p.case, design), diags)


def objective_bounds(p: Problem, opts: SolveOptions | None = None) -> tuple[ParetoPoint, ParetoPoint]:
    """Corner points: (min f2, i.e. cheapest) and (min f1, i.e. most efficient)."""
    opts = opts or SolveOptions()
    cheap = solve_point(p, p.f2 + TIE_BREAK * p.f1, opts)
    if not cheap.accepted:
        raise SweepError(f"cost-optimal solve failed with status {cheap.status}")
    best = solve_point(p, p.f1 + TIE_BREAK * p.f2, opts)
    if not best.accepted:
        raise SweepError(f"efficiency-optimal solve failed with status {best.status}")
    return cheap, best


def epsilon_windows(f2_min: float, f2_max: float, m_points: int) -> list[tuple[float, float]]:
    if m_points < 2:
        raise ValueError("m_points must be >= 2")
    if f2_max < f2_min:
        f2_min, f2_max = f2_max, f2_min
    n = m_points - 1
    w = (f2_max - f2_min) / n
    edges = [f2_min + k * w for k in range(n)] + [f2_max]
    return list(zip(edges[:-1], edges[1:]))


def epsilon_sweep(p: Problem, m_points: int, opts: SolveOptions | None = None, workers: int = 1,
                  corners: tuple[ParetoPoint, ParetoPoint] | None = None) -> list[ParetoPoint]:
    """All solved points: the cost-optimal corner plus one point per f2 window.

    Rejected windows (infeasible, or timeout without an acceptable incumbent)
    are returned with ``design = None``.
    """
    opts = opts or SolveOptions()
    cheap, best = corners or objective_bounds(p, opts)
    f2_lo, f2_hi = cheap.c_prod, best.c_prod
    wins = epsilon_windows(f2_lo, f2_hi, m_points)
    if f2_hi - f2_lo <= 1e-9 * max(1.0, abs(f2_hi)):
        # single feasible objective value: one window around it
        wins = [(f2_lo, f2_hi)]
    objective = p.f1 + TIE_BREAK * p.f2

    def run(k: int) -> ParetoPoint:
        if k == len(wins) - 1:
            # the last window contains the efficiency-optimal corner itself
            return ParetoPoint(best.eta, best.c_prod, best.u, best.design, best.mip_gap, best.solve_seconds, k,
                               best.status, wins[k], best.exact, best.diagnostics)
        return solve_point(p, objective, opts, wins[k], k)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as ex:
        pts = list(ex.map(run, range(len(wins))))
    return [cheap] + pts


def dominates(a: ParetoPoint, b: ParetoPoint) -> bool:
    """``a`` is at least as good in both objectives and strictly better in one."""
    ge = a.eta >= b.eta and a.c_prod <= b.c_prod
    gt = a.eta > b.eta or a.c_prod < b.c_prod
    return ge and gt


def filter_nondominated(points: list[ParetoPoint], tol: float = 1e-9) -> list[ParetoPoint]:
    """Accepted, mutually non-dominated points sorted by c_prod; duplicates dropped."""
    pts = [q for q in points if q.accepted]
    keep = [q for q in pts if not any(dominates(o, q) for o in pts if o is not q)]
    keep.sort(key=lambda q: (q.c_prod, -q.eta))
    out: list[ParetoPoint] = []
    for q in keep:
        if out and abs(q.c_prod - out[-1].c_prod) <= tol * max(1.0, abs(q.c_prod)) and \
                abs(q.eta - out[-1].eta) <= tol:
            continue
        out.append(q)
    return out


__all__ = [
    "Problem", "ParetoPoint", "build_problem", "objective_bounds", "epsilon_sweep", "epsilon_windows",
    "filter_nondominated", "dominates", "solve_point", "SweepError", "INFEASIBLE",
]
