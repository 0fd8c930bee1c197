"""Evaluate a fixed HEN structure (e.g. a hand-drawn design) with the same cost model.

Fixture format (JSON)::

    {"u": 1.275,
     "matches": [["H1", "C7", 0], ...],          # hot, cold, stage (0-based)
     "utilities": ["H3", "C2", ...],            # streams with a utility exchanger
     "cs": {"CS1": {"t_out": 300.0, "f": 0.8}}}  # optional fixed CS settings

All listed units are forced on and every other unit off; duties and
temperatures stay free and the resulting LP (plus surface binaries) is solved
for minimum production cost.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .case_data import CaseDefinition, CaseError, ParamModel
from .milp import SolveOptions, new_model, polish, solve
from .objectives import build_objectives, exact_objectives, presolve_boxes
from .pareto import ParetoPoint
from .superstructure import Mode, build_hen, check_solution, extract_design


@dataclass(frozen=True)
class Fixture:
    u: float
    matches: tuple[tuple[str, str, int], ...]
    utilities: tuple[str, ...]
    cs: dict

    @classmethod
    def from_dict(cls, d: dict) -> "Fixture":
        try:
            u = float(d["u"])
            matches = tuple((str(h), str(c), int(k)) for h, c, k in d.get("matches", []))
            utils = tuple(str(s) for s in d.get("utilities", []))
            cs = {k: (float(v["t_out"]), float(v["f"])) for k, v in d.get("cs", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise CaseError(f"malformed fixture: {exc}") from exc
        return cls(u, matches, utils, cs)

    def to_dict(self) -> dict:
        return {"u": self.u, "matches": [list(m) for m in self.matches], "utilities": list(self.utilities),
                "cs": {k: {"t_out": t, "f": f} for k, (t, f) in self.cs.items()}}


def load_fixture(path: str | Path) -> Fixture:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"fixture file not found: {path}")
    return Fixture.from_dict(json.loads(path.read_text()))


def fixture_from_design(design) -> Fixture:
    return Fixture(design.u, tuple((m.hot, m.cold, m.stage) for m in design.matches),
                   tuple(u.stream for u in design.utilities), dict(design.cs_settings))


def _pin_cs(c: CaseDefinition, cs: dict) -> CaseDefinition:
    streams = []
    for s in c.streams:
        if s.id in cs:
            t_out, f = cs[s.id]
            lo, hi = s.f.bounds()
            if not lo - 1e-9 <= f <= hi + 1e-9:
                raise CaseError(f"fixture: {s.id} F = {f} outside [{lo}, {hi}]")
            s = dataclasses.replace(s, t_out=ParamModel.const(t_out), f=ParamModel.const(f))
        streams.append(s)
    return dataclasses.replace(c, streams=tuple(streams))


def evaluate_fixture(c: CaseDefinition, fx: Fixture, opts: SolveOptions | None = None) -> ParetoPoint:
    """Cost-optimal operation of a fixed structure; returns a single point (window -1)."""
    opts = opts or SolveOptions(mip_gap_target=1e-4, time_limit_s=120.0)
    known = {s.id for s in c.streams}
    for h, k, _ in fx.matches:
        if h not in known or k not in known:
            raise CaseError(f"fixture references unknown stream in match {h}-{k}")
    case = _pin_cs(c, fx.cs)
    mode = Mode.fixed(fx.u)
    boxes = presolve_boxes(case, mode, opts)
    m = new_model("empirical")
    hen = build_hen(m, case, mode)
    obj = build_objectives(m, case, hen, boxes)
    on = set(fx.matches)
    for key in on:
        if key not in hen.matches:
            raise CaseError(f"fixture match {key} is not admissible in the superstructure")
    bounds = {}
    for key, mv in hen.matches.items():
        v = 1.0 if key in on else 0.0
        bounds[mv.z] = (v, v)
    for sid, sv in hen.streams.items():
        if sv.z_util is not None:
            v = 1.0 if sid in fx.utilities else 0.0
            bounds[sv.z_util] = (v, v)
    objective = obj.cprod_var - 1e-4 * obj.eta_var
    sol = solve(m, opts, bounds=bounds, objective=objective)
    if not sol.has_solution:
        return ParetoPoint(float("nan"), float("nan"), fx.u, None, sol.mip_gap, sol.solve_seconds, -1, sol.status)
    sol = polish(m, sol, opts, bounds=bounds, objective=objective)
    d = extract_design(sol, hen)
    return ParetoPoint(sol[obj.eta_var], sol[obj.cprod_var], fx.u, d, sol.mip_gap, sol.solve_seconds, -1,
                       sol.status, exact=exact_objectives(case, d), diagnostics=tuple(check_solution(sol, hen)))


__all__ = ["Fixture", "load_fixture", "fixture_from_design", "evaluate_fixture"]
