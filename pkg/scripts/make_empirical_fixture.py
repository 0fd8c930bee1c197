"""Write an illustrative fixed-structure fixture: the cost-optimal HEN at u = 1.275 V."""

import json
from pathlib import Path

from ptlhen.case_data import load_reference_case
from ptlhen.empirical import fixture_from_design
from ptlhen.milp import SolveOptions
from ptlhen.pareto import TIE_BREAK, build_problem, solve_point

OUT = Path(__file__).resolve().parents[1] / "src" / "ptlhen" / "data" / "example_fixture.json"

if __name__ == "__main__":
    opts = SolveOptions(mip_gap_target=0.01, time_limit_s=120.0)
    p = build_problem(load_reference_case(), "fixed:1.275", opts)
    pt = solve_point(p, p.f2 + TIE_BREAK * p.f1, opts)
    fx = fixture_from_design(pt.design)
    fx = fx.__class__(fx.u, fx.matches, fx.utilities, {k: (round(t, 3), round(f, 5)) for k, (t, f) in fx.cs.items()})
    OUT.write_text(json.dumps(fx.to_dict(), indent=1) + "\n")
    print(OUT, len(fx.matches), "matches", len(fx.utilities), "utilities")
