"""Solver backends: HiGHS in-process and CBC over MPS files."""

from __future__ import annotations

import logging
import math
import os
import re
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from .model import BINARY, LinExpr, MilpModel, Var
from .mps import col_name, emit_mps

log = logging.getLogger(__name__)

OPTIMAL = "optimal_within_gap"
INFEASIBLE = "infeasible"
TIMEOUT_NO_SOLUTION = "timeout_no_solution"
TIMEOUT_WITH_INCUMBENT = "timeout_with_incumbent"

CBC_ENV = "PTLHEN_CBC"


class SolverConfigError(RuntimeError):
    """Requested backend is not available."""


@dataclass
class SolveOptions:
    mip_gap_target: float = 0.01
    time_limit_s: float = 600.0
    threads: int = 1
    backend: str = "highs"
    seed: int = 0
    verbose: bool = False


@dataclass(frozen=True)
class Solution:
    status: str
    values: dict = field(default_factory=dict)
    objective_value: float = math.nan
    mip_gap: float = math.nan
    solve_seconds: float = 0.0
    backend: str = ""
    x: tuple = ()

    @property
    def has_solution(self) -> bool:
        return self.status in (OPTIMAL, TIMEOUT_WITH_INCUMBENT)

    def __getitem__(self, v: Var | str) -> float:
        if isinstance(v, Var):
            return self.x[v.index]
        return self.values[v]

    def value(self, e) -> float:
        if isinstance(e, Var):
            return self.x[e.index]
        return LinExpr.of(e).value(self.x)


def _arrays(m: MilpModel, bounds: dict | None, objective):
    n = len(m.variables)
    obj = m.objective if objective is None else LinExpr.of(objective)
    c = np.zeros(n)
    for k, v in obj.terms.items():
        c[k] = v
    lo = np.array([v.lower for v in m.variables], dtype=float)
    up = np.array([v.upper for v in m.variables], dtype=float)
    if bounds:
        for k, (a, b) in bounds.items():
            lo[k], up[k] = a, b
    rows, cols, vals = [], [], []
    rlo = np.empty(len(m.constraints))
    rup = np.empty(len(m.constraints))
    for r, con in enumerate(m.constraints):
        for k, a in con.terms.items():
            rows.append(r)
            cols.append(k)
            vals.append(a)
        if con.sense == "<=":
            rlo[r], rup[r] = -np.inf, con.rhs
        elif con.sense == ">=":
            rlo[r], rup[r] = con.rhs, np.inf
        else:
            rlo[r] = rup[r] = con.rhs
    A = sparse.csc_matrix((vals, (rows, cols)), shape=(len(m.constraints), n))
    integ = np.array([v.kind == BINARY for v in m.variables])
    return c, obj.constant, lo, up, A, rlo, rup, integ


def _finish(m: MilpModel, status: str, x, obj_const: float, obj_val: float, gap: float, secs: float,
            backend: str) -> Solution:
    if x is None:
        return Solution(status, {}, math.nan, math.nan if status != INFEASIBLE else math.nan, secs, backend)
    x = [float(v) for v in x]
    for v in m.variables:
        if v.kind == BINARY:
            x[v.index] = float(round(x[v.index])) if abs(x[v.index] - round(x[v.index])) <= 1e-6 else x[v.index]
    values = {v.name: x[v.index] for v in m.variables}
    return Solution(status, values, obj_val + obj_const, gap, secs, backend, tuple(x))


def solve_highs(m: MilpModel, opts: SolveOptions, bounds=None, objective=None, relax: bool = False) -> Solution:
    try:
        import highspy
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise SolverConfigError("highspy is not installed") from exc
    c, c0, lo, up, A, rlo, rup, integ = _arrays(m, bounds, objective)
    h = highspy.Highs()
    h.setOptionValue("output_flag", bool(opts.verbose))
    h.setOptionValue("mip_rel_gap", float(opts.mip_gap_target))
    h.setOptionValue("time_limit", float(opts.time_limit_s))
    h.setOptionValue("threads", int(max(1, opts.threads)))
    h.setOptionValue("random_seed", int(opts.seed))
    h.setOptionValue("mip_feasibility_tolerance", 1e-7)
    h.setOptionValue("primal_feasibility_tolerance", 1e-8)
    n = len(m.variables)
    if n == 0:
        return Solution(OPTIMAL, {}, c0, 0.0, 0.0, "highs", ())
    lp = highspy.HighsLp()
    lp.num_col_ = n
    lp.num_row_ = A.shape[0]
    lp.col_cost_ = c
    lp.offset_ = float(c0)  # keeps the relative gap on the true objective scale
    lp.col_lower_ = np.where(np.isinf(lo), -highspy.kHighsInf, lo)
    lp.col_upper_ = np.where(np.isinf(up), highspy.kHighsInf, up)
    lp.row_lower_ = np.where(np.isinf(rlo), -highspy.kHighsInf, rlo)
    lp.row_upper_ = np.where(np.isinf(rup), highspy.kHighsInf, rup)
    lp.a_matrix_.format_ = highspy.MatrixFormat.kColwise
    lp.a_matrix_.start_ = A.indptr
    lp.a_matrix_.index_ = A.indices
    lp.a_matrix_.value_ = A.data
    if integ.any() and not relax:
        lp.integrality_ = [highspy.HighsVarType.kInteger if b else highspy.HighsVarType.kContinuous for b in integ]
    h.passModel(lp)
    t0 = time.perf_counter()
    h.run()
    secs = time.perf_counter() - t0
    ms = h.getModelStatus()
    info = h.getInfo()
    has_x = info.primal_solution_status == 2
    name = h.modelStatusToString(ms)
    mip = bool(integ.any()) and not relax
    gap = float(info.mip_gap) if mip else 0.0
    if ms == highspy.HighsModelStatus.kOptimal:
        status = OPTIMAL
        if not mip:
            gap = 0.0
    elif ms in (highspy.HighsModelStatus.kInfeasible, highspy.HighsModelStatus.kUnboundedOrInfeasible):
        return Solution(INFEASIBLE, {}, math.nan, math.nan, secs, "highs")
    elif has_x:
        status = TIMEOUT_WITH_INCUMBENT
        log.info("HiGHS stopped (%s) with incumbent, gap %.4g", name, gap)
    else:
        status = TIMEOUT_NO_SOLUTION
        log.info("HiGHS stopped (%s) without a solution", name)
        return Solution(status, {}, math.nan, math.nan, secs, "highs")
    x = np.asarray(h.getSolution().col_value)
    return _finish(m, status, x, 0.0, info.objective_function_value, gap, secs, "highs")


def find_cbc() -> str | None:
    """Locate a CBC executable: env var, PATH, then the copy bundled with PuLP."""
    env = os.environ.get(CBC_ENV)
    if env:
        return env if Path(env).exists() else None
    p = shutil.which("cbc")
    if p:
        return p
    try:
        import pulp  # noqa: F401

        base = Path(pulp.__file__).parent / "solverdir" / "cbc" / "linux"
        for arch in ("i64", "arm64", "i32"):
            cand = base / arch / "cbc"
            if cand.exists():
                return str(cand)
    except ImportError:
        pass
    return None


_CBC_HEAD = re.compile(r"^\s*(.*?)\s+-\s+objective value\s+(\S+)", re.I)


def parse_cbc_solution(text: str, n: int) -> tuple[str, float, list[float] | None]:
    """Parse a CBC ``-solu`` file into (headline, objective, x)."""
    lines = text.splitlines()
    if not lines:
        return "empty", math.nan, None
    head = lines[0]
    mo = _CBC_HEAD.match(head)
    obj = float(mo.group(2)) if mo else math.nan
    x = [0.0] * n
    for ln in lines[1:]:
        tok = ln.replace("**", " ").split()
        if len(tok) < 3:
            continue
        name = tok[1]
        if not name.startswith("X"):
            continue
        x[int(name[1:]) - 1] = float(tok[2])
    return head.strip(), obj, x


def solve_cbc(m: MilpModel, opts: SolveOptions, bounds=None, objective=None) -> Solution:
    exe = find_cbc()
    if exe is None:
        raise SolverConfigError(f"CBC executable not found (set {CBC_ENV})")
    obj = m.objective if objective is None else LinExpr.of(objective)
    n = len(m.variables)
    if n == 0:
        return Solution(OPTIMAL, {}, obj.constant, 0.0, 0.0, "cbc", ())
    with tempfile.TemporaryDirectory(prefix="ptlhen_cbc_") as tmp:
        mps_path = Path(tmp) / "model.mps"
        sol_path = Path(tmp) / "model.sol"
        mps_path.write_text(emit_mps(m, bounds=bounds, objective=obj))
        cmd = [exe, str(mps_path), "-sec", str(opts.time_limit_s), "-ratio", str(opts.mip_gap_target),
               "-threads", str(max(1, opts.threads)), "-randomSeed", str(opts.seed + 1),
               "-solve", "-solu", str(sol_path)]
        t0 = time.perf_counter()
        proc = subprocess.run(cmd, capture_output=True, text=True)
        secs = time.perf_counter() - t0
        stdout = proc.stdout
        if not sol_path.exists():
            raise SolverConfigError(f"CBC produced no solution file:\n{stdout[-2000:]}")
        head, objval, x = parse_cbc_solution(sol_path.read_text(), n)
    low = head.lower()
    gap = 0.0
    mg = re.search(r"Gap:\s+(\S+)", stdout)
    if mg:
        try:
            gap = float(mg.group(1))
        except ValueError:
            gap = math.nan
    if low.startswith("optimal"):
        status = OPTIMAL
    elif "infeasible" in low:
        return Solution(INFEASIBLE, {}, math.nan, math.nan, secs, "cbc")
    elif "stopped" in low and "no solution" not in stdout.lower() and x is not None and not math.isnan(objval):
        status = TIMEOUT_WITH_INCUMBENT
    else:
        return Solution(TIMEOUT_NO_SOLUTION, {}, math.nan, math.nan, secs, "cbc")
    return _finish(m, status, x, obj.constant, objval, gap, secs, "cbc")


BACKENDS = {"highs": solve_highs, "cbc": solve_cbc}


def solve(m: MilpModel, opts: SolveOptions | None = None, *, bounds: dict[Var, tuple[float, float]] | None = None,
          objective=None, relax: bool = False) -> Solution:
    """Solve ``m`` (minimization). ``bounds`` overrides variable bounds for this call only."""
    opts = opts or SolveOptions()
    if opts.backend not in BACKENDS:
        raise SolverConfigError(f"unknown backend {opts.backend!r}; choose from {sorted(BACKENDS)}")
    b = {v.index: (float(lo), float(hi)) for v, (lo, hi) in bounds.items()} if bounds else None
    if relax:
        if opts.backend != "highs":
            raise SolverConfigError("LP relaxation is only available with the highs backend")
        return solve_highs(m, opts, b, objective, relax=True)
    if opts.backend == "highs":
        return solve_highs(m, opts, b, objective)
    return solve_cbc(m, opts, b, objective)


def polish(m: MilpModel, sol: Solution, opts: SolveOptions | None = None, *,
           bounds: dict[Var, tuple[float, float]] | None = None, objective=None) -> Solution:
    """Fix binaries at their rounded values and re-solve the remaining LP.

    Removes integrality noise (e.g. a tiny duty under a switched-off indicator)
    while keeping the incumbent's structure. Gap and status of ``sol`` carry over.
    """
    if not sol.has_solution:
        return sol
    fixed = dict(bounds or {})
    for v in m.variables:
        if v.kind == BINARY:
            r = float(round(sol.x[v.index]))
            fixed[v] = (r, r)
    o = SolveOptions(**{**opts.__dict__, "backend": "highs"}) if opts else SolveOptions()
    lp = solve_highs(m, o, {v.index: b for v, b in fixed.items()}, objective, relax=True)
    if not lp.has_solution:
        log.warning("polishing LP failed (%s); keeping the raw incumbent", lp.status)
        return sol
    return Solution(sol.status, lp.values, lp.objective_value, sol.mip_gap, sol.solve_seconds + lp.solve_seconds,
                    sol.backend, lp.x)


def available_backends() -> list[str]:
    out = []
    try:
        import highspy  # noqa: F401

        out.append("highs")
    except ImportError:  # pragma: no cover
        pass
    if find_cbc():
        out.append("cbc")
    return out


__all__ = [
    "OPTIMAL", "INFEASIBLE", "TIMEOUT_NO_SOLUTION", "TIMEOUT_WITH_INCUMBENT", "Solution", "SolveOptions",
    "SolverConfigError", "solve", "polish", "available_backends", "find_cbc", "parse_cbc_solution", "col_name",
]
