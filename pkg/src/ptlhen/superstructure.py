"""Stage-wise HEN superstructure with operating-point-dependent stream data.

Temperatures are indexed by location ``k = 0..K`` (K stages). Hot-side streams
(process hot and combustion-system streams) enter at location 0, cold streams
at location K; both are non-increasing in ``k``. A stage ``k`` spans locations
``k`` and ``k + 1``. Utilities sit at stream ends only: a cooler after the last
location of a hot stream, a heater after location 0 of a cold stream.

In coupled mode every u-dependent quantity is a linear expression in the
weights of one shared SOS2 grid over ``u``. Stage duties F(u)*dt use a
piecewise McCormick hull on that grid, exact whenever ``u`` sits on a grid node.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .case_data import COLD, CS, HOT, CaseDefinition, ParamModel, StreamDef, UtilityDef
from .milp import LinExpr, MilpModel, Solution, Var, quicksum
from .pwl_encode import EncodedBlock, encode_bilinear_product, encode_plane_envelope, encode_sos2_grid, interpolate
from .pwl_fit import PlaneEnvelope, Pwl1D, chen_lmtd, fit_convex_planes, rmse, sample_box

log = logging.getLogger(__name__)

T_GLOBAL = (0.0, 1000.0)
DT_LADDER = (10.0, 30.0, 100.0, 300.0, 1000.0)


class ExtractionError(RuntimeError):
    pass


@dataclass(frozen=True)
class Mode:
    kind: str = "coupled"  # coupled | fixed
    u: float | None = None

    @classmethod
    def coupled(cls) -> "Mode":
        return cls("coupled")

    @classmethod
    def fixed(cls, u: float) -> "Mode":
        return cls("fixed", float(u))

    def __str__(self) -> str:
        return "coupled" if self.kind == "coupled" else f"fixed:{self.u}"


@dataclass
class StreamVars:
    stream: StreamDef
    t: list[Var]  # locations 0..K
    duty: LinExpr  # total duty Q_s (model of u, or free for CS)
    duty_tol: float  # max |Q_pwl(u) - Q_exact(u)| over the operating range (kW)
    stage_tol: float  # max stage-balance interpolation error (kW)
    q_util: Var | None = None
    z_util: Var | None = None
    util_cost: Var | None = None
    util_dt: tuple = ()
    cs_f: Var | None = None


@dataclass
class MatchVars:
    hot: str
    cold: str
    stage: int
    q: Var
    z: Var
    cost: Var
    big_m: float


@dataclass
class HenBlock:
    case: CaseDefinition
    mode: Mode
    u: Var
    ugrid: EncodedBlock | None
    streams: dict[str, StreamVars]
    matches: dict[tuple[str, str, int], MatchVars]
    dt: dict[tuple[str, str, int], Var]
    envelopes: dict = field(default_factory=dict)
    envelope_gap: float = 0.0  # worst relative underestimate among fitted area envelopes

    def expr_of(self, p: Pwl1D | ParamModel | float) -> LinExpr:
        """Linear expression for a u-dependent model (constant in fixed mode)."""
        if isinstance(p, ParamModel):
            if p.is_free:
                raise ValueError("free parameters have no u model")
            p = p.pwl if p.variant == "pwl" else p.value
        if isinstance(p, (int, float)):
            return LinExpr.of(float(p))
        if self.ugrid is None:
            return LinExpr.of(float(p(self.mode.u)))
        if len(set(p.values)) == 1:
            return LinExpr.of(float(p.values[0]))
        return interpolate(self.ugrid, p)

    @property
    def q_cu(self) -> dict[str, Var]:
        return {k: s.q_util for k, s in self.streams.items() if s.stream.kind == HOT and s.q_util is not None}

    @property
    def q_hu(self) -> dict[str, Var]:
        return {k: s.q_util for k, s in self.streams.items() if s.stream.kind == COLD and s.q_util is not None}

    def sum_q_cu(self) -> LinExpr:
        return quicksum(self.q_cu.values())

    def sum_q_hu(self) -> LinExpr:
        return quicksum(self.q_hu.values())

    def unit_count(self) -> LinExpr:
        zs = [mv.z for mv in self.matches.values()]
        zs += [s.z_util for s in self.streams.values() if s.z_util is not None]
        return quicksum(zs)

    def area_cost(self) -> LinExpr:
        """Sum of variable exchanger cost terms c_v*A^beta (EUR/yr before AF_inv)."""
        cs = [mv.cost for mv in self.matches.values()]
        cs += [s.util_cost for s in self.streams.values() if s.util_cost is not None]
        return quicksum(cs)


# ---------------------------------------------------------------------------
# bounds and tightening helpers
# ---------------------------------------------------------------------------


def stream_duty_max(s: StreamDef) -> float:
    return s.duty_max()


def big_m_for_pair(i: StreamDef, j: StreamDef) -> float:
    """Upper bound on the duty any single exchanger between ``i`` and ``j`` can carry."""
    return min(stream_duty_max(i), stream_duty_max(j))


def gamma_for_pair(i: StreamDef, j: StreamDef, dt_min: float) -> float:
    """Relaxation of the approach constraint when the match is absent."""
    return max(0.0, dt_min + j.t_max() - i.t_min())


def pair_feasible(i: StreamDef, j: StreamDef, dt_min: float) -> bool:
    """A match can exist only if the hot stream can be hotter than the cold one by dt_min."""
    return i.t_max() >= j.t_min() + dt_min and big_m_for_pair(i, j) > 0


def harmonic_u(a: float, b: float) -> float:
    return 2.0 / (1.0 / a + 1.0 / b)


@lru_cache(maxsize=64)
def _unit_area_envelope(dt_lo: float, dt_hi: float, beta: float, n_planes: int, n: int = 10) -> PlaneEnvelope:
    """Envelope of q^beta * Chen(dt1, dt2)^-beta on [0,1] x [dt_lo, dt_hi]^2."""

    def g(q, a, b):
        return np.power(q, beta) * np.power(chen_lmtd(a, b), -beta)

    pts, vals = sample_box(g, [(0.0, 1.0), (dt_lo, dt_hi), (dt_lo, dt_hi)], n, [False, True, True])
    return fit_convex_planes(pts, vals, n_planes)


def area_envelope(q_max: float, dt_lo: float, dt_hi: float, u_coeff: float, c_v: float, beta: float,
                  n_planes: int) -> PlaneEnvelope:
    """Underestimator of c_v*(q/(U*Chen(dt1,dt2)))^beta on [0,q_max] x [dt_lo,dt_hi]^2.

    The dt box is widened to the next ladder value so fits can be shared; a
    larger box still underestimates on the smaller one.
    """
    hi = next((d for d in DT_LADDER if d >= dt_hi), dt_hi)
    unit = _unit_area_envelope(float(dt_lo), float(hi), float(beta), int(n_planes))
    return unit.scaled((q_max, 1.0, 1.0), c_v * (q_max / u_coeff) ** beta)


def duty_model(s: StreamDef, grid) -> tuple[Pwl1D, float, float]:
    """Q_s(u) = F(u)*(t_in(u)-t_out(u)) sampled on ``grid``; returns (model, max abs error, rmse)."""
    g = np.asarray(grid, dtype=float)

    def q(u):
        return s.f.at(u) * abs(s.t_in.at(u) - s.t_out.at(u))

    model = Pwl1D.from_points(g, [q(v) for v in g])
    dense = np.linspace(g[0], g[-1], 401)
    exact = np.array([q(v) for v in dense])
    err = float(np.max(np.abs(model(dense) - exact)))
    fit = rmse(model, list(zip(dense, exact))) if np.ptp(exact) > 0 else 0.0
    return model, err, fit


def shared_grid(c: CaseDefinition, extra: int = 7) -> list[float]:
    """Union of all u-model breakpoints and ``extra`` equidistant voltages."""
    pts = list(np.linspace(c.opvar.lower, c.opvar.upper, extra))
    for s in c.streams:
        for pm in (s.t_in, s.t_out, s.f):
            if pm.variant == "pwl":
                pts.extend(pm.pwl.breakpoints)
    pf = c.performance
    for pm in [pf.p_sys, pf.m_prod_total, pf.h_dot_prod] + [p for _, p in pf.feed_flows]:
        pts.extend(pm.model.breakpoints)
    out: list[float] = []
    for v in sorted(pts):
        if c.opvar.lower - 1e-12 <= v <= c.opvar.upper + 1e-12 and (not out or v - out[-1] > 1e-9):
            out.append(round(float(v), 12))
    return out


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def build_hen(m: MilpModel, c: CaseDefinition, mode: Mode | str = "coupled") -> HenBlock:
    if isinstance(mode, str):
        mode = parse_mode(mode)
    cfg = c.hen_config
    K = cfg.n_stages
    dtmin = cfg.dt_min
    econ = c.economics
    lo, hi = c.opvar.lower, c.opvar.upper
    if mode.kind == "fixed":
        if not c.opvar.contains(mode.u):
            raise ValueError(f"fixed operating point {mode.u} outside [{lo}, {hi}]")
        u = m.add_variable("u", mode.u, mode.u)
        ugrid = None
    else:
        u = m.add_variable("u", lo, hi)
        ugrid = encode_sos2_grid(m, u, shared_grid(c), "ugrid")
    hen = HenBlock(c, mode, u, ugrid, {}, {}, {})

    hot_side = c.hot_side
    cold = c.cold
    # ---- stream temperatures and balances
    for s in c.streams:
        hen.streams[s.id] = _stream_block(m, hen, s, K)

    # ---- matches
    for i in hot_side:
        for j in cold:
            if not pair_feasible(i, j, dtmin):
                continue
            M = big_m_for_pair(i, j)
            G = gamma_for_pair(i, j, dtmin)
            dt_hi = max(dtmin, i.t_max() - j.t_min())
            U = harmonic_u(i.u_coeff, j.u_coeff)
            env = area_envelope(M, dtmin, dt_hi, U, econ.c_v_hex, econ.beta, cfg.area_planes)
            hen.envelopes[(i.id, j.id)] = env
            hen.envelope_gap = max(hen.envelope_gap, env.relative_gap)
            ti, tj = hen.streams[i.id].t, hen.streams[j.id].t
            for loc in range(K + 1):
                hen.dt[(i.id, j.id, loc)] = m.add_variable(f"dt_{i.id}_{j.id}_{loc}", dtmin, dt_hi)
            for k in range(K):
                q = m.add_variable(f"q_{i.id}_{j.id}_{k}", 0.0, M)
                z = m.add_binary(f"z_{i.id}_{j.id}_{k}")
                cost = m.add_variable(f"a_{i.id}_{j.id}_{k}", 0.0)
                m.add_constraint(q - M * z, "<=", 0.0, name=f"bigm_{i.id}_{j.id}_{k}")
                for loc in (k, k + 1):
                    d = hen.dt[(i.id, j.id, loc)]
                    m.add_constraint(d + G * z, "<=", ti[loc] - tj[loc] + G,
                                     name=f"appr_{i.id}_{j.id}_{k}_{loc}")
                encode_plane_envelope(m, env, [q, hen.dt[(i.id, j.id, k)], hen.dt[(i.id, j.id, k + 1)]], cost,
                                      name=f"area_{i.id}_{j.id}_{k}")
                hen.matches[(i.id, j.id, k)] = MatchVars(i.id, j.id, k, q, z, cost, M)

    # ---- utilities
    for s in c.streams:
        if s.kind in (HOT, COLD):
            _utility_block(m, hen, hen.streams[s.id], c.cold_utility if s.kind == HOT else c.hot_utility)

    # ---- stage balances and overall balances
    for s in c.streams:
        sv = hen.streams[s.id]
        for k in range(K):
            if s.kind == COLD:
                stage = quicksum(mv.q for (a, b, kk), mv in hen.matches.items() if b == s.id and kk == k)
            else:
                stage = quicksum(mv.q for (a, b, kk), mv in hen.matches.items() if a == s.id and kk == k)
            _stage_balance(m, hen, sv, k, stage)
        if s.kind == COLD:
            total = quicksum(mv.q for (a, b, _), mv in hen.matches.items() if b == s.id)
        else:
            total = quicksum(mv.q for (a, _, _), mv in hen.matches.items() if a == s.id)
        if sv.q_util is not None:
            total = total + sv.q_util
        m.add_constraint(total, "==", sv.duty, name=f"bal_{s.id}")

    return hen


def parse_mode(text: str) -> Mode:
    if text == "coupled":
        return Mode.coupled()
    if text.startswith("fixed:"):
        return Mode.fixed(float(text.split(":", 1)[1]))
    raise ValueError(f"unknown mode {text!r} (expected coupled or fixed:<u>)")


def _stream_block(m: MilpModel, hen: HenBlock, s: StreamDef, K: int) -> StreamVars:
    c = hen.case
    lo_t = max(T_GLOBAL[0], s.t_min())
    hi_t = min(T_GLOBAL[1], s.t_max())
    t = [m.add_variable(f"t_{s.id}_{k}", lo_t, hi_t) for k in range(K + 1)]
    for k in range(K):
        m.add_constraint(t[k] - t[k + 1], ">=", 0.0, name=f"mono_{s.id}_{k}")
    if s.kind == CS:
        m.add_constraint(t[0], "==", s.t_in.value, name=f"tin_{s.id}")
        t_lo, t_hi = s.t_out.bounds()
        t[K].lower, t[K].upper = max(t[K].lower, t_lo), min(t[K].upper, t_hi)
        f_lo, f_hi = s.f.bounds()
        q_max = f_hi * (s.t_in.value - t_lo)
        duty = m.add_variable(f"Q_{s.id}", 0.0, q_max)
        sv = StreamVars(s, t, duty.expr(), 0.0, 0.0)
        span = s.t_in.value - t[K]
        # F eliminated: F_lo*dt <= Q <= F_hi*dt is exact for a single free F
        m.add_constraint(duty - f_lo * span, ">=", 0.0, name=f"cs_flo_{s.id}")
        m.add_constraint(duty - f_hi * span, "<=", 0.0, name=f"cs_fhi_{s.id}")
        if c.hen_config.cs_mode == "bilinear":
            f = m.add_variable(f"F_{s.id}", f_lo, f_hi)
            d = m.add_variable(f"D_{s.id}", s.t_in.value - t_hi, s.t_in.value - t_lo)
            m.add_constraint(d, "==", span, name=f"cs_span_{s.id}")
            blk = encode_bilinear_product(m, f, d, duty, c.hen_config.cs_grid, name=f"cs_bil_{s.id}")
            sv.duty_tol = blk.max_error
            sv.cs_f = f
        return sv
    t_in = hen.expr_of(s.t_in)
    t_out = hen.expr_of(s.t_out)
    if s.kind == HOT:
        m.add_constraint(t[0], "==", t_in, name=f"tin_{s.id}")
        m.add_constraint(t[K], ">=", t_out, name=f"tend_{s.id}")
    else:
        m.add_constraint(t[K], "==", t_in, name=f"tin_{s.id}")
        m.add_constraint(t[0], "<=", t_out, name=f"tend_{s.id}")
    if hen.ugrid is None:
        u0 = hen.mode.u
        q0 = s.f.at(u0) * abs(s.t_in.at(u0) - s.t_out.at(u0))
        return StreamVars(s, t, LinExpr.of(q0), 0.0, 0.0)
    model, err, fit = duty_model(s, hen.ugrid.grid)
    if fit > c.hen_config.stream_rmse_target:
        log.warning("duty model of %s has RMSE %.3g above target", s.id, fit)
    return StreamVars(s, t, interpolate(hen.ugrid, model), err, 0.0)


def _stage_balance(m: MilpModel, hen: HenBlock, sv: StreamVars, k: int, stage: LinExpr) -> None:
    s = sv.stream
    t = sv.t
    dt = t[k] - t[k + 1]
    name = f"stage_{s.id}_{k}"
    if s.kind == CS:
        f_lo, f_hi = s.f.bounds()
        # per-stage temperature drop consistent with some F in [f_lo, f_hi]
        m.add_constraint(stage - f_lo * dt, ">=", 0.0, name=f"{name}_flo")
        m.add_constraint(stage - f_hi * dt, "<=", 0.0, name=f"{name}_fhi")
        return
    if hen.ugrid is None or not s.f.depends_on_u:
        F = s.f.at(hen.mode.u) if hen.ugrid is None else s.f.bounds()[0]
        m.add_constraint(stage, "==", F * dt, name=name)
        return
    grid = hen.ugrid.grid
    lam = hen.ugrid.lambda_vars
    D = s.span_bounds[1]
    parts = [m.add_variable(f"{name}_d{n}", 0.0, D) for n in range(len(grid))]
    m.add_constraint(quicksum(parts), "==", dt, name=f"{name}_split")
    for n, p in enumerate(parts):
        m.add_constraint(p - D * lam[n], "<=", 0.0, name=f"{name}_w{n}")
    fs = [s.f.at(g) for g in grid]
    m.add_constraint(stage, "==", quicksum(fv * p for fv, p in zip(fs, parts)), name=name)
    cell = max(abs(b - a) for a, b in zip(fs, fs[1:]))
    sv.stage_tol = max(sv.stage_tol, cell * D / 4.0)


def _utility_block(m: MilpModel, hen: HenBlock, sv: StreamVars, util: UtilityDef) -> None:
    c = hen.case
    s = sv.stream
    K = c.hen_config.n_stages
    dtmin = c.hen_config.dt_min
    econ = c.economics
    M = stream_duty_max(s)
    if M <= 0:
        return
    tag = "cu" if s.kind == HOT else "hu"
    q = m.add_variable(f"q{tag}_{s.id}", 0.0, M)
    z = m.add_binary(f"z{tag}_{s.id}")
    cost = m.add_variable(f"a{tag}_{s.id}", 0.0)
    m.add_constraint(q - M * z, "<=", 0.0, name=f"bigm_{tag}_{s.id}")
    t_out = hen.expr_of(s.t_out)
    if s.kind == HOT:
        # cooler: stream from t[K] down to t_out, utility from t_in up to t_out
        ends = [(sv.t[K], util.t_out), (t_out, util.t_in)]
        spread = s.t_max() - util.t_in
        G = max(0.0, dtmin + util.t_out - s.t_min())
    else:
        # heater: utility from t_in down to t_out, stream from t[0] up to t_out
        ends = [(LinExpr.of(util.t_in) - t_out, None), (LinExpr.of(util.t_out) - sv.t[0], None)]
        spread = util.t_in - s.t_min()
        G = max(0.0, dtmin + s.t_max() - util.t_out)
    dt_hi = max(dtmin, spread)
    dts = []
    for e, (a, b) in enumerate(ends):
        diff = a - b if b is not None else a
        d = m.add_variable(f"dt{tag}_{s.id}_{e}", dtmin, dt_hi)
        m.add_constraint(d + G * z, "<=", diff + G, name=f"appr_{tag}_{s.id}_{e}")
        dts.append(d)
    U = harmonic_u(s.u_coeff, util.u_coeff)
    env = area_envelope(M, dtmin, dt_hi, U, econ.c_v_hex, econ.beta, c.hen_config.area_planes)
    hen.envelope_gap = max(hen.envelope_gap, env.relative_gap)
    encode_plane_envelope(m, env, [q, dts[0], dts[1]], cost, name=f"area_{tag}_{s.id}")
    sv.q_util, sv.z_util, sv.util_cost, sv.util_dt = q, z, cost, tuple(dts)


# ---------------------------------------------------------------------------
# extraction and checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchRecord:
    hot: str
    cold: str
    stage: int
    duty: float  # kW
    area: float  # m2
    lmtd: float  # K


@dataclass(frozen=True)
class UtilityRecord:
    stream: str
    kind: str  # cu | hu
    duty: float
    area: float
    lmtd: float


@dataclass(frozen=True)
class HenDesign:
    u: float
    matches: tuple[MatchRecord, ...]
    utilities: tuple[UtilityRecord, ...]
    cs_settings: dict  # id -> (t_out, f)
    temperatures: dict  # id -> tuple of location temperatures
    spurious: tuple = ()  # (hot, cold, stage) with z = 1 but negligible duty

    @property
    def hex_count(self) -> int:
        return len(self.matches) + len(self.utilities)

    @property
    def sum_q_cu(self) -> float:
        return sum(r.duty for r in self.utilities if r.kind == "cu")

    @property
    def sum_q_hu(self) -> float:
        return sum(r.duty for r in self.utilities if r.kind == "hu")

    @property
    def sum_q_match(self) -> float:
        return sum(r.duty for r in self.matches)

    def area_cost(self, c_v: float, beta: float) -> float:
        return sum(c_v * r.area**beta for r in self.matches) + sum(c_v * r.area**beta for r in self.utilities)

    def hen_capex(self, c: CaseDefinition) -> float:
        """Exact CAPEX_HEN (EUR/yr) of the extracted design."""
        e = c.economics
        return e.af_inv * (self.area_cost(e.c_v_hex, e.beta) + e.c_f_hex * self.hex_count)


DUTY_EPS = 1e-3


def extract_design(sol: Solution, h: HenBlock, c: CaseDefinition | None = None) -> HenDesign:
    c = c or h.case
    if not sol.has_solution:
        raise ExtractionError(f"no solution to extract (status {sol.status})")
    u = sol[h.u]
    K = c.hen_config.n_stages
    temps = {sid: tuple(sol[v] for v in sv.t) for sid, sv in h.streams.items()}
    matches, spurious = [], []
    for (i, j, k), mv in h.matches.items():
        q = sol[mv.q]
        if sol[mv.z] < 0.5:
            continue
        if q <= DUTY_EPS:
            spurious.append((i, j, k))
            continue
        d1 = max(temps[i][k] - temps[j][k], 1e-9)
        d2 = max(temps[i][k + 1] - temps[j][k + 1], 1e-9)
        lm = chen_lmtd(d1, d2)
        U = harmonic_u(c.stream(i).u_coeff, c.stream(j).u_coeff)
        matches.append(MatchRecord(i, j, k, q, q / (U * lm), lm))
    utils = []
    for sid, sv in h.streams.items():
        if sv.q_util is None:
            continue
        q = sol[sv.q_util]
        if q <= DUTY_EPS:
            continue
        s = sv.stream
        if s.kind == HOT:
            ut = c.cold_utility
            d1 = temps[sid][K] - ut.t_out
            d2 = s.t_out.at(u) - ut.t_in
        else:
            ut = c.hot_utility
            d1 = ut.t_in - s.t_out.at(u)
            d2 = ut.t_out - temps[sid][0]
        lm = chen_lmtd(max(d1, 1e-9), max(d2, 1e-9))
        U = harmonic_u(s.u_coeff, ut.u_coeff)
        utils.append(UtilityRecord(sid, "cu" if s.kind == HOT else "hu", q, q / (U * lm), lm))
    cs = {}
    for s in c.cs:
        sv = h.streams[s.id]
        t_out = temps[s.id][K]
        span = s.t_in.value - t_out
        duty = sol.value(sv.duty)
        f = duty / span if span > 1e-9 else s.f.bounds()[0]
        cs[s.id] = (t_out, f)
    return HenDesign(u, tuple(matches), tuple(utils), cs, temps, tuple(spurious))


def check_solution(sol: Solution, h: HenBlock, rel: float = 1e-6, abs_tol: float = 1e-6) -> list[str]:
    """Structural properties every solved superstructure must satisfy."""
    c = h.case
    K = c.hen_config.n_stages
    dtmin = c.hen_config.dt_min
    u = sol[h.u]
    out: list[str] = []
    for sid, sv in h.streams.items():
        s = sv.stream
        t = [sol[v] for v in sv.t]
        for k in range(K):
            if t[k] < t[k + 1] - abs_tol:
                out.append(f"{sid}: temperature rises between locations {k} and {k + 1}")
        if s.kind == CS:
            exchanged = sum(sol[mv.q] for (a, _, _), mv in h.matches.items() if a == sid)
            span = s.t_in.value - t[K]
            f_lo, f_hi = s.f.bounds()
            if not (f_lo * span - abs_tol - rel * exchanged <= exchanged <= f_hi * span + abs_tol + rel * exchanged):
                out.append(f"{sid}: duty {exchanged:.6g} inconsistent with F bounds over {span:.6g} K")
            continue
        exact = s.f.at(u) * abs(s.t_in.at(u) - s.t_out.at(u))
        if s.kind == HOT:
            got = sum(sol[mv.q] for (a, _, _), mv in h.matches.items() if a == sid)
        else:
            got = sum(sol[mv.q] for (_, b, _), mv in h.matches.items() if b == sid)
        if sv.q_util is not None:
            got += sol[sv.q_util]
        if abs(got - exact) > sv.duty_tol + rel * max(exact, 1.0) + abs_tol:
            out.append(f"{sid}: balance residual {got - exact:.3g} kW exceeds {sv.duty_tol:.3g} kW")
    for (i, j, k), mv in h.matches.items():
        z = sol[mv.z]
        q = sol[mv.q]
        if z > 0.5:
            ti, tj = h.streams[i].t, h.streams[j].t
            for loc in (k, k + 1):
                d = sol[ti[loc]] - sol[tj[loc]]
                if d < dtmin - 1e-6:
                    out.append(f"match {i}-{j} stage {k}: approach {d:.6g} K below {dtmin} K")
        elif q > 1e-9:
            out.append(f"match {i}-{j} stage {k}: duty {q:.3g} kW with z = 0")
    for sid, sv in h.streams.items():
        if sv.z_util is not None and sol[sv.z_util] < 0.5 and sol[sv.q_util] > 1e-9:
            out.append(f"{sid}: utility duty {sol[sv.q_util]:.3g} kW with z = 0")
    return out


__all__ = [
    "Mode", "HenBlock", "HenDesign", "MatchRecord", "UtilityRecord", "StreamVars", "MatchVars", "build_hen",
    "big_m_for_pair", "gamma_for_pair", "pair_feasible", "extract_design", "check_solution", "shared_grid",
    "duty_model", "area_envelope", "parse_mode", "ExtractionError", "harmonic_u",
]
