"""Compile fitted PWL models into MILP constraint blocks.

Binary usage:
  * convex 1-D models in a relaxation-safe direction and plane envelopes: none;
  * general 1-D models: SOS2 over the breakpoints with a Gray-coded logarithmic
    branching scheme, ``ceil(log2(segments))`` binaries;
  * triangulated surfaces: disaggregated convex combination per simplex with
    one binary code per simplex, ``ceil(log2(simplices))`` binaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .milp import LinExpr, MilpModel, Var, quicksum
from .pwl_fit import PlaneEnvelope, Pwl1D, SimplexSurface, build_simplex_surface


class EncodingError(ValueError):
    pass


class EncodingMisuse(EncodingError):
    """A binary-free encoding was requested where it would not be tight."""


def n_bits(pieces: int) -> int:
    return 0 if pieces <= 1 else math.ceil(math.log2(pieces))


def gray(k: int) -> int:
    return k ^ (k >> 1)


def _bit(code: int, l: int) -> int:
    return (code >> l) & 1


@dataclass
class EncodedBlock:
    output_var: Var | None
    input_vars: tuple
    binaries_used: int
    lambda_vars: list = field(default_factory=list)
    binaries: list = field(default_factory=list)
    kind: str = "linear"  # linear | convex | log1d | log2d | planes | fixed
    pieces: int = 1
    max_error: float = 0.0  # analytic bound on |encoded - exact| (0 = exact PWL)
    node_weights: dict = field(default_factory=dict)  # node -> LinExpr (log1d / log2d)
    grid: tuple = ()
    codes: list = field(default_factory=list)
    simplices: tuple = ()
    n_constraints: int = 0


def _check_bounded(*vs: Var) -> None:
    for v in vs:
        if not (math.isfinite(v.lower) and math.isfinite(v.upper)):
            raise EncodingError(f"variable {v.name} needs finite bounds for this encoding")


def _tighten(v: Var, lo: float, hi: float) -> None:
    v.lower = max(v.lower, lo)
    v.upper = min(v.upper, hi)
    if v.lower > v.upper + 1e-12:
        raise EncodingError(f"bounds of {v.name} do not intersect the model domain [{lo}, {hi}]")


# ---------------------------------------------------------------------------
# 1-D
# ---------------------------------------------------------------------------


def sos2_allowed_nodes(n_nodes: int, codes: Sequence[int], bits: int) -> dict[int, set[int]]:
    """For each binary assignment, the nodes whose weights may be nonzero."""
    adj = {n: [s for s in (n - 1, n) if 0 <= s < n_nodes - 1] for n in range(n_nodes)}
    out = {}
    for b in range(2 ** bits):
        allowed = set()
        for n in range(n_nodes):
            ok = True
            for l in range(bits):
                want = _bit(b, l)
                # n forbidden if every adjacent segment has the opposite bit
                if all(_bit(codes[s], l) != want for s in adj[n]):
                    ok = False
                    break
            if ok:
                allowed.add(n)
        out[b] = allowed
    return out


def encode_sos2_grid(m: MilpModel, x: Var, grid: Sequence[float], name: str) -> EncodedBlock:
    """Weights over ``grid`` with SOS2 adjacency forced by log-many binaries.

    ``x`` equals the weighted grid abscissae; other functions sampled on the same
    grid can be attached with :func:`interpolate`.
    """
    g = [float(v) for v in grid]
    if len(g) < 2 or any(b <= a for a, b in zip(g, g[1:])):
        raise EncodingError("grid must have >= 2 strictly ascending points")
    _check_bounded(x)
    _tighten(x, g[0], g[-1])
    n = len(g)
    segs = n - 1
    L = n_bits(segs)
    lam = [m.add_variable(f"{name}_lam{k}", 0.0, 1.0) for k in range(n)]
    ncon = 0
    m.add_constraint(quicksum(lam), "==", 1.0, name=f"{name}_sum")
    m.add_constraint(x, "==", quicksum(g[k] * lam[k] for k in range(n)), name=f"{name}_x")
    ncon += 2
    codes = [gray(s) for s in range(segs)]
    bins = [m.add_binary(f"{name}_b{l}") for l in range(L)]
    adj = {k: [s for s in (k - 1, k) if 0 <= s < segs] for k in range(n)}
    for l in range(L):
        ones = [k for k in range(n) if all(_bit(codes[s], l) == 1 for s in adj[k])]
        zeros = [k for k in range(n) if all(_bit(codes[s], l) == 0 for s in adj[k])]
        if ones:
            m.add_constraint(quicksum(lam[k] for k in ones), "<=", bins[l], name=f"{name}_one{l}")
            ncon += 1
        if zeros:
            m.add_constraint(quicksum(lam[k] for k in zeros) + bins[l], "<=", 1.0, name=f"{name}_zero{l}")
            ncon += 1
    # unused codes whose support is not inside one segment are cut off
    allowed = sos2_allowed_nodes(n, codes, L)
    used = set(codes)
    for b, nodes in allowed.items():
        if b in used or not nodes:
            continue
        if any(nodes <= {s, s + 1} for s in range(segs)):
            continue
        expr = quicksum((1 - bins[l]) if _bit(b, l) else bins[l] for l in range(L))
        m.add_constraint(expr, ">=", 1.0, name=f"{name}_nogood{b}")
        ncon += 1
    weights = {k: lam[k].expr() for k in range(n)}
    return EncodedBlock(None, (x,), L, lam, bins, "log1d", segs, 0.0, weights, tuple(g), codes,
                        n_constraints=ncon)


def interpolate(block: EncodedBlock, p: Pwl1D) -> LinExpr:
    """Linear expression equal to ``p(x)`` on a SOS2 grid block."""
    if block.kind != "log1d":
        raise EncodingError("interpolate needs a 1-D SOS2 block")
    grid = block.grid
    lo, hi = p.domain
    if grid[0] < lo - 1e-9 * max(1, abs(lo)) or grid[-1] > hi + 1e-9 * max(1, abs(hi)):
        raise EncodingError("PWL model does not cover the block grid")
    bp = set(p.breakpoints)
    for b in bp:
        if grid[0] < b < grid[-1] and not any(abs(b - g) <= 1e-12 * max(1, abs(b)) for g in grid):
            raise EncodingError(f"breakpoint {b} missing from the shared grid; interpolation would be inexact")
    return quicksum(p(grid[k]) * block.node_weights[k] for k in range(len(grid)))


def encode_pwl1d(m: MilpModel, p: Pwl1D, x: Var, y: Var, *, relaxation_safe: bool = False,
                 name: str | None = None) -> EncodedBlock:
    """Tie ``y`` to ``p(x)``.

    One segment gives a plain linear equality. With ``relaxation_safe`` (the
    term is only ever pushed downward by the objective) a convex model becomes
    ``y >= each segment line`` without binaries. Otherwise SOS2 with log-many
    binaries.
    """
    name = name or f"pwl_{y.name}"
    _check_bounded(x)
    lo, hi = p.domain
    _tighten(x, lo, hi)
    if p.segments == 1:
        s, b = p.lines()[0]
        m.add_constraint(y, "==", s * x + b, name=f"{name}_lin")
        return EncodedBlock(y, (x,), 0, kind="linear", pieces=1, n_constraints=1)
    if p.convex_flag and relaxation_safe:
        for k, (s, b) in enumerate(p.lines()):
            m.add_constraint(y, ">=", s * x + b, name=f"{name}_seg{k}")
        return EncodedBlock(y, (x,), 0, kind="convex", pieces=p.segments, n_constraints=p.segments)
    blk = encode_sos2_grid(m, x, p.breakpoints, name)
    m.add_constraint(y, "==", interpolate(blk, p), name=f"{name}_y")
    blk.output_var = y
    blk.n_constraints += 1
    return blk


# ---------------------------------------------------------------------------
# 2-D
# ---------------------------------------------------------------------------


def simplex_codes(n_simplices: int) -> list[int]:
    """Reflected binary code in triangulation (serpentine) order."""
    return [gray(t) for t in range(n_simplices)]


def _check_triangulation(s: SimplexSurface) -> None:
    for tri in s.triangulation:
        (x0, y0), (x1, y1), (x2, y2) = (s.node_xy(k) for k in tri)
        area2 = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
        scale = max(abs(x1 - x0), abs(x2 - x0), 1e-300) * max(abs(y1 - y0), abs(y2 - y0), 1e-300)
        if abs(area2) <= 1e-12 * scale:
            raise EncodingError("degenerate simplex in triangulation")


def encode_simplex_surface(m: MilpModel, s: SimplexSurface, x1: Var, x2: Var, y: Var | None,
                           name: str | None = None) -> EncodedBlock:
    """Exact MILP model of a triangulated surface.

    Every simplex carries its own three vertex weights; the simplex in use is
    selected by a binary code of length ``ceil(log2(simplices))``. Codes not
    assigned to any simplex leave no weight available and are infeasible.
    ``y`` may be None to obtain only the node weights (see ``node_weights``).
    """
    name = name or f"surf_{y.name if y is not None else x1.name}"
    _check_bounded(x1, x2)
    _check_triangulation(s)
    (ax, bx), (ay, by) = s.bounds
    _tighten(x1, ax, bx)
    _tighten(x2, ay, by)
    S = s.n_simplices
    L = n_bits(S)
    codes = simplex_codes(S)
    lam: list[list[Var]] = []
    for t, tri in enumerate(s.triangulation):
        lam.append([m.add_variable(f"{name}_l{t}_{v}", 0.0, 1.0) for v in range(3)])
    flat = [w for row in lam for w in row]
    ncon = 0
    m.add_constraint(quicksum(flat), "==", 1.0, name=f"{name}_sum")
    ex1, ex2, ey = LinExpr(), LinExpr(), LinExpr()
    weights: dict[int, LinExpr] = {}
    for t, tri in enumerate(s.triangulation):
        for v, node in enumerate(tri):
            px, py = s.node_xy(node)
            w = lam[t][v]
            ex1.iadd(w, px)
            ex2.iadd(w, py)
            ey.iadd(w, s.node_value(node))
            weights.setdefault(node, LinExpr()).iadd(w)
    m.add_constraint(x1, "==", ex1, name=f"{name}_x1")
    m.add_constraint(x2, "==", ex2, name=f"{name}_x2")
    ncon += 3
    if y is not None:
        m.add_constraint(y, "==", ey, name=f"{name}_y")
        ncon += 1
    bins = [m.add_binary(f"{name}_b{l}") for l in range(L)]
    for l in range(L):
        sel = quicksum(w for t in range(S) if _bit(codes[t], l) for w in lam[t])
        m.add_constraint(sel, "==", bins[l], name=f"{name}_bit{l}")
        ncon += 1
    return EncodedBlock(y, (x1, x2), L, flat, bins, "log2d", S, 0.0, weights, (s.grid_x, s.grid_y), codes,
                        tuple(s.triangulation), ncon)


def encode_plane_envelope(m: MilpModel, e: PlaneEnvelope, inputs: Sequence, y: Var, *,
                          objective_sign: float = 1.0, name: str | None = None) -> EncodedBlock:
    """``y >= plane_i(inputs)`` for every plane; no binaries.

    Only tight when ``y`` is pushed down by a minimized objective;
    ``objective_sign < 0`` (or a negative coefficient of ``y`` in the current
    objective) is rejected.
    """
    name = name or f"env_{y.name}"
    if len(inputs) != e.input_dim:
        raise EncodingError(f"envelope expects {e.input_dim} inputs, got {len(inputs)}")
    if objective_sign < 0 or m.objective.terms.get(y.index, 0.0) < 0:
        raise EncodingMisuse(f"{y.name} would be maximized; a max-of-planes envelope is not tight there")
    seen = []
    k = 0
    for p in e.planes:
        key = tuple(round(v, 12) for v in p)
        if key in seen:
            continue
        seen.append(key)
        rhs = LinExpr.of(float(p[-1]))
        for g, inp in zip(p[:-1], inputs):
            if g != 0.0:
                rhs.iadd(inp, float(g))
        m.add_constraint(y, ">=", rhs, name=f"{name}_p{k}")
        k += 1
    return EncodedBlock(y, tuple(inputs), 0, kind="planes", pieces=k, n_constraints=k)


def bilinear_error_bound(x_bounds, y_bounds, nx: int, ny: int) -> float:
    """Max |x*y - interpolant| on a uniform triangulated grid: dx*dy/4 per cell."""
    dx = (x_bounds[1] - x_bounds[0]) / (nx - 1)
    dy = (y_bounds[1] - y_bounds[0]) / (ny - 1)
    return abs(dx * dy) / 4.0


def encode_bilinear_product(m: MilpModel, x: Var, y: Var, z: Var, grid: tuple[int, int] = (3, 3),
                            name: str | None = None) -> EncodedBlock:
    """``z ~= x * y`` through a triangulated surface over the bound box of (x, y).

    Exact at grid nodes; the interpolation error is bounded by ``max_error``.
    A fixed factor collapses the product to a linear equality.
    """
    name = name or f"bil_{z.name}"
    _check_bounded(x, y)
    if x.lower == x.upper or y.lower == y.upper:
        if x.lower == x.upper:
            m.add_constraint(z, "==", x.lower * y, name=f"{name}_fixed")
        else:
            m.add_constraint(z, "==", y.lower * x, name=f"{name}_fixed")
        return EncodedBlock(z, (x, y), 0, kind="fixed", n_constraints=1)
    nx, ny = grid
    surf = build_simplex_surface(lambda a, b: a * b, (x.lower, x.upper), (y.lower, y.upper), nx, ny)
    blk = encode_simplex_surface(m, surf, x, y, z, name=name)
    blk.max_error = bilinear_error_bound((x.lower, x.upper), (y.lower, y.upper), nx, ny)
    return blk


__all__ = [
    "EncodedBlock", "EncodingError", "EncodingMisuse", "encode_pwl1d", "encode_simplex_surface",
    "encode_plane_envelope", "encode_bilinear_product", "encode_sos2_grid", "interpolate", "n_bits",
    "gray", "sos2_allowed_nodes", "bilinear_error_bound", "simplex_codes",
]
