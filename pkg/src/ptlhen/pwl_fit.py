"""Piecewise-linear model fitting: 1-D segmented lines, triangulated grid surfaces,
and convex max-of-plane underestimators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import linprog


class PwlFitError(ValueError):
    """Target accuracy not reachable, or a model could not be built."""


class SamplingError(ValueError):
    """The sampled function returned non-finite values."""


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# 1-D
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pwl1D:
    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    convex_flag: bool = False

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if len(bp) < 2 or len(bp) != len(vals):
            raise PwlFitError("Pwl1D needs >= 2 breakpoints and one value per breakpoint")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise PwlFitError("breakpoints must be strictly ascending")
        if self.convex_flag and not _nondecreasing(self.slopes):
            raise PwlFitError("convex_flag set but slopes decrease")

    @classmethod
    def from_points(cls, xs: Sequence[float], ys: Sequence[float]) -> "Pwl1D":
        p = cls(tuple(xs), tuple(ys))
        return cls(p.breakpoints, p.values, _nondecreasing(p.slopes))

    @classmethod
    def constant(cls, value: float, lo: float, hi: float) -> "Pwl1D":
        return cls((lo, hi), (value, value), True)

    @property
    def segments(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def slopes(self) -> list[float]:
        b, v = self.breakpoints, self.values
        return [(v[i + 1] - v[i]) / (b[i + 1] - b[i]) for i in range(len(b) - 1)]

    @property
    def domain(self) -> tuple[float, float]:
        return self.breakpoints[0], self.breakpoints[-1]

    def lines(self) -> list[tuple[float, float]]:
        """(slope, intercept) per segment."""
        out = []
        for i, s in enumerate(self.slopes):
            out.append((s, self.values[i] - s * self.breakpoints[i]))
        return out

    def __call__(self, x):
        lo, hi = self.domain
        xa = np.asarray(x, dtype=float)
        if np.any(xa < lo - 1e-9 * max(1.0, abs(lo))) or np.any(xa > hi + 1e-9 * max(1.0, abs(hi))):
            raise DomainError(f"x outside PWL domain [{lo}, {hi}]")
        out = np.interp(xa, self.breakpoints, self.values)
        return float(out) if np.ndim(out) == 0 else out

    def resample(self, grid: Sequence[float]) -> "Pwl1D":
        """Same function on a finer grid (grid must contain every breakpoint)."""
        g = sorted(set(float(x) for x in grid))
        missing = [b for b in self.breakpoints if not any(abs(b - x) <= 1e-12 * max(1, abs(b)) for x in g)]
        if missing:
            raise PwlFitError(f"grid misses breakpoints {missing}")
        vals = [self(x) for x in g]
        return Pwl1D(tuple(g), tuple(vals), self.convex_flag)

    def min_max(self) -> tuple[float, float]:
        return min(self.values), max(self.values)

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: dict) -> "Pwl1D":
        return cls.from_points(d["breakpoints"], d["values"])


def _nondecreasing(s: Sequence[float], tol: float = 1e-12) -> bool:
    return all(b >= a - tol * max(1.0, abs(a)) for a, b in zip(s, s[1:]))


def _value_scale(y: np.ndarray) -> float:
    span = float(np.max(y) - np.min(y))
    if span > 0:
        return span
    return float(np.max(np.abs(y))) or 1.0


def rmse(model, samples) -> float:
    """Root-mean-square error of ``model`` against samples, normalized by the
    range (max - min) of the sample values.

    ``samples`` rows are ``(x, y)`` for 1-D models and ``(x1, x2, y)`` for
    surfaces; ``model`` is any callable taking the input columns.
    """
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise DomainError("rmse of an empty sample set")
    if s.ndim == 1:
        s = s[None, :]
    *inputs, y = s.T
    pred = np.asarray(model(*inputs), dtype=float)
    return float(np.sqrt(np.mean((pred - y) ** 2)) / _value_scale(y))


def _lsq_pwl(x: np.ndarray, y: np.ndarray, bps: list[float]) -> tuple[Pwl1D, float]:
    # hat basis: model = sum_k v_k * hat_k(x)
    n = len(bps)
    H = np.zeros((len(x), n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1.0
        H[:, k] = np.interp(x, bps, e)
    v, *_ = np.linalg.lstsq(H, y, rcond=None)
    model = Pwl1D.from_points(bps, v)
    err = float(np.sqrt(np.mean((H @ v - y) ** 2)) / _value_scale(y))
    return model, err


def fit_pwl_1d(samples: Sequence[tuple[float, float]], rmse_target: float, max_segments: int | None = None) -> Pwl1D:
    """Fit a continuous PWL function by greedy breakpoint insertion.

    Starts from one segment over the sample domain and repeatedly inserts the
    candidate breakpoint (an interior sample abscissa or a midpoint between
    neighbouring samples) that lowers the normalized RMSE most, refitting the
    node values by least squares each time.
    """
    s = np.asarray(samples, dtype=float)
    if s.ndim != 2 or s.shape[0] < 2:
        raise PwlFitError("need at least two samples")
    order = np.argsort(s[:, 0])
    x, y = s[order, 0], s[order, 1]
    if np.any(np.diff(x) <= 0):
        raise PwlFitError("sample abscissae must be distinct")
    if rmse_target < 0:
        raise PwlFitError("rmse_target must be non-negative")
    cap = len(x) - 1 if max_segments is None else min(max_segments, len(x) - 1)
    bps = [float(x[0]), float(x[-1])]
    model, err = _lsq_pwl(x, y, bps)
    cands = set(float(v) for v in x[1:-1]) | set(float(v) for v in 0.5 * (x[1:] + x[:-1]))
    tol = 1e-12
    while err > rmse_target + tol:
        if len(bps) - 1 >= cap:
            raise PwlFitError(f"RMSE target {rmse_target:.4g} not reached with {cap} segments (best {err:.4g})")
        best = None
        for c in sorted(cands - set(bps)):
            trial = sorted(bps + [c])
            mdl, e = _lsq_pwl(x, y, trial)
            if best is None or e < best[2] - 1e-15:
                best = (trial, mdl, e)
        if best is None:
            raise PwlFitError("no candidate breakpoints left")
        bps, model, err = best
    return model


# ---------------------------------------------------------------------------
# 2-D simplex surfaces
# ---------------------------------------------------------------------------


def grid_triangulation(nx: int, ny: int) -> list[tuple[int, int, int]]:
    """Two triangles per cell split along the lower-left -> upper-right
    diagonal, listed serpentine: cells walk up column 0, down column 1, ...
    and the two triangles of a cell are ordered so consecutive simplices share
    an edge everywhere except at column turns. Node (i, j) has flat index ``i * ny + j``.
    """
    out = []
    for i in range(nx - 1):
        rows = range(ny - 1) if i % 2 == 0 else range(ny - 2, -1, -1)
        for j in rows:
            a, b, c, d = i * ny + j, (i + 1) * ny + j, i * ny + j + 1, (i + 1) * ny + j + 1
            lower, upper = (a, b, d), (a, c, d)
            out += [lower, upper] if i % 2 == 0 else [upper, lower]
    return out


@dataclass(frozen=True, eq=False)
class SimplexSurface:
    grid_x: tuple[float, ...]
    grid_y: tuple[float, ...]
    node_values: np.ndarray  # shape (nx, ny), node_values[i, j] = f(grid_x[i], grid_y[j])
    triangulation: tuple[tuple[int, int, int], ...]
    rmse: float = 0.0
    max_abs_error: float = 0.0

    @property
    def nx(self) -> int:
        return len(self.grid_x)

    @property
    def ny(self) -> int:
        return len(self.grid_y)

    @property
    def n_simplices(self) -> int:
        return len(self.triangulation)

    def node_xy(self, k: int) -> tuple[float, float]:
        return self.grid_x[k // self.ny], self.grid_y[k % self.ny]

    def node_value(self, k: int) -> float:
        return float(self.node_values[k // self.ny, k % self.ny])

    @property
    def bounds(self) -> tuple[tuple[float, float], tuple[float, float]]:
        return (self.grid_x[0], self.grid_x[-1]), (self.grid_y[0], self.grid_y[-1])

    def __call__(self, x, y):
        xa, ya = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        gx, gy = np.asarray(self.grid_x), np.asarray(self.grid_y)
        (x0, x1), (y0, y1) = self.bounds
        eps = 1e-9
        if np.any(xa < x0 - eps * max(1, abs(x0))) or np.any(xa > x1 + eps * max(1, abs(x1))) \
                or np.any(ya < y0 - eps * max(1, abs(y0))) or np.any(ya > y1 + eps * max(1, abs(y1))):
            raise DomainError("point outside surface rectangle")
        i = np.clip(np.searchsorted(gx, xa, side="right") - 1, 0, self.nx - 2)
        j = np.clip(np.searchsorted(gy, ya, side="right") - 1, 0, self.ny - 2)
        tx = (xa - gx[i]) / (gx[i + 1] - gx[i])
        ty = (ya - gy[j]) / (gy[j + 1] - gy[j])
        V = self.node_values
        fa, fb, fc, fd = V[i, j], V[i + 1, j], V[i, j + 1], V[i + 1, j + 1]
        lower = ty <= tx
        # lower triangle (a, b, d): f = fa + tx (fb - fa) + ty (fd - fb)
        # upper triangle (a, c, d): f = fa + ty (fc - fa) + tx (fd - fc)
        out = np.where(lower, fa + tx * (fb - fa) + ty * (fd - fb), fa + ty * (fc - fa) + tx * (fd - fc))
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {"grid_x": list(self.grid_x), "grid_y": list(self.grid_y),
                "node_values": np.asarray(self.node_values).tolist(), "rmse": self.rmse}


def build_simplex_surface(f: Callable, x_bounds: tuple[float, float], y_bounds: tuple[float, float],
                          nx: int, ny: int, n_validate: int = 25) -> SimplexSurface:
    """Sample ``f`` on an ``nx`` x ``ny`` regular grid and triangulate.

    RMSE (range-normalized) and max abs error are measured on an
    ``n_validate`` x ``n_validate`` grid.
    """
    if nx < 2 or ny < 2:
        raise PwlFitError("grid needs at least 2 points per axis")
    gx = np.linspace(x_bounds[0], x_bounds[1], nx)
    gy = np.linspace(y_bounds[0], y_bounds[1], ny)
    if not (gx[-1] > gx[0] and gy[-1] > gy[0]):
        raise PwlFitError("degenerate rectangle")
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    V = np.vectorize(f, otypes=[float])(X, Y)
    if not np.all(np.isfinite(V)):
        raise SamplingError("non-finite function value at a grid node")
    surf = SimplexSurface(tuple(gx), tuple(gy), V, tuple(grid_triangulation(nx, ny)))
    n_validate = max(n_validate, 20)
    vx = np.linspace(gx[0], gx[-1], n_validate)
    vy = np.linspace(gy[0], gy[-1], n_validate)
    VX, VY = np.meshgrid(vx, vy, indexing="ij")
    truth = np.vectorize(f, otypes=[float])(VX, VY)
    if not np.all(np.isfinite(truth)):
        raise SamplingError("non-finite function value on the validation grid")
    pred = surf(VX, VY)
    err = float(np.sqrt(np.mean((pred - truth) ** 2)) / _value_scale(truth.ravel()))
    return SimplexSurface(tuple(gx), tuple(gy), V, surf.triangulation, err, float(np.max(np.abs(pred - truth))))


# ---------------------------------------------------------------------------
# Convex max-of-planes underestimators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlaneEnvelope:
    planes: tuple[tuple[float, ...], ...]  # (g_1, ..., g_d, intercept)
    input_dim: int
    max_underestimate_gap: float = 0.0
    max_value: float = 0.0
    anchors: tuple[tuple[float, ...], ...] = field(default=(), compare=False)

    def __call__(self, *inputs):
        P = np.asarray(self.planes, dtype=float)
        X = np.stack(np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in inputs]), axis=-1)
        vals = X @ P[:, :-1].T + P[:, -1]
        out = vals.max(axis=-1)
        return float(out) if np.ndim(out) == 0 else out

    @property
    def relative_gap(self) -> float:
        return self.max_underestimate_gap / self.max_value if self.max_value > 0 else 0.0

    def scaled(self, input_scales: Sequence[float], output_scale: float) -> "PlaneEnvelope":
        """Envelope of ``output_scale * f(x / input_scales)``."""
        s = np.asarray(input_scales, dtype=float)
        planes = []
        for p in self.planes:
            g = np.asarray(p[:-1]) / s * output_scale
            planes.append(tuple(g) + (p[-1] * output_scale,))
        return PlaneEnvelope(tuple(planes), self.input_dim, self.max_underestimate_gap * output_scale,
                             self.max_value * output_scale)

    def to_dict(self) -> dict:
        return {"planes": [list(p) for p in self.planes], "input_dim": self.input_dim,
                "max_underestimate_gap": self.max_underestimate_gap}


def _supporting_plane(P: np.ndarray, f: np.ndarray, anchor: int, push: float = 1e-3) -> np.ndarray:
    """Plane <= f on all samples, maximal at the anchor (ties broken by lifting
    the plane's mean over the samples)."""
    n, d = P.shape
    A = np.hstack([P, np.ones((n, 1))])
    c = -(A[anchor] + push * A.mean(axis=0))
    res = linprog(c, A_ub=A, b_ub=f, bounds=[(None, None)] * (d + 1), method="highs")
    if res.status != 0:
        raise PwlFitError(f"supporting-plane LP failed: {res.message}")
    return res.x


def _minimax_plane(P: np.ndarray, f: np.ndarray) -> np.ndarray:
    n, d = P.shape
    A = np.hstack([P, np.ones((n, 1))])
    # variables: g (d), c, t ; min t  s.t.  A w <= f ;  f - A w <= t
    c = np.zeros(d + 2)
    c[-1] = 1.0
    A_ub = np.vstack([np.hstack([A, np.zeros((n, 1))]), np.hstack([-A, -np.ones((n, 1))])])
    b_ub = np.concatenate([f, -f])
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * (d + 1) + [(0, None)], method="highs")
    if res.status != 0:
        raise PwlFitError(f"minimax-plane LP failed: {res.message}")
    return res.x[:-1]


def fit_convex_planes(points, values, n_planes: int, tol: float = 1e-9) -> PlaneEnvelope:
    """Max-of-planes underestimator of sampled values.

    The first plane is the single plane below all samples with the smallest
    worst-case gap. Each further plane supports the samples' lower convex hull
    at the sample with the currently largest gap. Planes never rise above any
    sample, so the envelope underestimates at every sample; adding planes never
    increases the gap.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    f = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(f)) or not np.all(np.isfinite(P)):
        raise SamplingError("non-finite samples")
    if n_planes < 1:
        raise PwlFitError("need at least one plane")
    # scale inputs for LP conditioning
    lo, hi = P.min(axis=0), P.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    Z = (P - lo) / span
    fs = max(float(np.max(np.abs(f))), 1e-300)
    fn = f / fs
    W = [_minimax_plane(Z, fn)]
    anchors = []
    for _ in range(n_planes - 1):
        env = np.max(np.hstack([Z, np.ones((len(Z), 1))]) @ np.array(W).T, axis=1)
        gap = fn - env
        k = int(np.argmax(gap))
        if gap[k] <= 1e-12:
            break
        W.append(_supporting_plane(Z, fn, k))
        anchors.append(tuple(P[k]))
    # back to original coordinates: w.z + c  with z = (x - lo) / span
    planes = []
    for w in W:
        g = w[:-1] / span * fs
        c = (w[-1] - np.sum(w[:-1] * lo / span)) * fs
        planes.append(tuple(float(v) for v in g) + (float(c),))
    planes = _dedupe(planes)
    env = PlaneEnvelope(tuple(planes), P.shape[1], 0.0, float(np.max(f)), tuple(anchors))
    vals = env(*P.T)
    over = float(np.max(vals - f))
    if over > tol * max(1.0, fs) + 1e-7 * fs:
        raise PwlFitError(f"envelope exceeds samples by {over:.3g}")
    gap = float(np.max(f - vals))
    return PlaneEnvelope(env.planes, env.input_dim, max(gap, 0.0), float(np.max(f)), tuple(anchors))


def _dedupe(planes: list[tuple[float, ...]], rel: float = 1e-9) -> list[tuple[float, ...]]:
    out: list[tuple[float, ...]] = []
    for p in planes:
        if any(all(abs(a - b) <= rel * max(1.0, abs(a), abs(b)) for a, b in zip(p, q)) for q in out):
            continue
        out.append(p)
    return out


def sample_box(f: Callable, bounds: Sequence[tuple[float, float]], n: int | Sequence[int],
               log_axes: Sequence[bool] | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``f`` on a tensor grid over ``bounds``; returns (points, values)."""
    d = len(bounds)
    ns = [n] * d if isinstance(n, int) else list(n)
    logs = log_axes or [False] * d
    axes = []
    for (a, b), k, lg in zip(bounds, ns, logs):
        if lg and a > 0:
            axes.append(np.geomspace(a, b, k))
        else:
            axes.append(np.linspace(a, b, k))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = np.asarray(f(*pts.T), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise SamplingError("non-finite function value in sample box")
    return pts, vals


def chen_lmtd(dt1, dt2):
    """Chen's approximation of the log-mean temperature difference."""
    d1 = np.asarray(dt1, dtype=float)
    d2 = np.asarray(dt2, dtype=float)
    out = np.cbrt(d1 * d2 * (d1 + d2) / 2.0)
    return float(out) if np.ndim(out) == 0 else out


def area_cost(q, dt1, dt2, u_coeff: float, c_v: float, beta: float):
    """Variable exchanger cost ``c_v * (q / (U * LMTD))**beta`` with Chen's LMTD."""
    lm = chen_lmtd(dt1, dt2)
    qa = np.maximum(np.asarray(q, dtype=float), 0.0)
    out = c_v * (qa / (u_coeff * lm)) ** beta
    return float(out) if np.ndim(out) == 0 else out


def lmtd_exact(dt1: float, dt2: float) -> float:
    if abs(dt1 - dt2) <= 1e-12 * max(dt1, dt2):
        return dt1
    return (dt1 - dt2) / math.log(dt1 / dt2)
