"""Problem instance: operating variable, streams, utilities, products, economics,
performance models and HEN settings. Loaded from JSON (streams optionally from
CSV) and immutable afterwards."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import jsonschema
import numpy as np

from .pwl_fit import DomainError, Pwl1D, fit_pwl_1d

HOT, COLD, CS = "hot", "cold", "cs"


class CaseError(ValueError):
    """Schema violation or inconsistent case data; message names the field."""


# ---------------------------------------------------------------------------
# types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatingVariable:
    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise CaseError(f"opvar: lower {self.lower} must be below upper {self.upper}")

    def grid(self, n: int) -> np.ndarray:
        return np.linspace(self.lower, self.upper, n)

    def contains(self, u: float, tol: float = 1e-12) -> bool:
        return self.lower - tol <= u <= self.upper + tol


@dataclass(frozen=True)
class ParamModel:
    """A stream parameter: constant, PWL function of the operating variable, or a
    free decision variable within bounds."""

    variant: str  # constant | pwl | free
    value: float = math.nan
    pwl: Pwl1D | None = None
    lower: float = math.nan
    upper: float = math.nan

    @classmethod
    def const(cls, v: float) -> "ParamModel":
        return cls("constant", value=float(v))

    @classmethod
    def of_pwl(cls, p: Pwl1D) -> "ParamModel":
        return cls("pwl", pwl=p)

    @classmethod
    def free(cls, lo: float, hi: float) -> "ParamModel":
        if not lo < hi:
            raise CaseError(f"free parameter bounds must satisfy lower < upper, got [{lo}, {hi}]")
        return cls("free", lower=float(lo), upper=float(hi))

    @property
    def is_free(self) -> bool:
        return self.variant == "free"

    @property
    def depends_on_u(self) -> bool:
        return self.variant == "pwl" and self.pwl is not None and len(set(self.pwl.values)) > 1

    def at(self, u: float) -> float:
        if self.variant == "constant":
            return self.value
        if self.variant == "pwl":
            return self.pwl(u)
        raise CaseError("free parameters are decision variables and have no value at u")

    def bounds(self) -> tuple[float, float]:
        """(min, max) over the whole operating range / free interval."""
        if self.variant == "constant":
            return self.value, self.value
        if self.variant == "pwl":
            return self.pwl.min_max()
        return self.lower, self.upper

    def to_dict(self) -> dict:
        if self.variant == "constant":
            return {"constant": self.value}
        if self.variant == "pwl":
            return {"pwl": self.pwl.to_dict()}
        return {"free": [self.lower, self.upper]}

    @classmethod
    def from_dict(cls, d: dict) -> "ParamModel":
        if "constant" in d:
            return cls.const(d["constant"])
        if "pwl" in d:
            return cls.of_pwl(Pwl1D.from_dict(d["pwl"]))
        return cls.free(*d["free"])


@dataclass(frozen=True)
class StreamDef:
    id: str
    kind: str
    t_in: ParamModel
    t_out: ParamModel
    f: ParamModel
    u_coeff: float = 0.5

    @property
    def is_hot(self) -> bool:
        return self.kind in (HOT, CS)

    @property
    def span_bounds(self) -> tuple[float, float]:
        """Bounds of |t_in - t_out| (K)."""
        a_lo, a_hi = self.t_in.bounds()
        b_lo, b_hi = self.t_out.bounds()
        if self.is_hot:
            return max(0.0, a_lo - b_hi), a_hi - b_lo
        return max(0.0, b_lo - a_hi), b_hi - a_lo

    def duty_max(self) -> float:
        """Upper bound on the stream's total duty from parameter bounds (kW)."""
        return self.f.bounds()[1] * self.span_bounds[1]

    def t_max(self) -> float:
        return max(self.t_in.bounds()[1], self.t_out.bounds()[1])

    def t_min(self) -> float:
        return min(self.t_in.bounds()[0], self.t_out.bounds()[0])

    def to_dict(self) -> dict:
        return {"id": self.id, "kind": self.kind, "t_in": self.t_in.to_dict(), "t_out": self.t_out.to_dict(),
                "f": self.f.to_dict(), "u_coeff": self.u_coeff}

    @classmethod
    def from_dict(cls, d: dict) -> "StreamDef":
        return cls(d["id"], d["kind"], ParamModel.from_dict(d["t_in"]), ParamModel.from_dict(d["t_out"]),
                   ParamModel.from_dict(d["f"]), float(d.get("u_coeff", 0.5)))


@dataclass(frozen=True)
class UtilityDef:
    t_in: float
    t_out: float
    u_coeff: float = 0.5

    def to_dict(self) -> dict:
        return {"t_in": self.t_in, "t_out": self.t_out, "u_coeff": self.u_coeff}


@dataclass(frozen=True)
class ProductDef:
    v: int
    name: str
    h_prod: float  # MJ/kg
    rho_prod: float  # kg/m3
    mu_prod: float  # mPa s

    def to_dict(self) -> dict:
        return {"v": self.v, "name": self.name, "h_prod": self.h_prod, "rho_prod": self.rho_prod,
                "mu_prod": self.mu_prod}


@dataclass(frozen=True)
class EconomicParams:
    t_full_load: float  # h/yr
    af_inv: float  # 1/yr
    af_op: float
    c_sys: float  # EUR
    c_el: float  # EUR/MWh
    c_feedstock: tuple[tuple[str, float], ...]  # EUR/t
    c_f_hex: float  # EUR/yr per exchanger
    c_v_hex: float  # EUR/(m^(2 beta) yr)
    beta: float
    eps_hu: float
    eps_cu: float

    def feed_price(self, name: str) -> float:
        for n, c in self.c_feedstock:
            if n == name:
                return c
        raise CaseError(f"economics.c_feedstock: no price for feedstock {name!r}")

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["c_feedstock"] = [{"name": n, "cost": c} for n, c in self.c_feedstock]
        return d


@dataclass(frozen=True)
class PerfModel:
    """A performance model with the samples it was fitted to (if any)."""

    model: Pwl1D
    samples: tuple[tuple[float, float], ...] = ()
    rmse_target: float | None = None

    def to_dict(self) -> dict:
        d: dict = {"pwl": self.model.to_dict()}
        if self.samples:
            d["samples"] = [list(s) for s in self.samples]
        if self.rmse_target is not None:
            d["rmse_target"] = self.rmse_target
        return d


@dataclass(frozen=True)
class PerformanceModels:
    p_sys: PerfModel  # kW vs V
    m_prod_total: PerfModel  # kg/h vs V
    h_dot_prod: PerfModel  # kW vs V
    feed_flows: tuple[tuple[str, PerfModel], ...]  # t/h vs V

    def to_dict(self) -> dict:
        return {"p_sys": self.p_sys.to_dict(), "m_prod_total": self.m_prod_total.to_dict(),
                "h_dot_prod": self.h_dot_prod.to_dict(),
                "feed_flows": [dict(name=n, **p.to_dict()) for n, p in self.feed_flows]}


@dataclass(frozen=True)
class HenConfig:
    n_stages: int = 3
    dt_min: float = 1.0
    stage_dt_nodes: int = 2  # grid nodes along the stage temperature drop in F*dt products
    cs_grid: tuple[int, int] = (3, 3)  # (F, dt) grid for combustion-system products
    area_planes: int = 8
    stream_rmse_target: float = 0.01
    cs_mode: str = "hull"  # hull | bilinear

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["cs_grid"] = list(self.cs_grid)
        return d


@dataclass(frozen=True)
class CaseDefinition:
    name: str
    opvar: OperatingVariable
    streams: tuple[StreamDef, ...]
    products: tuple[ProductDef, ...]
    economics: EconomicParams
    performance: PerformanceModels
    hen_config: HenConfig
    hot_utility: UtilityDef = field(default_factory=lambda: UtilityDef(1000.0, 999.0, 0.5))
    cold_utility: UtilityDef = field(default_factory=lambda: UtilityDef(15.0, 20.0, 0.5))

    def stream(self, sid: str) -> StreamDef:
        for s in self.streams:
            if s.id == sid:
                return s
        raise KeyError(sid)

    @property
    def hot(self) -> list[StreamDef]:
        return [s for s in self.streams if s.kind == HOT]

    @property
    def cold(self) -> list[StreamDef]:
        return [s for s in self.streams if s.kind == COLD]

    @property
    def cs(self) -> list[StreamDef]:
        return [s for s in self.streams if s.kind == CS]

    @property
    def hot_side(self) -> list[StreamDef]:
        """Process hot streams followed by combustion-system streams."""
        return self.hot + self.cs

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "opvar": {"name": self.opvar.name, "lower": self.opvar.lower, "upper": self.opvar.upper},
            "streams": [s.to_dict() for s in self.streams],
            "utilities": {"hot": self.hot_utility.to_dict(), "cold": self.cold_utility.to_dict()},
            "products": [p.to_dict() for p in self.products],
            "economics": self.economics.to_dict(),
            "performance": self.performance.to_dict(),
            "hen_config": self.hen_config.to_dict(),
        }


# ---------------------------------------------------------------------------
# schema
# ---------------------------------------------------------------------------

_PWL = {"type": "object", "required": ["breakpoints", "values"],
        "properties": {"breakpoints": {"type": "array", "items": {"type": "number"}, "minItems": 2},
                       "values": {"type": "array", "items": {"type": "number"}, "minItems": 2}}}
_PARAM = {"oneOf": [
    {"type": "object", "required": ["constant"], "properties": {"constant": {"type": "number"}},
     "additionalProperties": False},
    {"type": "object", "required": ["pwl"], "properties": {"pwl": _PWL}, "additionalProperties": False},
    {"type": "object", "required": ["free"], "additionalProperties": False,
     "properties": {"free": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}}},
]}
_PERF = {"type": "object", "anyOf": [{"required": ["pwl"]}, {"required": ["samples"]}],
         "properties": {"pwl": _PWL, "samples": {"type": "array", "minItems": 2,
                                                  "items": {"type": "array", "items": {"type": "number"},
                                                            "minItems": 2, "maxItems": 2}},
                        "rmse_target": {"type": "number", "minimum": 0}, "name": {"type": "string"}}}
_UTIL = {"type": "object", "required": ["t_in", "t_out"],
         "properties": {"t_in": {"type": "number"}, "t_out": {"type": "number"}, "u_coeff": {"type": "number"}}}

CASE_SCHEMA = {
    "type": "object",
    "required": ["opvar", "streams", "products", "economics", "performance", "hen_config"],
    "properties": {
        "name": {"type": "string"},
        "opvar": {"type": "object", "required": ["name", "lower", "upper"],
                  "properties": {"name": {"type": "string"}, "lower": {"type": "number"},
                                 "upper": {"type": "number"}}},
        "streams": {"oneOf": [
            {"type": "array", "minItems": 1, "items": {
                "type": "object", "required": ["id", "kind", "t_in", "t_out", "f"],
                "properties": {"id": {"type": "string"}, "kind": {"enum": [HOT, COLD, CS]},
                               "t_in": _PARAM, "t_out": _PARAM, "f": _PARAM,
                               "u_coeff": {"type": "number", "exclusiveMinimum": 0}}}},
            {"type": "object", "required": ["csv"], "properties": {"csv": {"type": "string"}}},
        ]},
        "utilities": {"type": "object", "properties": {"hot": _UTIL, "cold": _UTIL}},
        "products": {"type": "array", "items": {
            "type": "object", "required": ["v", "name", "h_prod"],
            "properties": {"v": {"type": "integer"}, "name": {"type": "string"}, "h_prod": {"type": "number"},
                           "rho_prod": {"type": "number"}, "mu_prod": {"type": "number"}}}},
        "economics": {"type": "object", "required": [
            "t_full_load", "af_inv", "af_op", "c_sys", "c_el", "c_feedstock", "c_f_hex", "c_v_hex", "beta",
            "eps_hu", "eps_cu"],
            "properties": {"c_feedstock": {"type": "array", "items": {
                "type": "object", "required": ["name", "cost"],
                "properties": {"name": {"type": "string"}, "cost": {"type": "number"}}}}}},
        "performance": {"type": "object", "required": ["p_sys", "m_prod_total", "h_dot_prod", "feed_flows"],
                        "properties": {"p_sys": _PERF, "m_prod_total": _PERF, "h_dot_prod": _PERF,
                                       "feed_flows": {"type": "array", "items": _PERF}}},
        "hen_config": {"type": "object", "required": ["n_stages", "dt_min"],
                       "properties": {"n_stages": {"type": "integer", "minimum": 1},
                                      "dt_min": {"type": "number", "exclusiveMinimum": 0},
                                      "cs_mode": {"enum": ["hull", "bilinear"]}}},
    },
}


def _schema_check(doc: dict) -> None:
    validator = jsonschema.Draft7Validator(CASE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        e = errors[0]
        where = ".".join(str(p) for p in e.path) or "<root>"
        raise CaseError(f"case schema violation at '{where}': {e.message}")


def _perf_from_dict(d: dict, where: str) -> PerfModel:
    samples = tuple(tuple(float(v) for v in s) for s in d.get("samples", ()))
    target = d.get("rmse_target")
    if "pwl" in d:
        model = Pwl1D.from_dict(d["pwl"])
    else:
        if target is None:
            raise CaseError(f"{where}: samples given without rmse_target")
        model = fit_pwl_1d(samples, float(target))
    return PerfModel(model, samples, None if target is None else float(target))


def read_stream_csv(path: str | Path) -> list[StreamDef]:
    """Stream table with columns id, kind, t_in_min, t_in_max, t_out_min,
    t_out_max, f_min, f_max, u_coeff, and optionally u_lower, u_upper.

    Process-stream ranges become linear models of the operating variable
    (min at u_lower, max at u_upper); equal min and max give a constant. For
    ``cs`` rows t_in must be constant and t_out/f are free within the ranges.
    """
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                out.append(_stream_from_row(row))
            except (KeyError, ValueError) as exc:
                raise CaseError(f"stream CSV {path}: row {row.get('id', '?')}: {exc}") from exc
    return out


def _stream_from_row(row: dict) -> StreamDef:
    u_lo = float(row.get("u_lower") or 1.275)
    u_hi = float(row.get("u_upper") or 1.305)

    def rng(key: str, free: bool = False) -> ParamModel:
        lo, hi = float(row[f"{key}_min"]), float(row[f"{key}_max"])
        if lo == hi:
            return ParamModel.const(lo)
        if free:
            return ParamModel.free(lo, hi)
        return ParamModel.of_pwl(Pwl1D.from_points((u_lo, u_hi), (lo, hi)))

    kind = row["kind"].strip()
    is_cs = kind == CS
    return StreamDef(row["id"].strip(), kind, rng("t_in"), rng("t_out", is_cs), rng("f", is_cs),
                     float(row.get("u_coeff") or 0.5))


def case_from_dict(doc: dict, base_dir: Path | None = None) -> CaseDefinition:
    _schema_check(doc)
    ov = doc["opvar"]
    opvar = OperatingVariable(ov["name"], float(ov["lower"]), float(ov["upper"]))
    if isinstance(doc["streams"], dict):
        p = Path(doc["streams"]["csv"])
        if not p.is_absolute() and base_dir is not None:
            p = base_dir / p
        streams = tuple(read_stream_csv(p))
    else:
        streams = tuple(StreamDef.from_dict(s) for s in doc["streams"])
    ids = [s.id for s in streams]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise CaseError(f"streams: duplicate stream ids {sorted(dup)}")
    for s in streams:
        for pname in ("t_in", "t_out", "f"):
            pm: ParamModel = getattr(s, pname)
            if pm.variant == "pwl":
                lo, hi = pm.pwl.domain
                if lo > opvar.lower + 1e-12 or hi < opvar.upper - 1e-12:
                    raise DomainError(f"streams.{s.id}.{pname}: PWL domain [{lo}, {hi}] does not cover "
                                      f"operating range [{opvar.lower}, {opvar.upper}]")
            if pm.is_free and not (s.kind == CS and pname != "t_in"):
                raise CaseError(f"streams.{s.id}.{pname}: only cs outlet temperature and f may be free")
        if s.kind == CS and s.t_in.variant != "constant":
            raise CaseError(f"streams.{s.id}.t_in: cs inlet temperature must be constant")
    util = doc.get("utilities", {})
    hu = util.get("hot", {"t_in": 1000.0, "t_out": 999.0})
    cu = util.get("cold", {"t_in": 15.0, "t_out": 20.0})
    products = tuple(ProductDef(int(p["v"]), p["name"], float(p["h_prod"]), float(p.get("rho_prod", math.nan)),
                                float(p.get("mu_prod", math.nan))) for p in doc["products"])
    e = doc["economics"]
    econ = EconomicParams(
        float(e["t_full_load"]), float(e["af_inv"]), float(e["af_op"]), float(e["c_sys"]), float(e["c_el"]),
        tuple((c["name"], float(c["cost"])) for c in e["c_feedstock"]), float(e["c_f_hex"]),
        float(e["c_v_hex"]), float(e["beta"]), float(e["eps_hu"]), float(e["eps_cu"]))
    pf = doc["performance"]
    perf = PerformanceModels(
        _perf_from_dict(pf["p_sys"], "performance.p_sys"),
        _perf_from_dict(pf["m_prod_total"], "performance.m_prod_total"),
        _perf_from_dict(pf["h_dot_prod"], "performance.h_dot_prod"),
        tuple((ff.get("name", f"feed{k}"), _perf_from_dict(ff, f"performance.feed_flows.{k}"))
              for k, ff in enumerate(pf["feed_flows"])))
    for pname, pm in [("p_sys", perf.p_sys), ("m_prod_total", perf.m_prod_total),
                      ("h_dot_prod", perf.h_dot_prod)] + [(f"feed_flows.{n}", p) for n, p in perf.feed_flows]:
        lo, hi = pm.model.domain
        if lo > opvar.lower + 1e-12 or hi < opvar.upper - 1e-12:
            raise DomainError(f"performance.{pname}: PWL domain [{lo}, {hi}] does not cover the operating range")
    for n, _ in perf.feed_flows:
        econ.feed_price(n)
    hc = doc["hen_config"]
    hen = HenConfig(int(hc["n_stages"]), float(hc["dt_min"]), int(hc.get("stage_dt_nodes", 2)),
                    tuple(hc.get("cs_grid", (3, 3))), int(hc.get("area_planes", 8)),
                    float(hc.get("stream_rmse_target", 0.01)), str(hc.get("cs_mode", "hull")))
    return CaseDefinition(doc.get("name", "case"), opvar, streams, products, econ, perf, hen,
                          UtilityDef(float(hu["t_in"]), float(hu["t_out"]), float(hu.get("u_coeff", 0.5))),
                          UtilityDef(float(cu["t_in"]), float(cu["t_out"]), float(cu.get("u_coeff", 0.5))))


def load_case(path: str | Path) -> CaseDefinition:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"case file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CaseError(f"{path}: invalid JSON ({exc})") from exc
    return case_from_dict(doc, path.parent)


def reference_case_path() -> Path:
    """Location of the packaged reference case file."""
    return Path(__file__).with_name("data") / "reference_case.json"


def load_reference_case() -> CaseDefinition:
    return load_case(reference_case_path())


def save_case(c: CaseDefinition, path: str | Path) -> None:
    Path(path).write_text(json.dumps(c.to_dict(), indent=1))


def stream_parameter_at(s: StreamDef, u: float, opvar: OperatingVariable | None = None) -> tuple[float, float, float]:
    """(t_in, t_out, f) of a stream at operating point ``u``."""
    if opvar is not None and not opvar.contains(u):
        raise DomainError(f"u = {u} outside operating range [{opvar.lower}, {opvar.upper}]")
    if s.t_out.is_free or s.f.is_free:
        raise CaseError(f"stream {s.id} has free parameters; they are decision variables")
    return s.t_in.at(u), s.t_out.at(u), s.f.at(u)


def validate_case(c: CaseDefinition, n_points: int = 13) -> list[str]:
    """Check type invariants on a grid of operating points; returns diagnostics."""
    diags: list[str] = []
    grid = c.opvar.grid(max(7, n_points))
    for s in c.streams:
        if s.kind not in (HOT, COLD, CS):
            diags.append(f"stream {s.id}: unknown kind {s.kind!r}")
            continue
        if s.u_coeff <= 0:
            diags.append(f"stream {s.id}: heat transfer coefficient must be positive")
        if s.kind == CS:
            lo, hi = s.t_out.bounds()
            if hi > s.t_in.value:
                diags.append(f"stream {s.id}: cs outlet bound {hi} above inlet {s.t_in.value}")
            if s.f.bounds()[0] <= 0:
                diags.append(f"stream {s.id}: flow capacity must be positive")
            continue
        for u in grid:
            t_in, t_out, f = stream_parameter_at(s, float(u))
            if s.kind == HOT and t_in < t_out:
                diags.append(f"stream {s.id}: hot stream has t_in {t_in:.4g} < t_out {t_out:.4g} at u = {u:.6g}")
            if s.kind == COLD and t_in > t_out:
                diags.append(f"stream {s.id}: cold stream has t_in {t_in:.4g} > t_out {t_out:.4g} at u = {u:.6g}")
            if f <= 0:
                diags.append(f"stream {s.id}: flow capacity {f:.4g} <= 0 at u = {u:.6g}")
    e = c.economics
    if not 0 < e.beta <= 1:
        diags.append(f"economics.beta = {e.beta}: cost exponent out of (0,1]")
    for k in ("t_full_load", "af_inv", "af_op", "c_sys", "c_el", "c_f_hex", "c_v_hex", "eps_hu", "eps_cu"):
        if getattr(e, k) < 0:
            diags.append(f"economics.{k} must be >= 0")
    if e.af_inv <= 0:
        diags.append("economics.af_inv must be 1/a with depreciation period a > 0")
    for n, cost in e.c_feedstock:
        if cost < 0:
            diags.append(f"economics.c_feedstock.{n} must be >= 0")
    for p in c.products:
        if p.h_prod <= 0:
            diags.append(f"product {p.name}: h_prod must be positive")
    if c.hen_config.n_stages < 1:
        diags.append("hen_config.n_stages must be >= 1")
    if c.hen_config.dt_min <= 0:
        diags.append("hen_config.dt_min must be > 0")
    for name, pm in [("p_sys", c.performance.p_sys), ("m_prod_total", c.performance.m_prod_total),
                     ("h_dot_prod", c.performance.h_dot_prod)]:
        vals = pm.model(grid)
        if name != "p_sys" and np.any(vals <= 0):
            diags.append(f"performance.{name} must be positive over the operating range")
    if np.any(c.performance.p_sys.model(grid) <= 0):
        diags.append("performance.p_sys must be positive over the operating range")
    cu, hu = c.cold_utility, c.hot_utility
    if cu.t_out < cu.t_in:
        diags.append("utilities.cold: outlet below inlet")
    if hu.t_out > hu.t_in:
        diags.append("utilities.hot: outlet above inlet")
    return diags


def mean_heating_value(products: Sequence[ProductDef], weights: Sequence[float] | None = None) -> float:
    """Mass-weighted heating value (MJ/kg)."""
    w = np.ones(len(products)) if weights is None else np.asarray(weights, dtype=float)
    h = np.array([p.h_prod for p in products])
    return float(np.sum(w * h) / np.sum(w))


def minimal_case(hot: Sequence[tuple[str, float, float, float]], cold: Sequence[tuple[str, float, float, float]],
                 *, n_stages: int = 1, dt_min: float = 1.0, u_coeff: float = 0.5, name: str = "minimal",
                 economics: EconomicParams | None = None) -> CaseDefinition:
    """Constant-parameter case from (id, t_in, t_out, F) tuples.

    Performance models are flat placeholders on a unit operating range, so
    the case is usable for HEN-only studies.
    """
    opvar = OperatingVariable("u", 0.0, 1.0)
    streams = [StreamDef(i, HOT, ParamModel.const(a), ParamModel.const(b), ParamModel.const(f), u_coeff)
               for i, a, b, f in hot]
    streams += [StreamDef(i, COLD, ParamModel.const(a), ParamModel.const(b), ParamModel.const(f), u_coeff)
                for i, a, b, f in cold]
    flat = PerfModel(Pwl1D.constant(1.0, 0.0, 1.0))
    perf = PerformanceModels(flat, flat, flat, ())
    econ = economics or EconomicParams(8000.0, 0.05, 1.0, 0.0, 20.0, (), 1013.6, 61.8, 0.8, 1.05, 0.05)
    return CaseDefinition(name, opvar, tuple(streams), (ProductDef(1, "product", 44.2, math.nan, math.nan),),
                          econ, perf, HenConfig(n_stages=n_stages, dt_min=dt_min))
