"""Solver-agnostic MILP container: variables, linear expressions, constraints."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

CONTINUOUS = "continuous"
BINARY = "binary"

_SENSES = {"<=": "<=", "=<": "<=", ">=": ">=", "=>": ">=", "==": "==", "=": "=="}


class ModelError(ValueError):
    """Invalid model construction (duplicate names, foreign variables, ...)."""


class Var:
    """Handle to a declared variable. Hashable by identity of (model, index)."""

    __slots__ = ("model_id", "index", "name", "kind", "lower", "upper")

    def __init__(self, model_id: int, index: int, name: str, kind: str, lower: float, upper: float):
        self.model_id = model_id
        self.index = index
        self.name = name
        self.kind = kind
        self.lower = lower
        self.upper = upper

    def __repr__(self) -> str:
        return f"Var({self.name!r})"

    def __hash__(self) -> int:
        return hash((self.model_id, self.index))

    def expr(self) -> "LinExpr":
        return LinExpr({self.index: 1.0}, 0.0, self.model_id)

    # arithmetic delegates to LinExpr
    def __add__(self, other):
        return self.expr() + other

    __radd__ = __add__

    def __sub__(self, other):
        return self.expr() - other

    def __rsub__(self, other):
        return (-self.expr()) + other

    def __mul__(self, c):
        return self.expr() * c

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.expr() * (1.0 / c)

    def __neg__(self):
        return self.expr() * -1.0

    def __le__(self, other):
        return self.expr() <= other

    def __ge__(self, other):
        return self.expr() >= other


ExprLike = Union["LinExpr", Var, float, int]


class LinExpr:
    """Sparse linear expression ``sum(coef * var) + constant``."""

    __slots__ = ("terms", "constant", "model_id")

    def __init__(self, terms: dict[int, float] | None = None, constant: float = 0.0, model_id: int | None = None):
        self.terms = dict(terms) if terms else {}
        self.constant = float(constant)
        self.model_id = model_id

    @staticmethod
    def of(x: ExprLike) -> "LinExpr":
        if isinstance(x, LinExpr):
            return x
        if isinstance(x, Var):
            return x.expr()
        return LinExpr(None, float(x))

    def copy(self) -> "LinExpr":
        return LinExpr(self.terms, self.constant, self.model_id)

    def _merge_model(self, other: "LinExpr") -> int | None:
        if self.model_id is None:
            return other.model_id
        if other.model_id is not None and other.model_id != self.model_id:
            raise ModelError("expression mixes variables of different models")
        return self.model_id

    def iadd(self, other: ExprLike, scale: float = 1.0) -> "LinExpr":
        """In-place ``self += scale * other``; returns self."""
        if isinstance(other, Var):
            self.model_id = self._merge_model(other.expr())
            self.terms[other.index] = self.terms.get(other.index, 0.0) + scale
            return self
        o = LinExpr.of(other)
        self.model_id = self._merge_model(o)
        for k, v in o.terms.items():
            self.terms[k] = self.terms.get(k, 0.0) + scale * v
        self.constant += scale * o.constant
        return self

    def __add__(self, other: ExprLike) -> "LinExpr":
        return self.copy().iadd(other)

    __radd__ = __add__

    def __sub__(self, other: ExprLike) -> "LinExpr":
        return self.copy().iadd(other, -1.0)

    def __rsub__(self, other: ExprLike) -> "LinExpr":
        return (self * -1.0).iadd(other)

    def __mul__(self, c) -> "LinExpr":
        if isinstance(c, (LinExpr, Var)):
            raise ModelError("product of two expressions is not linear")
        c = float(c)
        return LinExpr({k: v * c for k, v in self.terms.items()}, self.constant * c, self.model_id)

    __rmul__ = __mul__

    def __truediv__(self, c) -> "LinExpr":
        return self * (1.0 / float(c))

    def __neg__(self) -> "LinExpr":
        return self * -1.0

    def __le__(self, other: ExprLike) -> "Constraint":
        return Constraint.build(self, "<=", other)

    def __ge__(self, other: ExprLike) -> "Constraint":
        return Constraint.build(self, ">=", other)

    def value(self, values: Mapping[int, float] | list) -> float:
        return self.constant + sum(c * values[k] for k, c in self.terms.items())

    def __repr__(self) -> str:
        body = " + ".join(f"{v:g}*x{k}" for k, v in self.terms.items())
        return f"LinExpr({body or '0'} + {self.constant:g})"


def quicksum(items: Iterable[ExprLike]) -> LinExpr:
    out = LinExpr()
    for it in items:
        out.iadd(it)
    return out


@dataclass
class Constraint:
    """``sum(terms) <sense> rhs`` with the expression constant folded into rhs."""

    terms: dict[int, float]
    sense: str
    rhs: float
    name: str = ""
    model_id: int | None = None

    @classmethod
    def build(cls, lhs: ExprLike, sense: str, rhs: ExprLike, name: str = "") -> "Constraint":
        if sense not in _SENSES:
            raise ModelError(f"unknown relation {sense!r}")
        e = LinExpr.of(lhs) - LinExpr.of(rhs)
        terms = {k: v for k, v in e.terms.items() if v != 0.0}
        return cls(terms, _SENSES[sense], -e.constant, name, e.model_id)

    def violation(self, x) -> float:
        lhs = sum(c * x[k] for k, c in self.terms.items())
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


_model_counter = 0


@dataclass
class MilpModel:
    """Minimization MILP. Grows monotonically; handles stay valid."""

    name: str = "model"
    variables: list[Var] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    objective: LinExpr = field(default_factory=LinExpr)
    _names: dict[str, int] = field(default_factory=dict, repr=False)
    _row_names: set = field(default_factory=set, repr=False)
    model_id: int = -1

    def __post_init__(self):
        global _model_counter
        if self.model_id < 0:
            _model_counter += 1
            self.model_id = _model_counter
        self.objective.model_id = self.model_id

    # -- building -----------------------------------------------------------
    def add_variable(self, name: str, lower: float = 0.0, upper: float = math.inf, kind: str = CONTINUOUS) -> Var:
        if name in self._names:
            raise ModelError(f"duplicate variable name {name!r}")
        if kind not in (CONTINUOUS, BINARY):
            raise ModelError(f"unknown variable kind {kind!r}")
        if kind == BINARY:
            lower, upper = max(0.0, lower), min(1.0, upper)
        if lower > upper:
            raise ModelError(f"variable {name!r}: lower bound {lower} exceeds upper bound {upper}")
        v = Var(self.model_id, len(self.variables), name, kind, float(lower), float(upper))
        self.variables.append(v)
        self._names[name] = v.index
        return v

    def add_binary(self, name: str) -> Var:
        return self.add_variable(name, 0.0, 1.0, BINARY)

    def add_constraint(self, lhs: ExprLike | Constraint, sense: str | None = None, rhs: ExprLike = 0.0,
                       name: str = "") -> Constraint:
        if isinstance(lhs, Constraint):
            con = lhs
            if name:
                con.name = name
        else:
            if sense is None:
                raise ModelError("relation missing")
            con = Constraint.build(lhs, sense, rhs, name)
        if con.model_id is not None and con.model_id != self.model_id:
            raise ModelError("constraint references variables of another model")
        n = len(self.variables)
        for k in con.terms:
            if not 0 <= k < n:
                raise ModelError(f"constraint {con.name or len(self.constraints)} references undeclared variable")
        if not con.name:
            con.name = f"c{len(self.constraints)}"
        if con.name in self._row_names:
            raise ModelError(f"duplicate constraint name {con.name!r}")
        self._row_names.add(con.name)
        self.constraints.append(con)
        return con

    def set_objective(self, expr: ExprLike, sense: str = "min") -> None:
        if sense != "min":
            raise ModelError("only minimization is supported; negate the expression")
        e = LinExpr.of(expr).copy()
        if e.model_id not in (None, self.model_id):
            raise ModelError("objective references variables of another model")
        e.model_id = self.model_id
        self.objective = e

    def fix(self, v: Var, value: float) -> None:
        v.lower = v.upper = float(value)

    # -- queries --------------------------------------------------------------
    def var(self, name: str) -> Var:
        return self.variables[self._names[name]]

    def has_var(self, name: str) -> bool:
        return name in self._names

    @property
    def num_binaries(self) -> int:
        return sum(1 for v in self.variables if v.kind == BINARY)

    def coefficient_range(self) -> tuple[float, float]:
        """(min, max) of nonzero |coefficient| over constraints and objective."""
        mags = [abs(c) for con in self.constraints for c in con.terms.values() if c]
        mags += [abs(c) for c in self.objective.terms.values() if c]
        if not mags:
            return (0.0, 0.0)
        return (min(mags), max(mags))

    def max_violation(self, x) -> float:
        worst = 0.0
        for con in self.constraints:
            worst = max(worst, con.violation(x))
        for v in self.variables:
            worst = max(worst, v.lower - x[v.index], x[v.index] - v.upper)
        return worst

    def summary(self) -> str:
        return (f"{self.name}: {len(self.variables)} variables ({self.num_binaries} binary), "
                f"{len(self.constraints)} constraints")
