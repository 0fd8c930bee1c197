from .backends import (
    INFEASIBLE,
    OPTIMAL,
    TIMEOUT_NO_SOLUTION,
    TIMEOUT_WITH_INCUMBENT,
    Solution,
    SolveOptions,
    SolverConfigError,
    available_backends,
    polish,
    solve,
)
from .model import BINARY, CONTINUOUS, Constraint, LinExpr, MilpModel, ModelError, Var, quicksum
from .mps import emit_mps, mps_names, read_mps


def new_model(name: str = "model") -> MilpModel:
    return MilpModel(name=name)


__all__ = [
    "BINARY", "CONTINUOUS", "Constraint", "LinExpr", "MilpModel", "ModelError", "Var", "quicksum",
    "emit_mps", "read_mps", "mps_names", "new_model", "solve", "Solution", "SolveOptions",
    "SolverConfigError", "available_backends", "polish", "OPTIMAL", "INFEASIBLE", "TIMEOUT_NO_SOLUTION",
    "TIMEOUT_WITH_INCUMBENT",
]
