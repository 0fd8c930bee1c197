"""Simultaneous optimization of a Power-to-Liquid process and its heat exchanger network."""

from .case_data import CaseDefinition, CaseError, load_case, load_reference_case, minimal_case, validate_case
from .milp import SolveOptions, new_model, solve
from .objectives import Boxes, build_objectives, exact_objectives
from .pareto import ParetoPoint, build_problem, epsilon_sweep, filter_nondominated
from .superstructure import HenDesign, Mode, build_hen, check_solution, extract_design

__version__ = "0.1.0"

__all__ = [
    "CaseDefinition", "CaseError", "load_case", "load_reference_case", "minimal_case", "validate_case",
    "SolveOptions", "new_model", "solve", "Boxes", "build_objectives", "exact_objectives", "ParetoPoint",
    "build_problem", "epsilon_sweep", "filter_nondominated", "HenDesign", "Mode", "build_hen", "check_solution",
    "extract_design",
]
