"""Grasp quality metrics: lift capability (an LP) and the wrench-space stability margin."""

from .lift import LiftSolution, feasible_under_cap, lift_capability, solve_min_force
from .margin import StabilityMargin, exact_hull_margin, grasp_stability, signed_hull_margin
from .simplex import LPError, LPResult, LPStatus, linprog

__all__ = [
    "LPError", "LPResult", "LPStatus", "LiftSolution", "StabilityMargin",
    "exact_hull_margin", "feasible_under_cap", "grasp_stability", "lift_capability",
    "linprog", "signed_hull_margin", "solve_min_force",
]
