"""Exact shuttling schedules for trapped-ion QCCD memory zones via SAT."""

__version__ = "0.1.0"

from .layout import Layout, LayoutError, build_grid_layout, memory_edge_count
from .problem import ProblemInstance, load_problem, make_problem, save_problem
from .solver import SolveBudget, SolveOutcome, solve_fixed, solve_minimal
from .verify import Schedule, oracle_minimal, validate_schedule

__all__ = ["Layout", "LayoutError", "build_grid_layout", "memory_edge_count", "ProblemInstance",
           "load_problem", "make_problem", "save_problem", "SolveBudget", "SolveOutcome", "solve_fixed",
           "solve_minimal", "Schedule", "oracle_minimal", "validate_schedule"]
