"""Finite-difference schemes for stationary Hamilton-Jacobi equations on boxes."""

from .grid import DomainBox, Grid, NodeClass, build_grid
from .harness import StudyPlan, StudyReport, emit, observed_order, run_study
from .operators import BoundaryKind, CutoffBounds
from .problems import PROBLEM_NAMES, Problem, registry, verify_manufactured
from .schemes import SchemeConfig, SchemeKind, build_band, cutoff_report, evaluate, residual
from .solver import SolveOutcome, SolverConfig, pseudo_sweep, pseudo_time_solve, solve, tau_max
from .stencil import BACKEND

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "BoundaryKind",
    "CutoffBounds",
    "DomainBox",
    "Grid",
    "NodeClass",
    "PROBLEM_NAMES",
    "Problem",
    "SchemeConfig",
    "SchemeKind",
    "SolveOutcome",
    "SolverConfig",
    "StudyPlan",
    "StudyReport",
    "build_band",
    "build_grid",
    "cutoff_report",
    "emit",
    "evaluate",
    "observed_order",
    "pseudo_sweep",
    "pseudo_time_solve",
    "registry",
    "residual",
    "run_study",
    "solve",
    "tau_max",
    "verify_manufactured",
]
