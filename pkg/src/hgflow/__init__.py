"""Hyperbolic geometric flow of conformal metrics ``u (dx^2 + dy^2)`` on surfaces.

The flow reduces to ``u_tt = (ln u)_xx`` for metrics depending on one
coordinate, which is evolved through its Riemann invariants.
"""
from .errors import HGFError
from .grid import (Boundary, ConformalState, DiagnosticRecord, FlowTrajectory, Grid1D,
                   InitialData, build_grid, l_inf_distance, sample_function)
from .invariants import (check_admissibility, hat_invariants, initial_invariants, lambda_of,
                         state_to_metric, tilde_invariants)
from .solver import Limiter, SolverConfig, run, second_order_residual, stable_dt, step
from .curvature import bound_monitor, curvature_field, fit_decay
from .characteristics import Family, determinate_domain, trace
from .blowup import blowup_report, predict_tmax
from .exact import SeparableSolution, TravelingWaveSolution
from .torus import run_periodic, volume
from .radial import run_radial
from .expr import parse_expression

__version__ = "0.1.0"

__all__ = [
    "HGFError", "Boundary", "ConformalState", "DiagnosticRecord", "FlowTrajectory", "Grid1D",
    "InitialData", "build_grid", "l_inf_distance", "sample_function", "check_admissibility",
    "hat_invariants", "initial_invariants", "lambda_of", "state_to_metric", "tilde_invariants",
    "Limiter", "SolverConfig", "run", "second_order_residual", "stable_dt", "step",
    "bound_monitor", "curvature_field", "fit_decay", "Family", "determinate_domain", "trace",
    "blowup_report", "predict_tmax", "SeparableSolution", "TravelingWaveSolution",
    "run_periodic", "volume", "run_radial", "parse_expression",
]
