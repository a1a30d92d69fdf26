"""Grid solver for the local-potential flow, its diagnostics and coupling projections."""

from .backend import NAME as KERNEL_BACKEND
from .fit import FitResult, ansatz_values, fit_couplings, sample_ansatz
from .grid import FieldGrid, PotentialSurface
from .project import project_betas_fd
from .rhs import RHSResult, k_ratio, rhs_surface
from .seminorm import seminorm_estimate, seminorms
from .solver import (BoundaryData, FlowDiagnostics, FlowResult, Guards, StepRecord, ansatz_boundary,
                     solve_flow, step_flow)

__all__ = [
    "KERNEL_BACKEND", "FitResult", "ansatz_values", "fit_couplings", "sample_ansatz", "FieldGrid",
    "PotentialSurface", "project_betas_fd", "RHSResult", "k_ratio", "rhs_surface", "seminorm_estimate",
    "seminorms", "BoundaryData", "FlowDiagnostics", "FlowResult", "Guards", "StepRecord", "ansatz_boundary",
    "solve_flow", "step_flow",
]
