"""Beta-function flows and their adaptive integrator."""

from .betas import (beta_dirac, beta_msr, beta_two_scalar, dirac_model, model_for, msr_model,
                    two_scalar_model)
from .bounds import check_boundedness
from .couplings import DiracCouplings, MSRCouplings, ScalarCouplings
from .integrate import FlowTrajectory, Termination, integrate_fixed_rk4, integrate_flow

__all__ = [
    "beta_dirac", "beta_msr", "beta_two_scalar", "dirac_model", "model_for", "msr_model",
    "two_scalar_model", "check_boundedness", "DiracCouplings", "MSRCouplings", "ScalarCouplings",
    "FlowTrajectory", "Termination", "integrate_fixed_rk4", "integrate_flow",
]
