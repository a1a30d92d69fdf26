"""Sampling the coupling ansatz on a grid and projecting surfaces back onto couplings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import IllConditionedFit
from ..flows.couplings import MSRCouplings, ScalarCouplings
from .grid import FieldGrid, PotentialSurface

MAX_CONDITION = 1e10


def ansatz_values(model: str, couplings, x, y):
    """Potential of the coupling ansatz at field values (x, y)."""
    if model == "two_scalar":
        c = couplings
        return (c.U0 + c.m1_sq / 2 * x ** 2 + c.m2_sq / 2 * y ** 2 + c.lambda1 / 24 * x ** 4
                + c.lambda2 / 24 * y ** 4 + c.lambda3 / 4 * x ** 2 * y ** 2)
    c = couplings
    # normalised so that the mixed derivative is m^2 + lambda*phi/2
    return c.U0 + c.m_sq * x * y + c.lam / 4 * x ** 2 * y - c.D * y ** 2


def sample_ansatz(grid: FieldGrid, model: str, couplings, k: float) -> PotentialSurface:
    x, y = grid.mesh()
    return PotentialSurface(grid, k, ansatz_values(model, couplings, x, y), model)


def _basis(model: str, x, y):
    if model == "two_scalar":
        return [np.ones_like(x), x ** 2, y ** 2, x ** 4, y ** 4, x ** 2 * y ** 2]
    return [np.ones_like(x), x * y, x ** 2 * y, y ** 2]


@dataclass
class FitResult:
    couplings: object
    residual: float
    condition: float
    coefficients: np.ndarray


def fit_couplings(surface: PotentialSurface, mu_sq: float = 1.0, block=None) -> FitResult:
    """Least-squares projection onto the model's monomials over the centred third of the grid."""
    block = block or surface.grid.central_block()
    x, y = surface.grid.mesh()
    xs, ys, us = x[block].ravel(), y[block].ravel(), surface.values[block].ravel()
    cols = _basis(surface.model, xs, ys)
    A = np.column_stack(cols)
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    As = A / norms
    cond = float(np.linalg.cond(As))
    if not cond < MAX_CONDITION:
        raise IllConditionedFit(f"fit matrix condition number {cond:.3g} exceeds {MAX_CONDITION:.0e}",
                                k=surface.k, value=cond)
    sol, *_ = np.linalg.lstsq(As, us, rcond=None)
    c = sol / norms
    resid = float(np.sqrt(np.mean((A @ c - us) ** 2)))
    if surface.model == "two_scalar":
        couplings = ScalarCouplings(U0=c[0], m1_sq=2 * c[1], m2_sq=2 * c[2], lambda1=24 * c[3],
                                    lambda2=24 * c[4], lambda3=4 * c[5], mu_sq=mu_sq)
    else:
        couplings = MSRCouplings(U0=c[0], m_sq=c[1], lam=4 * c[2], D=-c[3], mu_sq=mu_sq,
                                 dimension="d4" if surface.model == "msr_d4" else "d3")
    return FitResult(couplings, resid, cond, c)
