"""Nodal right-hand side of the local-potential flow and its diffusion diagnostics.

Two-scalar: du/dk = B(u_11) + B(u_22) with pure second differences.

MSR: the printed flow drives the potential through the mixed derivative
M^2 = d^2 u / dphi dphiTilde only. Because the response field enters the
potential at most quadratically and its quadratic part (the noise term) does
not run, the flow is applied as

    du/dk (phi, phiTilde) = B(M0) + phiTilde * [B(M(phi)) - B(M0)]

where M(phi) is the mixed difference averaged over the interior
phiTilde nodes and M0 its value at phi = 0. At phiTilde = 1 this is exactly
B(M(phi)), the form from which the coupling flows are read off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import LogDomain
from .backend import kernels as _default_kernels
from .grid import PotentialSurface

INV_8PI2 = 1.0 / (8.0 * np.pi ** 2)


@dataclass
class RHSResult:
    rhs: np.ndarray            # full grid, zero on the boundary
    msq: list[np.ndarray]      # interior mass arrays, one per diffusion direction
    sigma: list[np.ndarray]    # interior effective diffusion, one per direction


def _log_domain(surface: PotentialSurface, k: float, flat: int, value: float, what: str) -> LogDomain:
    node = surface.grid.node(flat)
    return LogDomain(f"k^2 + {what} = {value:.6g} is not positive enough at node {node} "
                     f"(fields {surface.grid.coords(node)}) for k = {k:.12g}", k=k, node=node, value=value)


def rhs_surface(surface: PotentialSurface, k: float, mu_sq: float, eps_sing: float = 1e-8,
                kernels=None) -> RHSResult:
    kern = kernels or _default_kernels
    u = np.ascontiguousarray(surface.values)
    hx, hy = surface.grid.spacing
    n0, n1 = u.shape[0] - 2, u.shape[1] - 2
    out = np.zeros_like(u)

    if surface.model == "two_scalar":
        rhs = np.empty((n0, n1))
        m1, m2, s1, s2 = (np.empty((n0, n1)) for _ in range(4))
        bad = kern.scalar_rhs(u, hx, hy, k, mu_sq, eps_sing, rhs, m1, m2, s1, s2)
        if bad >= 0:
            val = min(k * k + m1.flat[bad], k * k + m2.flat[bad])
            raise _log_domain(surface, k, bad, val, "M^2")
        out[1:-1, 1:-1] = rhs
        return RHSResult(out, [m1, m2], [s1, s2])

    dim4 = surface.model == "msr_d4"
    mixed = np.empty((n0, n1))
    kern.mixed_difference(u, hx, hy, mixed)
    b_nodal, sigma = np.empty((n0, n1)), np.empty((n0, n1))
    bad = kern.density(mixed, k, mu_sq, dim4, eps_sing, b_nodal, sigma)
    if bad >= 0:
        raise _log_domain(surface, k, bad, k * k + mixed.flat[bad], "M^2")

    x, y = surface.grid.axes
    row = np.ascontiguousarray(mixed.mean(axis=1).reshape(-1, 1))
    m0 = np.array([[np.interp(0.0, x[1:-1], row[:, 0])]])
    b_row, s_row = np.empty_like(row), np.empty_like(row)
    b_0, s_0 = np.empty_like(m0), np.empty_like(m0)
    for arr, b, s in ((row, b_row, s_row), (m0, b_0, s_0)):
        bad = kern.density(arr, k, mu_sq, dim4, eps_sing, b, s)
        if bad >= 0:
            raise LogDomain(f"k^2 + M^2 = {k * k + arr.flat[bad]:.6g} for the averaged mixed derivative "
                            f"at k = {k:.12g}", k=k, node=None, value=float(k * k + arr.flat[bad]))
    out[1:-1, 1:-1] = b_0[0, 0] + y[None, 1:-1] * (b_row - b_0[0, 0])
    return RHSResult(out, [mixed], [sigma])


def sigma_derivative(model: str, k: float, msq: np.ndarray) -> np.ndarray:
    """d sigma / d M^2; zero for the three-dimensional MSR flow, whose density is linear."""
    if model == "msr_d3":
        return np.zeros_like(msq)
    return k * INV_8PI2 / (k * k + msq)


def k_ratio(surface: PotentialSurface, res: RHSResult, k: float) -> float:
    """max over nodes and D in {d/dfield_1, d/dfield_2, d/dk} of |sum sigma' D(M^2)| / sum sigma.

    D acts on the mass arrays (the second derivatives of u), the only place
    the flow depends on u. The k-derivative of M^2 is the matching
    difference of the RHS on nodes whose stencil stays in the interior.
    """
    hx, hy = surface.grid.spacing
    total_sigma = sum(res.sigma)
    num = {"d1": 0.0, "d2": 0.0, "dk": 0.0}
    rhs = res.rhs[1:-1, 1:-1]
    for idx, (msq, sig) in enumerate(zip(res.msq, res.sigma)):
        sp = sigma_derivative(surface.model, k, msq)
        g1, g2 = np.gradient(msq, hx, hy, edge_order=2)
        num["d1"] = num["d1"] + sp * g1
        num["d2"] = num["d2"] + sp * g2
        if surface.model == "two_scalar":
            if idx == 0:
                dk = (rhs[2:, 1:-1] - 2 * rhs[1:-1, 1:-1] + rhs[:-2, 1:-1]) / hx ** 2
            else:
                dk = (rhs[1:-1, 2:] - 2 * rhs[1:-1, 1:-1] + rhs[1:-1, :-2]) / hy ** 2
        else:
            dk = (rhs[2:, 2:] - rhs[2:, :-2] - rhs[:-2, 2:] + rhs[:-2, :-2]) / (4 * hx * hy)
        num["dk"] = num["dk"] + sp[1:-1, 1:-1] * dk
    worst = 0.0
    for key, value in num.items():
        denom = total_sigma if key != "dk" else total_sigma[1:-1, 1:-1]
        if np.ndim(value) == 0:
            continue
        worst = max(worst, float(np.max(np.abs(value) / np.abs(denom))))
    return worst
