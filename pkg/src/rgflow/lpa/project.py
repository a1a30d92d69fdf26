"""Beta functions read off the nodal flow by finite differences in field values.

The flow density is evaluated on the analytic ansatz mass (no grid), then
Taylor coefficients at zero fields are extracted from a symmetric tensor
stencil and mapped onto the couplings with the ansatz normalisations.
"""

from __future__ import annotations

import numpy as np

from ..errors import LogDomain
from ..flows.betas import EPS_SING
from ..flows.couplings import MSRCouplings, ScalarCouplings

STENCIL = 6          # nodes per side, so 13 per axis
RADIUS_FRACTION = 0.2


def _density(arg, k, mu_sq, dim4, eps_sing):
    if not dim4:
        return k / (4 * np.pi) * arg
    if np.any(~(arg > eps_sing * mu_sq)):
        bad = np.flatnonzero(~(arg > eps_sing * mu_sq).ravel())[0]
        raise LogDomain(f"k^2 + M^2 = {arg.ravel()[bad]:.6g} on the projection stencil at k = {k:.12g}",
                        k=k, value=float(arg.ravel()[bad]))
    return k / (8 * np.pi ** 2) * arg * np.log(arg / mu_sq)


def scalar_masses(c: ScalarCouplings, x, y, mass: str = "ansatz"):
    """Field-dependent masses of the two directions.

    ``ansatz`` is the mass whose projection reproduces the closed beta system;
    ``hessian`` is the literal diagonal Hessian of the quartic ansatz.
    """
    if mass == "ansatz":
        return (c.m1_sq + c.lambda1 / 12 * x ** 2 + c.lambda3 / 4 * y ** 2,
                c.m2_sq + c.lambda2 / 12 * y ** 2 + c.lambda3 / 4 * x ** 2)
    if mass == "hessian":
        return (c.m1_sq + c.lambda1 / 2 * x ** 2 + c.lambda3 / 2 * y ** 2,
                c.m2_sq + c.lambda2 / 2 * y ** 2 + c.lambda3 / 2 * x ** 2)
    raise ValueError(f"unknown mass prescription {mass!r}")


def _taylor_2d(f, width_x: float, width_y: float, degree: int):
    """Coefficients c[a, b] of x^a y^b from samples on a (2s+1)^2 tensor stencil."""
    # a field nothing depends on is unconstrained; any width is exact there
    width_x = 1.0 if np.isinf(width_x) else width_x
    width_y = 1.0 if np.isinf(width_y) else width_y
    t = np.arange(-STENCIL, STENCIL + 1) / STENCIL
    V = np.vander(t, 2 * STENCIL + 1, increasing=True)
    x, y = np.meshgrid(t * width_x, t * width_y, indexing="ij")
    F = f(x, y)
    C = np.linalg.solve(V, np.linalg.solve(V, F).T).T
    a = np.arange(degree + 1)
    return C[: degree + 1, : degree + 1] / np.outer(width_x ** a, width_y ** a)


def _width(arg0: float, slope: float, power: int) -> float:
    """Stencil half-width: a fixed fraction of the Taylor radius of the density in this field.

    Not capped: for weak couplings the wanted coefficients are tiny and only a
    wide stencil lifts them above the rounding noise of the O(1) density.
    """
    if slope == 0:
        return np.inf
    return RADIUS_FRACTION * (arg0 / abs(slope)) ** (1.0 / power)


def project_betas_fd(couplings, k: float, mass: str = "ansatz", eps_sing: float = EPS_SING):
    """d/dk of each coupling, comparable to the closed forms in ``flows.betas``."""
    k2 = k * k
    if isinstance(couplings, ScalarCouplings):
        c, mu = couplings, couplings.mu_sq
        a1, a2 = k2 + c.m1_sq, k2 + c.m2_sq
        for a in (a1, a2):
            if not a > eps_sing * mu:
                raise LogDomain(f"k^2 + m^2 = {a:.6g} at k = {k:.12g}", k=k, value=a)
        s = 1.0 if mass == "ansatz" else 6.0
        wx = min(_width(a1, s * c.lambda1 / 12, 2), _width(a2, s * c.lambda3 / 4, 2))
        wy = min(_width(a2, s * c.lambda2 / 12, 2), _width(a1, s * c.lambda3 / 4, 2))

        def rhs(x, y):
            m1, m2 = scalar_masses(c, x, y, mass)
            return _density(k2 + m1, k, mu, True, eps_sing) + _density(k2 + m2, k, mu, True, eps_sing)

        T = _taylor_2d(rhs, wx, wy, 4)
        return c.with_values([T[0, 0], 2 * T[2, 0], 2 * T[0, 2], 24 * T[4, 0], 24 * T[0, 4], 4 * T[2, 2], 0.0])

    if isinstance(couplings, MSRCouplings):
        c, mu = couplings, couplings.mu_sq
        dim4 = c.dimension == "d4"
        a0 = k2 + c.m_sq
        if dim4 and not a0 > eps_sing * mu:
            raise LogDomain(f"k^2 + m^2 = {a0:.6g} at k = {k:.12g}", k=k, value=a0)
        wx = _width(abs(a0), c.lam / 2, 1)

        def rhs(x, y):
            # response projection: B(M0) + phiTilde * (B(M(phi)) - B(M0))
            b0 = _density(np.full_like(x, a0), k, mu, dim4, eps_sing)
            return b0 + y * (_density(k2 + c.m_sq + c.lam / 2 * x, k, mu, dim4, eps_sing) - b0)

        T = _taylor_2d(rhs, wx, 1.0, 2)
        return c.with_values([T[0, 0], T[1, 1], 4 * T[2, 1], -T[0, 2], 0.0])

    raise TypeError(f"no grid projection for {type(couplings).__name__}")
