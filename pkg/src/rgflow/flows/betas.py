"""Closed-form beta functions of the three models.

The printed flows are for k d/dk; the functions here return d/dk, i.e. the
same expressions divided by k, because that is what the integrator consumes.
The reference scale mu^2 is a run constant and its derivative is zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import SingularLocus
from .couplings import DiracCouplings, MSRCouplings, ScalarCouplings

PI2 = np.pi ** 2
EPS_SING = 1e-8


def _guard(k: float, arg: float, mu_sq: float, eps_sing: float, which: str) -> None:
    if not arg > eps_sing * mu_sq:
        raise SingularLocus(f"log argument k^2+{which} = {arg:.6g} at k = {k:.12g} is below the singular threshold",
                            k=k, which=which, value=arg)


def _check_k(k: float) -> None:
    if not k > 0:
        raise ValueError(f"scale k must be positive, got {k}")


def two_scalar_rates(k, U0, m1_sq, m2_sq, lambda1, lambda2, lambda3, mu_sq, eps_sing=EPS_SING) -> np.ndarray:
    _check_k(k)
    k2 = k * k
    a1, a2 = k2 + m1_sq, k2 + m2_sq
    _guard(k, a1, mu_sq, eps_sing, "m1_sq")
    _guard(k, a2, mu_sq, eps_sing, "m2_sq")
    L1, L2 = np.log(a1 / mu_sq), np.log(a2 / mu_sq)
    pre = k / (8 * PI2)  # k^2/(8 pi^2) divided by k
    return np.array([
        pre * (a1 * L1 + a2 * L2),
        pre * (lambda1 / 6 * (L1 + 1) + lambda3 / 2 * (L2 + 1)),
        pre * (lambda2 / 6 * (L2 + 1) + lambda3 / 2 * (L1 + 1)),
        3 * pre * (lambda1 ** 2 / 36 / a1 + lambda3 ** 2 / 4 / a2),
        3 * pre * (lambda2 ** 2 / 36 / a2 + lambda3 ** 2 / 4 / a1),
        pre * (lambda3 * lambda1 / (12 * a1) + lambda3 * lambda2 / (12 * a2)),
        0.0,
    ])


def msr_rates(k, U0, m_sq, lam, D, mu_sq, dimension="d4", eps_sing=EPS_SING) -> np.ndarray:
    _check_k(k)
    k2 = k * k
    a = k2 + m_sq
    if dimension == "d3":
        return np.array([k / (4 * np.pi) * a, k * lam / (8 * np.pi), 0.0, 0.0, 0.0])
    _guard(k, a, mu_sq, eps_sing, "m_sq")
    L = np.log(a / mu_sq)
    pre = k / (8 * PI2)
    return np.array([
        pre * a * L,
        pre * lam / 2 * (L + 1),
        k / (4 * PI2) * lam ** 2 / 4 / a,
        0.0,
        0.0,
    ])


def dirac_rates(k, U0, m, lam) -> np.ndarray:
    _check_k(k)
    return np.array([k * k + m, k * k * lam / 2, 0.0])


def beta_two_scalar(state: ScalarCouplings, k: float, eps_sing: float = EPS_SING) -> ScalarCouplings:
    return state.with_values(two_scalar_rates(k, *state.to_array(), eps_sing=eps_sing))


def beta_msr(state: MSRCouplings, k: float, eps_sing: float = EPS_SING) -> MSRCouplings:
    return state.with_values(msr_rates(k, *state.to_array(), dimension=state.dimension, eps_sing=eps_sing))


def beta_dirac(state: DiracCouplings, k: float) -> DiracCouplings:
    return state.with_values(dirac_rates(k, *state.to_array()))


@dataclass(frozen=True)
class FlowModel:
    """Vector field of one model plus its distance to the singular locus.

    ``margin(k, y)`` is positive away from the locus and crosses zero on it;
    ``None`` means the model has no singular locus.
    """

    name: str
    names: tuple[str, ...]
    rhs: Callable[[float, np.ndarray], np.ndarray]
    margin: Callable[[float, np.ndarray], float] | None = None


def two_scalar_model(eps_sing: float = EPS_SING) -> FlowModel:
    def margin(k, y):
        return min(k * k + y[1], k * k + y[2]) - eps_sing * y[6]
    return FlowModel("two_scalar", ScalarCouplings.names(),
                     lambda k, y: two_scalar_rates(k, *y, eps_sing=eps_sing), margin)


def msr_model(dimension: str = "d4", eps_sing: float = EPS_SING) -> FlowModel:
    names = MSRCouplings.names()
    if dimension == "d3":
        return FlowModel("msr_d3", names, lambda k, y: msr_rates(k, *y, dimension="d3"))

    def margin(k, y):
        return k * k + y[1] - eps_sing * y[4]
    return FlowModel("msr_d4", names, lambda k, y: msr_rates(k, *y, eps_sing=eps_sing), margin)


def dirac_model() -> FlowModel:
    return FlowModel("dirac", DiracCouplings.names(), lambda k, y: dirac_rates(k, *y))


def model_for(state, eps_sing: float = EPS_SING) -> FlowModel:
    if isinstance(state, ScalarCouplings):
        return two_scalar_model(eps_sing)
    if isinstance(state, MSRCouplings):
        return msr_model(state.dimension, eps_sing)
    if isinstance(state, DiracCouplings):
        return dirac_model()
    raise TypeError(f"no flow for {type(state).__name__}")
