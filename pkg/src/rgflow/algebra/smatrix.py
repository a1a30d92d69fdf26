"""Truncated S-matrix, its inverse and the Bogoliubov map, with the models' interaction potentials."""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping

from sympy.polys.domains import QQ, QQ_I

from ..errors import ModelMismatch, NonPerturbativeVertex
from .functional import ONE, Functional
from .models import Kind, Model, model_of
from .products import anti_time_ordered_product, make_monomial, nary_product, star_product, time_ordered_product


def interaction(model, label: str = "h") -> Functional:
    """Quartic or cubic interaction vertex of each model, smeared with ``label``."""
    model = model_of(model)
    if model is Model.TWO_SCALAR:
        return (make_monomial(model, ["phi1"] * 4, label, Fraction(1, 24), {"lambda1": 1})
                + make_monomial(model, ["phi2"] * 4, label, Fraction(1, 24), {"lambda2": 1})
                + make_monomial(model, ["phi1", "phi1", "phi2", "phi2"], label, Fraction(1, 4), {"lambda3": 1}))
    if model is Model.MSR:
        return (make_monomial(model, ["phi", "phi", "phiTilde"], label, Fraction(1, 2), {"lambda": 1})
                + make_monomial(model, ["phiTilde", "phiTilde"], label, -1, {"D": 1}))
    return make_monomial(model, ["psiBar", "psi", "psiBar", "psi"], label, Fraction(1, 2), {"lambda": 1})


def _check_vertex(V: Functional) -> None:
    for t in V:
        if t.coupling_degree == 0:
            raise NonPerturbativeVertex("every term of the interaction must carry a coupling")


def _prefactor(n: int, sign: int):
    # (sign * i)^n / n!
    unit = QQ_I(0, sign) ** n if n else ONE
    return unit * QQ_I(QQ(1, factorial(n)), 0)


def _series(V: Functional, order: int, inverse: bool, caps, tail: Functional | None = None) -> list[Functional]:
    """Per-n pieces  (+-i/hbar)^n / n!  T(V, ..., V[, tail])  up to joint order."""
    _check_vertex(V)
    if order < 0:
        raise ValueError("order must be non-negative")
    product = anti_time_ordered_product if inverse else time_ordered_product
    sign = -1 if inverse else 1
    pieces = []
    for n in range(order + 1):
        operands = [V] * n + ([tail] if tail is not None else [])
        if not operands:
            body = Functional.one(V.model)
        else:
            body = product(operands, max_order=order, caps=caps)
        pieces.append(body.scale(_prefactor(n, sign), hbar_inv=n))
    return pieces


def s_matrix_truncated(V: Functional, order: int, inverse: bool = False,
                       caps: Mapping[str, int] | None = None) -> Functional:
    total = Functional.zero(V.model)
    for piece in _series(V, order, inverse, caps):
        total = total + piece
    return total.truncate(order, caps)


def bogoliubov_truncated(V: Functional, F: Functional, order: int, caps: Mapping[str, int] | None = None,
                         oriented: bool = False, vacuum_only: bool = False) -> Functional:
    """S^-1(V) *_H [S(V) ._T F] with joint coupling truncation.

    With ``vacuum_only`` only fully contracted terms are produced. Each order
    piece is then enumerated in one pass over all operands, with anti-Feynman
    kernels inside the inverse S-matrix block, Feynman kernels inside the
    time-ordered block and two-point kernels across, which is the same Wick
    expansion without materialising the partially contracted intermediates.
    """
    if V.model is not F.model:
        raise ModelMismatch(f"cannot combine {V.model.value} with {F.model.value}")
    if vacuum_only:
        return _vacuum_bogoliubov(V, F, order, caps, oriented)
    inner = Functional.zero(V.model)
    for piece in _series(V, order, False, caps, tail=F):
        inner = inner + piece
    outer = s_matrix_truncated(V, order, inverse=True, caps=caps)
    out = star_product(outer, inner, Kind.TWO_POINT, oriented=oriented, max_order=order)
    return out.truncate(order, caps)


def _vacuum_bogoliubov(V: Functional, F: Functional, order: int, caps, oriented: bool) -> Functional:
    _check_vertex(V)
    total = Functional.zero(V.model)
    for a in range(order + 1):
        for b in range(order + 1 - a):
            def policy(i, j, ch, a=a):
                if j < a:
                    return Kind.ANTI_FEYNMAN
                if i >= a:
                    return Kind.FEYNMAN
                return Kind.TWO_POINT
            body = nary_product([V] * a + [V] * b + [F], policy, oriented, max_order=order, caps=caps,
                                require_full=True)
            total = total + body.scale(_prefactor(a, -1) * _prefactor(b, 1), hbar_inv=a + b)
    return total.truncate(order, caps)


def second_order_template(V: Functional, F: Functional, oriented: bool = False) -> Functional:
    """Explicit second-order expansion of the Bogoliubov map, term by term.

    F + (i/hbar)(V ._T F - V *_H F)
      - 1/(2 hbar^2) [T(V,V,F) + Tbar(V,V) *_H F]  +  1/hbar^2  V *_H (V ._T F)

    Used as an independent cross-check of ``bogoliubov_truncated``.
    """
    i = QQ_I(0, 1)
    half = QQ_I(QQ(1, 2), 0)
    H = Kind.TWO_POINT
    VF_T = time_ordered_product([V, F])
    VVF_T = time_ordered_product([V, V, F])
    VV_AT = anti_time_ordered_product([V, V])
    first = (VF_T - star_product(V, F, H, oriented)).scale(i, hbar_inv=1)
    # (-i/h V) *_H (i/h T(V,F)) = 1/h^2 V *_H T(V,F)
    cross = star_product(V, VF_T, H, oriented).scale(ONE, hbar_inv=2)
    second = (VVF_T.scale(-half, hbar_inv=2)
              + star_product(VV_AT, F, H, oriented).scale(-half, hbar_inv=2)
              + cross)
    return (F + first + second).truncate(2)


__all__ = ["interaction", "s_matrix_truncated", "bogoliubov_truncated", "second_order_template"]
