"""Bounded-below certificate for the quartic two-scalar potential."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .couplings import ScalarCouplings


def _exact(x) -> Fraction:
    # floats are read as their shortest decimal form, so 0.4 means 2/5
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class Boundedness:
    ok: bool
    failed: str | None
    margin: Fraction
    margins: dict[str, Fraction]


def check_boundedness(state) -> Boundedness:
    """lambda1 > 0, lambda2 > 0 and lambda1*lambda2 > 9*lambda3^2.

    Accepts a ScalarCouplings or a (lambda1, lambda2, lambda3) triple. On
    violation ``failed`` names the first inequality that does not hold and
    ``margin`` is its (non-positive) value; otherwise ``margin`` is the
    determinant margin lambda1*lambda2 - 9*lambda3^2.
    """
    if isinstance(state, ScalarCouplings):
        l1, l2, l3 = state.lambda1, state.lambda2, state.lambda3
    else:
        l1, l2, l3 = state
    l1, l2, l3 = _exact(l1), _exact(l2), _exact(l3)
    margins = {"lambda1": l1, "lambda2": l2, "determinant": l1 * l2 - 9 * l3 * l3}
    for name, value in margins.items():
        if value <= 0:
            return Boundedness(False, name, value, margins)
    return Boundedness(True, None, margins["determinant"], margins)
