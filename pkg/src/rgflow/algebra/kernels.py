"""Rewrite propagators through the symmetric Hadamard part and the retarded propagator.

With H the symmetric part and R(x, y) the retarded propagator (R(y, x) is then
the advanced one),

    two-point(x -> y) = H + i/2 R(x, y) - i/2 R(y, x)
    Feynman           = H + i/2 (R(x, y) + R(y, x))
    anti-Feynman      = H - i/2 (R(x, y) + R(y, x))

and products R(x, y) R(y, x) vanish by support. After this rewrite, identities
such as S *_H S^-1 = 1 become exact cancellations between canonical terms.
Only meaningful for the even models, and only for two-point kernels that kept
their orientation (``oriented=True`` in the products).
"""

from __future__ import annotations

import itertools
from math import factorial

from sympy.polys.domains import QQ, QQ_I

from ..errors import AlgebraError
from .functional import ONE, Functional
from .models import Kind, is_odd

_HALF_I = QQ_I(0, QQ(1, 2))


def _expansion(kind: str, directed: bool):
    """(coefficient of R(x,y), coefficient of R(y,x)) for one kernel kind."""
    if kind == Kind.TWO_POINT.value:
        if not directed:
            raise AlgebraError("an unoriented two-point kernel cannot be split into causal parts")
        return _HALF_I, -_HALF_I
    if kind == Kind.FEYNMAN.value:
        return _HALF_I, _HALF_I
    if kind == Kind.ANTI_FEYNMAN.value:
        return -_HALF_I, -_HALF_I
    return None


def reduce_kernels(F: Functional) -> Functional:
    if is_odd(F.model):
        raise AlgebraError("kernel reduction is only defined for the even models")
    ret = Kind.RETARDED.value
    had = Kind.HADAMARD.value
    raw = []
    for t in F:
        # each kernel becomes a list of (coeff, [kernels]) alternatives
        options = []
        for kind, ch, a, b, directed, power in t.kernels:
            if kind == Kind.ADVANCED.value:
                options.append([(ONE, [(ret, ch[::-1], b, a, True, power)])])
                continue
            if kind in (ret, had):
                options.append([(ONE, [(kind, ch, a, b, directed, power)])])
                continue
            fwd, bwd = _expansion(kind, directed)
            alts = []
            for j_h in range(power + 1):
                for j_f in range(power - j_h + 1):
                    j_b = power - j_h - j_f
                    mult = factorial(power) // (factorial(j_h) * factorial(j_f) * factorial(j_b))
                    if j_f and j_b:
                        continue  # R(x,y) R(y,x) = 0
                    c = QQ_I(mult, 0)
                    if j_f:
                        c = c * fwd ** j_f
                    if j_b:
                        c = c * bwd ** j_b
                    kerns = [(had, ch, a, b, False, j_h), (ret, ch, a, b, True, j_f),
                             (ret, ch[::-1], b, a, True, j_b)]
                    alts.append((c, [k for k in kerns if k[5]]))
            options.append(alts)
        for combo in itertools.product(*options):
            coeff = t.coeff
            kernels = []
            for c, ks in combo:
                coeff = coeff * c
                kernels.extend(ks)
            if _opposite_causal(kernels):
                continue
            raw.append((coeff, t.hbar_inv, t.couplings, t.vertices, t.factors, kernels))
    return Functional.from_raw(F.model, raw)


def _opposite_causal(kernels) -> bool:
    forward = {(k[2][0], k[3][0]) for k in kernels if k[0] == Kind.RETARDED.value}
    return any((b, a) in forward for a, b in forward)
