"""Polynomial functionals as canonical sums of multilocal terms.

A term is stored as a hashable key plus an exact Gaussian-rational coefficient.
The key holds

* ``hbar_inv``  - power of 1/hbar coming from S-matrix prefactors,
* ``couplings`` - sorted ``(name, power)`` pairs,
* ``vertices``  - smearing label of each abstract vertex, indexed by vertex id,
* ``factors``   - sorted ``(vertex, slot, species)`` field factors,
* ``kernels``   - sorted ``(kind, channel, end_a, end_b, directed, power)`` propagators.

Kernel ends are ``(vertex, slot)`` pairs and ``channel`` is the species pair
read from ``end_a`` to ``end_b``. Slots are always 0 for the even models; for
spinors they stand in for the suppressed spinor index, so contracting
different spinor factors of one vertex gives different terms.
Every contraction contributes one hbar, so the hbar power of a term is the
total kernel power; the net power is that minus ``hbar_inv``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import factorial
from typing import Iterable, Iterator, Mapping

from sympy import Rational
from sympy.polys.domains import QQ, QQ_I

from ..errors import ModelMismatch
from .models import Model, is_odd, model_of

Coeff = type(QQ_I.one)

ZERO = QQ_I.zero
ONE = QQ_I.one
I_UNIT = QQ_I(0, 1)

# beyond this many candidate relabelings we stop enumerating and keep the best found
_MAX_CANDIDATES = 40320


def as_coeff(value) -> Coeff:
    """Coerce ints, Fractions, 'p/q' strings and (re, im) pairs to a Gaussian rational."""
    if isinstance(value, Coeff):
        return value
    if isinstance(value, tuple):
        re, im = value
        return QQ_I(_as_rational(re), _as_rational(im))
    return QQ_I(_as_rational(value), 0)


def _as_rational(value):
    if isinstance(value, str):
        return QQ.from_sympy(Rational(value))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return QQ(int(value.numerator), int(value.denominator))
    if isinstance(value, float):
        raise TypeError("coefficients must be exact; got a float")
    return QQ(int(value))


@dataclass(frozen=True)
class Term:
    coeff: Coeff
    hbar_inv: int
    couplings: tuple[tuple[str, int], ...]
    vertices: tuple[str, ...]
    factors: tuple[tuple[int, int, str], ...]
    kernels: tuple[tuple, ...]

    @property
    def key(self) -> tuple:
        return (self.hbar_inv, self.couplings, self.vertices, self.factors, self.kernels)

    @property
    def hbar_power(self) -> int:
        return sum(kern[5] for kern in self.kernels)

    @property
    def hbar(self) -> int:
        return self.hbar_power - self.hbar_inv

    @property
    def coupling_degree(self) -> int:
        return sum(p for _, p in self.couplings)

    def coupling_dict(self) -> dict[str, int]:
        return dict(self.couplings)


def merge_couplings(*parts: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    acc: dict[str, int] = {}
    for part in parts:
        for name, power in part:
            acc[name] = acc.get(name, 0) + power
    return tuple(sorted((n, p) for n, p in acc.items() if p))


def _permutation_parity(seq: list) -> int:
    """+1 or -1 for the number of inversions needed to sort ``seq``."""
    inv = 0
    n = len(seq)
    for i in range(n):
        si = seq[i]
        for j in range(i + 1, n):
            if seq[j] < si:
                inv += 1
    return -1 if inv & 1 else 1


def _orient_kernel(kind, channel, a, b, directed, power):
    if directed or (channel, a, b) <= (channel[::-1], b, a):
        return (kind, channel, a, b, directed, power)
    return (kind, channel[::-1], b, a, directed, power)


def _merge_kernels(kernels) -> tuple:
    acc: dict[tuple, int] = {}
    for kind, channel, a, b, directed, power in kernels:
        k = (kind, channel, a, b, directed)
        acc[k] = acc.get(k, 0) + power
    return tuple(sorted(k + (p,) for k, p in acc.items() if p))


def _vertex_ranks(vertices, factors, kernels) -> list[int]:
    """Colour refinement: ranks that depend only on the term's structure."""
    n = len(vertices)
    content: list[list] = [[] for _ in range(n)]
    for v, slot, species in factors:
        content[v].append((slot, species))
    incid: list[list] = [[] for _ in range(n)]
    for kind, channel, a, b, directed, power in kernels:
        (va, sa), (vb, sb) = a, b
        if directed:
            incid[va].append(((kind, channel, "out", sa, sb, power), vb))
            incid[vb].append(((kind, channel, "in", sb, sa, power), va))
        else:
            incid[va].append(((kind, channel, "u", sa, sb, power), vb))
            incid[vb].append(((kind, channel[::-1], "u", sb, sa, power), va))

    def rank(sigs):
        order = {s: i for i, s in enumerate(sorted(set(sigs)))}
        return [order[s] for s in sigs]

    sigs = [(vertices[v], tuple(sorted(content[v])), tuple(sorted(i for i, _ in incid[v])))
            for v in range(n)]
    colours = rank(sigs)
    while True:
        sigs = [(colours[v], tuple(sorted((i, colours[w]) for i, w in incid[v]))) for v in range(n)]
        refined = rank(sigs)
        if len(set(refined)) == len(set(colours)):
            return refined
        colours = refined


def canonical_form(model: Model, coeff, vertices, factors, kernels):
    """Relabel vertices canonically and sort factors and kernels.

    Returns ``(coeff, vertices, factors, kernels)``; the coefficient picks up
    the reordering sign for odd fields and becomes zero when an odd
    automorphism forces the term to equal its own negative.
    """
    n = len(vertices)
    odd = is_odd(model)
    ranks = _vertex_ranks(vertices, factors, kernels)
    classes: dict[int, list[int]] = {}
    for v, r in enumerate(ranks):
        classes.setdefault(r, []).append(v)
    ordered = [classes[r] for r in sorted(classes)]

    total = 1
    for cls in ordered:
        total *= factorial(len(cls))

    best_key = None
    best_signs: set[int] = set()
    best = None
    for count, choice in enumerate(itertools.product(*(itertools.permutations(c) for c in ordered))):
        if count >= _MAX_CANDIDATES:
            break
        new_id = [0] * n
        pos = 0
        for block in choice:
            for v in block:
                new_id[v] = pos
                pos += 1
        new_vertices = [None] * n
        for v in range(n):
            new_vertices[new_id[v]] = vertices[v]
        relabeled = [(new_id[v], slot, sp) for v, slot, sp in factors]
        sign = _permutation_parity(relabeled) if odd else 1
        new_factors = tuple(sorted(relabeled))
        new_kernels = _merge_kernels(
            _orient_kernel(kind, ch, (new_id[a[0]], a[1]), (new_id[b[0]], b[1]), d, p) for kind, ch, a, b, d, p in kernels)
        key = (tuple(new_vertices), new_factors, new_kernels)
        if best_key is None or key < best_key:
            best_key, best_signs, best = key, {sign}, (sign, key)
        elif key == best_key:
            best_signs.add(sign)
        if total == 1:
            break
    sign, (new_vertices, new_factors, new_kernels) = best
    if len(best_signs) > 1:
        return ZERO, new_vertices, new_factors, new_kernels
    c = coeff if sign == 1 else -coeff
    return c, new_vertices, new_factors, new_kernels


class Functional:
    """Immutable formal sum of canonical terms for one field model."""

    __slots__ = ("model", "_terms", "_hash", "_list")

    def __init__(self, model, terms: Mapping[tuple, Coeff] | None = None):
        self.model = model_of(model)
        items = {} if terms is None else {k: c for k, c in terms.items() if c != ZERO}
        self._terms = dict(sorted(items.items()))
        self._hash = None
        self._list = None

    # construction

    @classmethod
    def zero(cls, model) -> "Functional":
        return cls(model)

    @classmethod
    def one(cls, model) -> "Functional":
        return cls(model, {(0, (), (), (), ()): ONE})

    @classmethod
    def from_raw(cls, model, raw: Iterable[tuple]) -> "Functional":
        """Build from un-canonicalized ``(coeff, hbar_inv, couplings, vertices, factors, kernels)``."""
        model = model_of(model)
        acc: dict[tuple, Coeff] = {}
        for coeff, hbar_inv, couplings, vertices, factors, kernels in raw:
            if coeff == ZERO:
                continue
            c, v, f, k = canonical_form(model, coeff, tuple(vertices), tuple(factors), tuple(kernels))
            if c == ZERO:
                continue
            key = (hbar_inv, tuple(couplings), v, f, k)
            acc[key] = acc.get(key, ZERO) + c
        return cls(model, acc)

    # views

    def __iter__(self) -> Iterator[Term]:
        if self._list is None:
            self._list = [Term(c, *key) for key, c in self._terms.items()]
        return iter(self._list)

    def items(self):
        return self._terms.items()

    @property
    def terms(self) -> list[Term]:
        return list(self)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient(self, key: tuple) -> Coeff:
        return self._terms.get(key, ZERO)

    # arithmetic

    def _check(self, other: "Functional") -> None:
        if not isinstance(other, Functional):
            raise TypeError(f"expected Functional, got {type(other).__name__}")
        if other.model is not self.model:
            raise ModelMismatch(f"cannot combine {self.model.value} with {other.model.value}")

    def __add__(self, other: "Functional") -> "Functional":
        self._check(other)
        acc = dict(self._terms)
        for k, c in other._terms.items():
            acc[k] = acc.get(k, ZERO) + c
        return Functional(self.model, acc)

    def __neg__(self) -> "Functional":
        return Functional(self.model, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other: "Functional") -> "Functional":
        return self + (-other)

    def scale(self, factor, hbar_inv: int = 0, couplings: Iterable[tuple[str, int]] = ()) -> "Functional":
        """Multiply by ``factor`` / hbar**hbar_inv times a coupling monomial."""
        f = as_coeff(factor)
        couplings = tuple(couplings)
        acc: dict[tuple, Coeff] = {}
        for (hi, cp, v, fa, ke), c in self._terms.items():
            key = (hi + hbar_inv, merge_couplings(cp, couplings), v, fa, ke)
            acc[key] = acc.get(key, ZERO) + c * f
        return Functional(self.model, acc)

    def __mul__(self, other):
        if isinstance(other, Functional):
            from .products import pointwise_product
            return pointwise_product(self, other)
        return self.scale(other)

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        if not isinstance(other, Functional):
            return NotImplemented
        return self.model is other.model and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.model, tuple(self._terms.items())))
        return self._hash

    def filter(self, predicate) -> "Functional":
        return Functional(self.model, {t.key: t.coeff for t in self if predicate(t)})

    def truncate(self, order: int, caps: Mapping[str, int] | None = None) -> "Functional":
        """Keep terms with joint coupling degree <= order and per-symbol powers within ``caps``."""
        def keep(t: Term) -> bool:
            if t.coupling_degree > order:
                return False
            if caps:
                return all(p <= caps.get(n, p) for n, p in t.couplings)
            return True
        return self.filter(keep)

    def __repr__(self) -> str:
        from .serialize import to_text
        return f"Functional({self.model.value}: {to_text(self)})"


def canonicalize(F: Functional) -> Functional:
    """Re-run canonicalization on every term. Idempotent."""
    return Functional.from_raw(F.model, ((t.coeff, t.hbar_inv, t.couplings, t.vertices, t.factors, t.kernels)
                                         for t in F))
