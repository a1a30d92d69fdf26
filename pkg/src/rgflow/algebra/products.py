"""Pointwise, deformed and (anti-)time-ordered products by explicit Wick enumeration.

Identical factors are grouped so a contraction pattern is enumerated once as a
set of edge counts between groups. The number of labelled partial matchings it
stands for is

    prod_g s_g! / (s_g - d_g)!  /  prod_e n_e!

with ``s_g`` the size of group ``g``, ``d_g`` how many of its factors are used
and ``n_e`` the count on edge type ``e``. Odd factors are never grouped, so for
spinors every matching is visited and signed individually.
"""

from __future__ import annotations

from typing import Callable, Mapping, Sequence

from ..errors import ChannelViolation, EmptyOperandList, IncompleteAssignment, ModelMismatch
from .functional import ONE, Functional, Term, as_coeff, merge_couplings
from .models import (Kind, Model, allowed_channels, channel_between, check_species, is_odd, kind_is_directed,
                     model_of, partner_species)

KindPolicy = Callable[[int, int, tuple], Kind]


def make_monomial(model, species: Sequence[str], label: str, coeff=1,
                  couplings: Mapping[str, int] | None = None) -> Functional:
    """Single-vertex functional  coeff * prod(species) smeared with ``label``.

    Each factor gets its own slot for odd models so repeated spinor species at
    one vertex stay distinguishable (spinor indices are left implicit).
    """
    model = model_of(model)
    for s in species:
        check_species(model, s)
    odd = is_odd(model)
    factors = [(0, i if odd else 0, s) for i, s in enumerate(species)]
    cp = tuple(sorted((couplings or {}).items()))
    return Functional.from_raw(model, [(as_coeff(coeff), 0, cp, (label,), factors, ())])


def make_generator(model, species: str, label: str, power: int = 1) -> Functional:
    model = model_of(model)
    check_species(model, species)
    if not isinstance(power, int) or power < 1:
        raise ValueError(f"power must be a positive integer, got {power!r}")
    return make_monomial(model, [species] * power, label)


def unit(model, label: str) -> Functional:
    """The bare smeared constant 1[label]."""
    return Functional.from_raw(model_of(model), [(ONE, 0, (), (label,), (), ())])


def _same_model(operands: Sequence[Functional]) -> Model:
    if not operands:
        raise EmptyOperandList("at least one operand is required")
    model = operands[0].model
    for op in operands[1:]:
        if op.model is not model:
            raise ModelMismatch(f"cannot combine {model.value} with {op.model.value}")
    return model


def _groups(model: Model, term: Term, offset: int, fpos: int):
    """Factor groups of one operand term as (vertex, species, positions, slot)."""
    if is_odd(model):
        return [(v + offset, s, [fpos + i], slot) for i, (v, slot, s) in enumerate(term.factors)]
    out: dict[tuple, list[int]] = {}
    for i, (v, _, s) in enumerate(term.factors):
        out.setdefault((v + offset, s), []).append(fpos + i)
    return [(v, s, pos, 0) for (v, s), pos in out.items()]


def _shift(kernel: tuple, offset: int) -> tuple:
    kind, ch, (va, sa), (vb, sb), directed, power = kernel
    return (kind, ch, (va + offset, sa), (vb + offset, sb), directed, power)


def _parity_of_pairing(n: int, pairs: list[tuple[int, int]], left_over: list[int]) -> int:
    order = [p for pair in pairs for p in pair] + left_over
    inv = 0
    for i in range(n):
        oi = order[i]
        for j in range(i + 1, n):
            if order[j] < oi:
                inv += 1
    return -1 if inv & 1 else 1


def contract_terms(model: Model, terms: Sequence[Term], policy: KindPolicy, oriented: bool = False,
                   require_full: bool = False):
    """Yield raw terms of the Wick expansion of ``terms`` under ``policy``.

    ``policy(i, j, channel_name)`` gives the kernel kind for a contraction
    between operand ``i`` (left) and operand ``j`` (right), ``i < j``.
    """
    odd = is_odd(model)
    vertices: list[str] = []
    factors: list[tuple[int, int, str]] = []
    base_kernels: list[tuple] = []
    groups = []  # (operand, vertex, species, positions, slot)
    coeff = ONE
    hbar_inv = 0
    couplings = ()
    for idx, t in enumerate(terms):
        offset = len(vertices)
        for g in _groups(model, t, offset, len(factors)):
            groups.append((idx,) + g)
        vertices.extend(t.vertices)
        factors.extend((v + offset, slot, s) for v, slot, s in t.factors)
        base_kernels.extend(_shift(kern, offset) for kern in t.kernels)
        coeff = coeff * t.coeff
        hbar_inv += t.hbar_inv
        couplings = merge_couplings(couplings, t.couplings)
    nf = len(factors)

    edges = []  # (group_a, group_b, kind, channel, sign, directed)
    for a, ga in enumerate(groups):
        for b in range(a + 1, len(groups)):
            gb = groups[b]
            if ga[0] == gb[0]:
                continue
            ch = channel_between(model, ga[2], gb[2])
            if ch is None:
                continue
            kind = policy(ga[0], gb[0], ch.name)
            edges.append((a, b, kind, (ga[2], gb[2]), ch.sign, kind_is_directed(model, kind, oriented)))

    sizes = [len(g[3]) for g in groups]
    used = [0] * len(groups)
    counts = [0] * len(edges)

    # for each group, the last edge index touching it; used to prune require_full
    last_edge = [-1] * len(groups)
    for e, (a, b, *_r) in enumerate(edges):
        last_edge[a] = e
        last_edge[b] = e

    def emit():
        mult = 1
        for g, d in enumerate(used):
            for r in range(sizes[g] - d + 1, sizes[g] + 1):
                mult *= r
        denom = 1
        sign = 1
        kernels = list(base_kernels)
        taken = [list(g[3]) for g in groups]
        pairs = []
        for e, n in enumerate(counts):
            if not n:
                continue
            a, b, kind, channel, csign, directed = edges[e]
            for r in range(2, n + 1):
                denom *= r
            if csign < 0 and n & 1:
                sign = -sign
            kernels.append((kind.value, channel, (groups[a][1], groups[a][4]), (groups[b][1], groups[b][4]),
                            directed, n))
            if odd:
                pairs.append((taken[a].pop(0), taken[b].pop(0)))
            else:
                del taken[a][:n]
                del taken[b][:n]
        rest = sorted(p for t in taken for p in t)
        if odd:
            sign *= _parity_of_pairing(nf, pairs, rest)
        c = coeff * as_coeff(mult // denom)
        if sign < 0:
            c = -c
        return (c, hbar_inv, couplings, tuple(vertices), [factors[p] for p in rest], kernels)

    out = []

    def dfs(e: int):
        if e == len(edges):
            if require_full and any(u != s for u, s in zip(used, sizes)):
                return
            out.append(emit())
            return
        a, b = edges[e][0], edges[e][1]
        room = min(sizes[a] - used[a], sizes[b] - used[b])
        for n in range(room + 1):
            counts[e] = n
            used[a] += n
            used[b] += n
            ok = True
            if require_full:
                for g in (a, b):
                    if last_edge[g] == e and used[g] != sizes[g]:
                        ok = False
            if ok:
                dfs(e + 1)
            used[a] -= n
            used[b] -= n
        counts[e] = 0

    if require_full:
        # groups that no edge touches can never be used up
        if any(last_edge[g] < 0 and sizes[g] for g in range(len(groups))):
            return []
    dfs(0)
    return out


def _check_channels(F: Functional) -> Functional:
    allowed = set(allowed_channels(F.model))
    for t in F:
        for kern in t.kernels:
            ch = kern[1]
            if ch not in allowed and ch[::-1] not in allowed:
                raise ChannelViolation(f"kernel on forbidden channel {ch}")
            if is_odd(F.model) and ch not in allowed:
                raise ChannelViolation(f"kernel on forbidden channel {ch}")
    return F


def _species_count(t: Term) -> tuple:
    acc: dict[str, int] = {}
    for _, _, sp in t.factors:
        acc[sp] = acc.get(sp, 0) + 1
    return tuple(sorted(acc.items()))


def nary_product(operands: Sequence[Functional], policy: KindPolicy, oriented: bool = False,
                 max_order: int | None = None, caps: Mapping[str, int] | None = None,
                 require_full: bool = False) -> Functional:
    """Wick product of all operands, skipping operand-term combinations above ``max_order``.

    ``require_full`` keeps only patterns that contract every factor.
    """
    model = _same_model(operands)
    lists = [sorted(op.terms, key=lambda t: t.coupling_degree) for op in operands]
    raw = []

    if require_full and len(operands) == 2:
        # a full binary contraction needs partner-species counts to match exactly
        index: dict[tuple, list[Term]] = {}
        for t in lists[1]:
            index.setdefault(_species_count(t), []).append(t)
        for s in lists[0]:
            want = tuple(sorted((partner_species(model, sp), n) for sp, n in _species_count(s)))
            for t in index.get(want, ()):
                if max_order is not None and s.coupling_degree + t.coupling_degree > max_order:
                    continue
                if caps and _over_caps(merge_couplings(s.couplings, t.couplings), caps):
                    continue
                raw.extend(contract_terms(model, [s, t], policy, oriented, True))
        return _check_channels(Functional.from_raw(model, raw))

    def rec(i: int, chosen: list[Term], degree: int, couplings: tuple):
        if i == len(lists):
            raw.extend(contract_terms(model, chosen, policy, oriented, require_full))
            return
        for t in lists[i]:
            d = degree + t.coupling_degree
            if max_order is not None and d > max_order:
                break
            cp = merge_couplings(couplings, t.couplings)
            if caps and _over_caps(cp, caps):
                continue
            chosen.append(t)
            rec(i + 1, chosen, d, cp)
            chosen.pop()

    rec(0, [], 0, ())
    return _check_channels(Functional.from_raw(model, raw))


def _over_caps(couplings: tuple, caps: Mapping[str, int]) -> bool:
    return any(p > caps[n] for n, p in couplings if n in caps)


def pointwise_product(F: Functional, G: Functional) -> Functional:
    """Juxtapose factors without contracting; odd factors pick up their reordering sign."""
    model = _same_model([F, G])
    raw = []
    for s in F:
        for t in G:
            off = len(s.vertices)
            raw.append((s.coeff * t.coeff, s.hbar_inv + t.hbar_inv, merge_couplings(s.couplings, t.couplings),
                        s.vertices + t.vertices,
                        list(s.factors) + [(v + off, slot, sp) for v, slot, sp in t.factors],
                        list(s.kernels) + [_shift(kern, off) for kern in t.kernels]))
    return Functional.from_raw(model, raw)


def _normalize_assignment(model: Model, assignment) -> dict[tuple, Kind]:
    if isinstance(assignment, (Kind, str)):
        kind = Kind(assignment)
        return {ch: kind for ch in allowed_channels(model)}
    out = {}
    for ch, kind in dict(assignment).items():
        out[tuple(ch)] = Kind(kind)
    missing = [ch for ch in allowed_channels(model) if ch not in out]
    if missing:
        raise IncompleteAssignment(f"no kernel kind assigned for channel(s) {missing}")
    return out


def star_product(F: Functional, G: Functional, assignment=Kind.TWO_POINT, oriented: bool = False,
                 max_order: int | None = None, require_full: bool = False) -> Functional:
    """Deformed product; ``assignment`` maps each allowed channel to a kernel kind (or one kind for all)."""
    model = _same_model([F, G])
    table = _normalize_assignment(model, assignment)
    return nary_product([F, G], lambda i, j, ch: table[ch], oriented, max_order, require_full=require_full)


def time_ordered_product(operands: Sequence[Functional], max_order: int | None = None,
                         caps: Mapping[str, int] | None = None) -> Functional:
    _same_model(operands)
    return nary_product(list(operands), lambda i, j, ch: Kind.FEYNMAN, False, max_order, caps)


def anti_time_ordered_product(operands: Sequence[Functional], max_order: int | None = None,
                              caps: Mapping[str, int] | None = None) -> Functional:
    _same_model(operands)
    return nary_product(list(operands), lambda i, j, ch: Kind.ANTI_FEYNMAN, False, max_order, caps)


def vacuum_expectation(F: Functional) -> Functional:
    """Evaluation at vanishing fields: keep only fully contracted terms."""
    return F.filter(lambda t: not t.factors)


__all__ = [
    "make_monomial", "make_generator", "unit", "pointwise_product", "star_product",
    "time_ordered_product", "anti_time_ordered_product", "vacuum_expectation", "nary_product",
    "contract_terms",
]
