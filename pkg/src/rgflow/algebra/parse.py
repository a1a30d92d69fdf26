"""Tiny expression language for products of monomials, used by the ``expand`` command.

Examples::

    Phi1^2[f] star Phi1^2[f']
    (Phi1 Phi2)[f] * Phi1Phi2[f']
    Psi[f] T PsiBar[f']
    V[h] AT V[h]

Operators: ``star``/``*``/``⋆`` deformed product, ``T`` time-ordered,
``AT`` anti-time-ordered, ``dot``/``.``/``·`` pointwise. Runs of the same
``T`` or ``AT`` operator form a single n-ary product; everything else is
left-associative. ``V[label]`` is the model's interaction vertex.
"""

from __future__ import annotations

import re

from .functional import Functional
from .models import Kind, model_of
from .products import (anti_time_ordered_product, make_monomial, pointwise_product, star_product,
                       time_ordered_product)
from .smatrix import interaction

SPECIES_NAMES = {
    "Phi1": "phi1", "Phi2": "phi2", "PhiTilde": "phiTilde", "Phi": "phi",
    "PsiBar": "psiBar", "Psi": "psi",
}

_OPS = {"star": "star", "*": "star", "⋆": "star", "T": "T", "AT": "AT",
        "dot": "dot", ".": "dot", "·": "dot", "·_T": "T", "·_AT": "AT"}

_TOKEN = re.compile(r"\s*(?:(?P<label>\[[^\]]*\])|(?P<pow>\^\d+)|(?P<op>star|dot|·_AT|·_T|AT|T|[*⋆.·])"
                    r"|(?P<name>PhiTilde|PsiBar|Phi1|Phi2|Phi|Psi|V)|(?P<lp>\()|(?P<rp>\)))")


class ParseError(ValueError):
    pass


def _tokenize(text: str) -> list[tuple[str, str]]:
    pos = 0
    out = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected input at {pos}: {text[pos:pos + 12]!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind)))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    return out


class _Parser:
    def __init__(self, model, text: str):
        self.model = model_of(model)
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind):
            got = "end of input" if tok[0] is None else repr(tok[1])
            raise ParseError(f"expected {kind or 'token'}, got {got}")
        self.i += 1
        return tok

    def parse(self) -> Functional:
        out = self.expr()
        if self.peek()[0] is not None:
            raise ParseError(f"trailing input {self.peek()[1]!r}")
        return out

    def expr(self) -> Functional:
        acc = self.atom()
        while self.peek()[0] == "op":
            op = _OPS[self.take("op")[1]]
            if op in ("T", "AT"):
                operands = [acc, self.atom()]
                while self.peek()[0] == "op" and _OPS[self.peek()[1]] == op:
                    self.take("op")
                    operands.append(self.atom())
                acc = time_ordered_product(operands) if op == "T" else anti_time_ordered_product(operands)
            elif op == "star":
                acc = star_product(acc, self.atom(), Kind.TWO_POINT)
            else:
                acc = pointwise_product(acc, self.atom())
        return acc

    def _species_run(self) -> list[str]:
        species = []
        while self.peek()[0] == "name" and self.peek()[1] != "V":
            name = SPECIES_NAMES[self.take("name")[1]]
            power = 1
            if self.peek()[0] == "pow":
                power = int(self.take("pow")[1][1:])
            species.extend([name] * power)
        return species

    def atom(self) -> Functional:
        kind, value = self.peek()
        if kind == "name" and value == "V":
            self.take()
            return interaction(self.model, self._label())
        if kind == "name":
            return make_monomial(self.model, self._species_run(), self._label())
        if kind == "lp":
            self.take("lp")
            if self.peek()[0] == "name" and self.peek()[1] != "V":
                save = self.i
                species = self._species_run()
                if self.peek()[0] == "rp":
                    self.take("rp")
                    if self.peek()[0] == "pow":
                        species = species * int(self.take("pow")[1][1:])
                    return make_monomial(self.model, species, self._label())
                self.i = save
            inner = self.expr()
            self.take("rp")
            return inner
        raise ParseError("unexpected end of input" if kind is None else f"unexpected token {value!r}")

    def _label(self) -> str:
        text = self.take("label")[1][1:-1].strip()
        if not text:
            raise ParseError("empty smearing label")
        return text


def parse_expression(model, text: str) -> Functional:
    return _Parser(model, text).parse()
