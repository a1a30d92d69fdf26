"""Stable JSON and plain-text renderings of functionals."""

from __future__ import annotations

import json

from sympy.polys.domains import QQ, QQ_I

from .functional import Functional
from .models import model_of


def _rat(q) -> str:
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else f"{q.numerator}"


def _parse_rat(text: str):
    num, _, den = str(text).partition("/")
    return QQ(int(num), int(den or 1))


def to_dict(F: Functional) -> dict:
    terms = []
    for t in F:
        entry = {"coeff": _rat(t.coeff.x)}
        if t.coeff.y:
            entry["coeff_i"] = _rat(t.coeff.y)
        entry.update({
            "hbar": t.hbar,
            "hbar_inv": t.hbar_inv,
            "couplings": {n: p for n, p in t.couplings},
            "vertices": list(t.vertices),
            "factors": [{"vertex": v, "slot": s, "species": sp} for v, s, sp in t.factors],
            "kernels": [{"kind": kind, "channel": list(ch), "from": list(a), "to": list(b),
                         "directed": d, "power": p}
                        for kind, ch, a, b, d, p in t.kernels],
        })
        terms.append(entry)
    return {"model": F.model.value, "terms": terms}


def from_dict(data: dict) -> Functional:
    model = model_of(data["model"])
    raw = []
    for e in data["terms"]:
        coeff = QQ_I(_parse_rat(e["coeff"]), _parse_rat(e.get("coeff_i", "0")))
        couplings = tuple(sorted((n, int(p)) for n, p in e.get("couplings", {}).items()))
        factors = [(int(f["vertex"]), int(f["slot"]), f["species"]) for f in e["factors"]]
        kernels = [(k["kind"], tuple(k["channel"]), tuple(k["from"]), tuple(k["to"]), bool(k["directed"]),
                    int(k["power"])) for k in e["kernels"]]
        raw.append((coeff, int(e.get("hbar_inv", 0)), couplings, tuple(e["vertices"]), factors, kernels))
    return Functional.from_raw(model, raw)


def to_json(F: Functional, indent: int | None = 2) -> str:
    return json.dumps(to_dict(F), indent=indent, sort_keys=False, ensure_ascii=True)


def from_json(text: str) -> Functional:
    return from_dict(json.loads(text))


_SHORT = {"TwoPoint": "H", "Feynman": "HF", "AntiFeynman": "HAF", "Retarded": "R", "Advanced": "A",
          "Hadamard": "HS"}


def _coeff_text(c) -> str:
    re, im = c.x, c.y
    if not im:
        return _rat(re)
    if not re:
        return f"{_rat(im)}i"
    return f"({_rat(re)}{'+' if im > 0 else '-'}{_rat(abs(im))}i)"


def term_text(t) -> str:
    parts = [_coeff_text(t.coeff)]
    if t.hbar:
        parts.append(f"hbar^{t.hbar}")
    for n, p in t.couplings:
        parts.append(n if p == 1 else f"{n}^{p}")
    for kind, ch, a, b, d, p in t.kernels:
        name = f"{_SHORT.get(kind, kind)}[{ch[0]},{ch[1]}]({a[0]},{b[0]})"
        parts.append(name if p == 1 else f"{name}^{p}")
    if t.factors:
        parts.append("".join(f"{sp}({v})" for v, _, sp in t.factors))
    labels = ",".join(f"{i}:{lab}" for i, lab in enumerate(t.vertices))
    return " ".join(parts) + (f" @[{labels}]" if labels else "")


def to_text(F: Functional) -> str:
    if not F:
        return "0"
    return " + ".join(term_text(t) for t in F)
