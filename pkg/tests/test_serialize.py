import json

import pytest

from rgflow.algebra import Model, make_generator, make_monomial, star_product, time_ordered_product
from rgflow.algebra.parse import ParseError, parse_expression
from rgflow.algebra.serialize import from_dict, from_json, to_dict, to_json, to_text
from rgflow.algebra.smatrix import interaction
from rgflow.errors import UnknownSpecies

TS, DIRAC = Model.TWO_SCALAR, Model.DIRAC


def test_parse_golden_star():
    F = parse_expression(TS, "Phi1^2[f] star Phi1^2[f']")
    assert F == star_product(make_generator(TS, "phi1", "f", 2), make_generator(TS, "phi1", "f'", 2))
    assert parse_expression(TS, "Phi1^2[f] ⋆ Phi1^2[f']") == F


def test_parse_local_products():
    assert parse_expression(TS, "(Phi1 Phi2)[f]") == make_monomial(TS, ["phi1", "phi2"], "f")
    assert parse_expression(TS, "Phi1Phi2[f]") == make_monomial(TS, ["phi1", "phi2"], "f")
    assert parse_expression(TS, "(Phi1)^3[g]") == make_generator(TS, "phi1", "g", 3)


def test_parse_time_ordering_runs_are_one_product():
    a, b, c = (make_generator(TS, "phi1", lab) for lab in "fgh")
    assert parse_expression(TS, "Phi1[f] T Phi1[g] T Phi1[h]") == time_ordered_product([a, b, c])


def test_parse_interaction_atom():
    assert parse_expression(DIRAC, "V[h]") == interaction(DIRAC, "h")


@pytest.mark.parametrize("text", ["Phi1^2", "Phi1[f] star", "Psi[f]", "Phi1[]", "Phi1[f] ?? Phi1[g]"])
def test_parse_errors(text):
    with pytest.raises((ParseError, UnknownSpecies)):
        parse_expression(TS, text)


def test_json_schema_fields():
    F = star_product(make_generator(TS, "phi1", "f", 2), make_generator(TS, "phi1", "f'", 2))
    data = json.loads(to_json(F))
    assert data["model"] == "TwoScalar"
    term = max(data["terms"], key=lambda t: t["hbar"])
    assert term["coeff"] == "2" and term["kernels"][0]["power"] == 2
    assert from_dict(to_dict(F)) == F


def test_json_round_trip_keeps_spinor_signs():
    F = time_ordered_product([make_generator(DIRAC, "psiBar", "f"), make_generator(DIRAC, "psi", "g")])
    assert from_json(to_json(F)) == F


def test_text_rendering_is_stable():
    F = star_product(make_generator(TS, "phi1", "f", 2), make_generator(TS, "phi1", "f'", 2))
    assert to_text(F) == to_text(from_json(to_json(F)))
    assert "hbar^2" in to_text(F)
