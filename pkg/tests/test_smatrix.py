from fractions import Fraction as Fr

import pytest

from rgflow.algebra import Model, make_monomial, star_product, vacuum_expectation
from rgflow.algebra.kernels import reduce_kernels
from rgflow.algebra.smatrix import (bogoliubov_truncated, interaction, s_matrix_truncated,
                                    second_order_template)
from rgflow.errors import AlgebraError, ModelMismatch, NonPerturbativeVertex

from oracles import num

TS, MSR, DIRAC = Model.TWO_SCALAR, Model.MSR, Model.DIRAC


def order_part(F, n):
    return F.filter(lambda t: t.coupling_degree == n)


def test_interaction_normalisations():
    V = interaction(TS)
    got = sorted((t.couplings, num(t.coeff)) for t in V)
    assert got == [((("lambda1", 1),), Fr(1, 24)), ((("lambda2", 1),), Fr(1, 24)), ((("lambda3", 1),), Fr(1, 4))]
    assert sorted(num(t.coeff) for t in interaction(MSR)) == [-1, Fr(1, 2)]
    assert [num(t.coeff) for t in interaction(DIRAC)] == [Fr(1, 2)]


@pytest.mark.parametrize("n,m", [(1, 0), (0, 1), (2, 0), (2, 1), (1, 2), (3, 1), (0, 3)])
def test_dirac_selection_rule(n, m):
    F = make_monomial(DIRAC, ["psi"] * n + ["psiBar"] * m, "f")
    order = 3 if n + m <= 3 else 2
    assert len(bogoliubov_truncated(interaction(DIRAC), F, order, vacuum_only=True)) == 0


def test_dirac_balanced_monomial_has_vacuum_terms():
    F = make_monomial(DIRAC, ["psi", "psiBar"], "f")
    # nothing survives at first order: two factors cannot saturate a four-spinor vertex
    assert len(bogoliubov_truncated(interaction(DIRAC), F, 1, vacuum_only=True)) == 0
    assert len(bogoliubov_truncated(interaction(DIRAC), F, 2, vacuum_only=True)) > 0


@pytest.mark.parametrize("species", [["phi1", "phi1"], ["phi1", "phi2"], ["phi2", "phi2"]])
def test_first_order_quadratic_observables_vanish(species):
    F = make_monomial(TS, species, "f")
    vac = bogoliubov_truncated(interaction(TS), F, 1, vacuum_only=True)
    assert len(order_part(vac, 1)) == 0
    full = vacuum_expectation(bogoliubov_truncated(interaction(TS), F, 1))
    assert len(order_part(full, 1)) == 0


def test_quartic_observable_first_order_survivor():
    """phi1^2 phi2^2 keeps a lambda3 term at first order (see the decisions ledger)."""
    F = make_monomial(TS, ["phi1", "phi1", "phi2", "phi2"], "f")
    first = order_part(bogoliubov_truncated(interaction(TS), F, 1, vacuum_only=True), 1)
    assert len(first) > 0
    assert {t.couplings for t in first} == {(("lambda3", 1),)}


@pytest.mark.parametrize("model,obs", [(TS, ["phi1", "phi1"]), (MSR, ["phi"]), (DIRAC, ["psi", "psiBar"])])
def test_vacuum_only_path_matches_full_expansion(model, obs):
    F = make_monomial(model, obs, "f")
    V = interaction(model)
    assert bogoliubov_truncated(V, F, 2, vacuum_only=True) == vacuum_expectation(bogoliubov_truncated(V, F, 2))


@pytest.mark.parametrize("model", [TS, MSR])
def test_s_matrix_inverse(model):
    V = interaction(model)
    S, Sinv = s_matrix_truncated(V, 2), s_matrix_truncated(V, 2, inverse=True)
    prod = reduce_kernels(star_product(Sinv, S, oriented=True, max_order=2)).truncate(2)
    assert len(prod) == 1
    (t,) = prod
    assert num(t.coeff) == 1 and t.factors == () and t.kernels == ()


def test_second_order_template_agrees_with_series():
    V = interaction(MSR)
    F = make_monomial(MSR, ["phi"], "f")
    tpl = second_order_template(V, F)
    series = bogoliubov_truncated(V, F, 1)
    assert order_part(tpl, 1) == order_part(series, 1)


def test_msr_response_second_order_is_noise_driven():
    F = make_monomial(MSR, ["phi"], "f")
    second = order_part(bogoliubov_truncated(interaction(MSR), F, 2, vacuum_only=True), 2)
    assert {t.couplings for t in second} == {(("D", 1), ("lambda", 1))}
    assert all(t.hbar == 1 for t in second)


def test_vertex_checks():
    with pytest.raises(NonPerturbativeVertex):
        bogoliubov_truncated(make_monomial(TS, ["phi1"], "h"), make_monomial(TS, ["phi1"], "f"), 1,
                             vacuum_only=True)
    with pytest.raises(ModelMismatch):
        bogoliubov_truncated(interaction(TS), make_monomial(MSR, ["phi"], "f"), 1)
    with pytest.raises(AlgebraError):
        reduce_kernels(star_product(make_monomial(DIRAC, ["psi"], "f"), make_monomial(DIRAC, ["psiBar"], "g")))
