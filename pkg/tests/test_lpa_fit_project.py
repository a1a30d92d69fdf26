import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rgflow.errors import IllConditionedFit, LogDomain
from rgflow.flows import beta_msr, beta_two_scalar
from rgflow.flows.couplings import MSRCouplings, ScalarCouplings
from rgflow.lpa import FieldGrid, PotentialSurface, fit_couplings, project_betas_fd, sample_ansatz
from rgflow.lpa import seminorm_estimate
from rgflow.lpa.fit import MAX_CONDITION


def test_fit_recovers_scalar_ansatz():
    c = ScalarCouplings(0.3, 0.2, -0.1, 1.5, 0.7, 0.25)
    fit = fit_couplings(sample_ansatz(FieldGrid.square(1.0, 31), "two_scalar", c, 1.0))
    assert np.allclose(fit.couplings.to_array(), c.to_array(), atol=1e-9)
    assert fit.residual < 1e-12


def test_fit_recovers_msr_ansatz():
    c = MSRCouplings(0.1, 0.2, 0.3, 1.7, 1.0)
    fit = fit_couplings(sample_ansatz(FieldGrid.square(0.5, 41), "msr_d4", c, 1.0))
    assert np.allclose(fit.couplings.to_array(), c.to_array(), atol=1e-11)


def test_fit_of_constant():
    g = FieldGrid.square(0.5, 21)
    fit = fit_couplings(PotentialSurface(g, 1.0, np.full(g.shape, 2.5)))
    assert fit.couplings.U0 == pytest.approx(2.5)
    assert np.allclose(fit.couplings.to_array()[1:6], 0.0, atol=1e-10)


def test_ill_conditioned_fit():
    # 5 points per axis leave a 3x3 centre block, too few for six scalar monomials
    g = FieldGrid.square(1e-4, 5)
    with pytest.raises(IllConditionedFit):
        fit_couplings(PotentialSurface(g, 1.0, np.zeros(g.shape)))
    assert MAX_CONDITION == 1e10


def _rel(a, b):
    """Component-wise relative error; exact zeros are compared against 1e-10 of the vector scale."""
    floor = max(1e-10 * np.max(np.abs(b)) / 1e-6, 1e-300)
    return np.max(np.abs(a - b) / np.maximum(np.abs(b), floor))


def coupling(lo, hi):
    """Exactly zero or of order one: relative errors of 1e-40-sized betas say nothing."""
    mag = st.floats(0.01, max(abs(lo), abs(hi)))
    signed = st.one_of(mag, mag.map(lambda v: -v)).filter(lambda v: lo <= v <= hi)
    return st.one_of(st.just(0.0), signed)


scalar_states = st.builds(ScalarCouplings, coupling(-1, 1), coupling(-0.3, 1), coupling(-0.3, 1),
                          coupling(0, 2), coupling(0, 2), coupling(-0.5, 0.5), st.floats(0.5, 2))
msr_states = st.builds(MSRCouplings, coupling(-1, 1), coupling(-0.3, 1), coupling(-2, 2), coupling(0, 3),
                       st.floats(0.5, 2), st.sampled_from(["d4", "d3"]))


@settings(max_examples=40, deadline=None)
@given(scalar_states, st.floats(1, 3))
def test_projection_matches_two_scalar_betas(c, k):
    assert _rel(project_betas_fd(c, k).to_array(), beta_two_scalar(c, k).to_array()) < 1e-6


@settings(max_examples=40, deadline=None)
@given(msr_states, st.floats(1, 3))
def test_projection_matches_msr_betas(c, k):
    assert _rel(project_betas_fd(c, k).to_array(), beta_msr(c, k).to_array()) < 1e-6


def test_projection_symmetry_and_lambda3_factor():
    c = ScalarCouplings(0.0, 0.3, 0.3, 0.8, 0.8, 0.0, 1.0)
    b = project_betas_fd(c, 1.5)
    assert b.m1_sq == pytest.approx(b.m2_sq, rel=1e-12)
    assert abs(b.lambda3) < 1e-12


def test_hessian_mass_is_a_rescaled_ansatz_mass():
    """The literal Hessian equals the ansatz mass with lambda1,2 scaled by 6 and lambda3 by 2."""
    c = ScalarCouplings(0.0, 0.3, 0.2, 0.8, 0.5, 0.1, 1.0)
    h = project_betas_fd(c, 1.5, mass="hessian")
    scaled = ScalarCouplings(0.0, 0.3, 0.2, 4.8, 3.0, 0.2, 1.0)
    assert np.allclose(h.to_array(), project_betas_fd(scaled, 1.5).to_array(), rtol=1e-9, atol=1e-14)
    assert h.m1_sq != pytest.approx(project_betas_fd(c, 1.5).m1_sq, rel=1e-3)


def test_projection_log_domain():
    with pytest.raises(LogDomain):
        project_betas_fd(MSRCouplings(m_sq=-2.0, lam=1.0), 1.0)


def test_seminorm_examples():
    g = FieldGrid.square(1.0, 21)
    x, y = g.mesh()
    const = PotentialSurface(g, 1.0, np.full(g.shape, -3.0))
    assert all(seminorm_estimate(const, n) == 3.0 for n in range(5))
    lin = PotentialSurface(g, 1.0, 0.5 + 2.0 * x)
    assert seminorm_estimate(lin, 0) == pytest.approx(2.5)
    assert seminorm_estimate(lin, 1) == pytest.approx(2.5)
    small = FieldGrid.square(0.1, 21)
    xs, _ = small.mesh()
    steep = PotentialSurface(small, 1.0, 2.0 * xs)
    assert seminorm_estimate(steep, 0) == pytest.approx(0.2)
    assert seminorm_estimate(steep, 1) == pytest.approx(2.0)


def test_seminorm_converges_at_second_order():
    errs = []
    for n in (11, 21, 41, 81):
        g = FieldGrid.square(1.0, n)
        x, y = g.mesh()
        u = np.sin(x) * np.exp(y / 2)
        # sup over |alpha| <= 2 of |D^alpha u| on [-1,1]^2 is d_x u = cos(x) e^(y/2) at (0, 1)
        exact = np.exp(0.5)
        errs.append(abs(seminorm_estimate(PotentialSurface(g, 1.0, u), 2) - exact))
    rates = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(rates > 1.5)
