import numpy as np
import pytest
from scipy.integrate import RK45

from rgflow.errors import SingularLocus, StepUnderflow
from rgflow.flows import (dirac_model, integrate_fixed_rk4, integrate_flow, msr_model, two_scalar_model)
from rgflow.flows.couplings import DiracCouplings, MSRCouplings, ScalarCouplings
from rgflow.flows.integrate import A, B, C, E, Termination, convergence_order

SINGULAR = ScalarCouplings(0.0, -0.5, 0.3, 1.0, 0.5, 0.2, 1.0)


def test_tableau_matches_dormand_prince():
    assert np.allclose(C, RK45.C.tolist() + [1.0])
    assert np.allclose(A[:, :5], RK45.A) and np.allclose(A[:, 5], 0.0)
    assert np.allclose(B, RK45.B)
    assert np.allclose(E, RK45.E)


def test_fixed_step_order_is_four():
    y0 = ScalarCouplings(0.0, 0.2, 0.4, 1.0, 0.5, 0.2, 1.0).to_array()
    slope, hs, errs = convergence_order(two_scalar_model(), y0, (1.0, 3.0))
    assert hs[-1] / hs[0] == pytest.approx(0.1)
    assert abs(slope - 4.0) < 0.3


@pytest.mark.parametrize("model,state", [
    (two_scalar_model(), ScalarCouplings(0.0, 0.2, 0.4, 1.0, 0.5, 0.2, 1.0)),
    (msr_model("d4"), MSRCouplings(0.0, 0.1, 0.5, 2.0, 1.0)),
    (msr_model("d3"), MSRCouplings(0.0, 0.1, 0.5, 2.0, 1.0, "d3")),
    (dirac_model(), DiracCouplings(0.0, 0.1, 0.5)),
])
def test_adaptive_agrees_with_fine_fixed_step(model, state):
    rtol = 1e-8
    traj = integrate_flow(model, state.to_array(), (1.0, 3.0), rtol=rtol, atol=1e-12)
    n = 10 * traj.accepted
    fixed = integrate_fixed_rk4(model, state.to_array(), (1.0, 3.0), n)
    scale = np.maximum(np.abs(fixed), 1e-12)
    assert np.all(np.abs(traj.ys[-1] - fixed) <= 10 * rtol * scale + 1e-12)


def test_noise_strength_and_three_dimensional_coupling_are_flat():
    traj = integrate_flow(msr_model("d4"), MSRCouplings(0.0, 0.1, 0.5, 2.0, 1.0).to_array(), (0.1, 10.0))
    assert np.max(np.abs(traj.column("D") - 2.0)) < 1e-12
    traj = integrate_flow(msr_model("d3"), MSRCouplings(0.0, 0.1, 0.5, 2.0, 1.0, "d3").to_array(), (0.1, 10.0))
    assert np.max(np.abs(traj.column("lam") - 0.5)) < 1e-12
    traj = integrate_flow(dirac_model(), DiracCouplings(0.0, 0.1, 0.5).to_array(), (0.1, 10.0))
    assert np.max(np.abs(traj.column("lam") - 0.5)) < 1e-12


def test_lambda3_zero_subspace():
    y0 = ScalarCouplings(0.0, 0.2, 0.4, 1.0, 0.5, 0.0, 1.0).to_array()
    traj = integrate_flow(two_scalar_model(), y0, (1.0, 5.0))
    assert np.all(traj.column("lambda3") == 0.0)


def test_downward_flow_and_dense_output():
    y0 = MSRCouplings(0.0, 0.5, 0.5, 1.0, 1.0).to_array()
    traj = integrate_flow(msr_model(), y0, (3.0, 1.0), rtol=1e-11, atol=1e-13)
    assert traj.ks[0] == 3.0 and traj.ks[-1] == 1.0
    mid = traj.dense(2.0)
    ref = integrate_flow(msr_model(), y0, (3.0, 2.0), rtol=1e-11, atol=1e-13).ys[-1]
    assert np.allclose(mid, ref, rtol=1e-7)


def test_singular_bracket_is_stable_under_tightening():
    brackets = []
    for rtol in (1e-8, 1e-10, 1e-12):
        traj = integrate_flow(two_scalar_model(), SINGULAR.to_array(), (2.0, 0.1), rtol=rtol, atol=rtol * 1e-2)
        assert traj.termination is Termination.SINGULAR_LOCUS
        brackets.append(traj.bracket)
        assert abs(traj.bracket[0] - traj.bracket[1]) <= 1e-9
    mids = [0.5 * (a + b) for a, b in brackets]
    assert max(mids) - min(mids) < 1e-6
    # the crossing is where k^2 + m1^2 meets the singular threshold eps * mu^2 = 1e-8
    last = integrate_flow(two_scalar_model(), SINGULAR.to_array(), (2.0, 0.1), rtol=1e-12, atol=1e-14)
    k = last.ks[-1]
    assert k * k + last.column("m1_sq")[-1] == pytest.approx(1e-8, abs=1e-10)


def test_strict_mode_raises():
    with pytest.raises(SingularLocus):
        integrate_flow(two_scalar_model(), SINGULAR.to_array(), (2.0, 0.1), strict=True)


def test_step_underflow():
    traj = integrate_flow(two_scalar_model(), SINGULAR.to_array(), (2.0, 0.1), min_step=0.5, first_step=0.6)
    assert traj.termination in (Termination.STEP_UNDERFLOW, Termination.SINGULAR_LOCUS)
    if traj.termination is Termination.STEP_UNDERFLOW:
        with pytest.raises(StepUnderflow):
            traj.raise_for_termination()
