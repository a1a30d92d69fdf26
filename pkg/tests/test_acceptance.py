"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or ``python tests/test_acceptance.py``.
Every check returns (passed, detail); runtime budgets are part of the verdict.
"""

import itertools
import sys
import tempfile
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from oracles import brute_star, num  # noqa: E402
from rgflow.algebra import Kind, Model, make_generator, make_monomial, star_product, time_ordered_product  # noqa: E402
from rgflow.algebra.smatrix import bogoliubov_truncated, interaction  # noqa: E402
from rgflow.cli import parse_config, run  # noqa: E402
from rgflow.errors import SigmaNonPositive  # noqa: E402
from rgflow.flows import (beta_msr, beta_two_scalar, dirac_model, integrate_flow, model_for,  # noqa: E402
                          msr_model, two_scalar_model)
from rgflow.flows.couplings import DiracCouplings, MSRCouplings, ScalarCouplings  # noqa: E402
from rgflow.flows.integrate import Termination, convergence_order  # noqa: E402
from rgflow.lpa import FieldGrid, ansatz_boundary, fit_couplings, project_betas_fd, solve_flow  # noqa: E402

TS, MSR, DIRAC = Model.TWO_SCALAR, Model.MSR, Model.DIRAC
CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def _coeffs(F):
    return sorted((t.hbar, num(t.coeff)) for t in F)


def check_1():
    ok = True
    for sp in ("phi1", "phi2"):
        F = star_product(make_generator(TS, sp, "f", 2), make_generator(TS, sp, "f'", 2))
        ok &= _coeffs(F) == [(0, 1), (1, 4), (2, 2)]
        ok &= all(k[0] == Kind.TWO_POINT.value and k[1] == (sp, sp) for t in F for k in t.kernels)
    G = star_product(make_monomial(TS, ["phi1", "phi2"], "f"), make_monomial(TS, ["phi1", "phi2"], "f'"))
    ok &= _coeffs(G) == [(0, 1), (1, 1), (1, 1), (2, 1)]
    ok &= sorted(t.kernels[0][1] for t in G if t.hbar == 1) == [("phi1", "phi1"), ("phi2", "phi2")]
    ok &= sorted(k[1] for t in G if t.hbar == 2 for k in t.kernels) == [("phi1", "phi1"), ("phi2", "phi2")]
    show = lambda H: ", ".join(f"{c} hbar^{h}" for h, c in _coeffs(H))
    return ok, f"square: {show(F)}; mixed: {show(G)}"


def check_2():
    psi, psibar = make_generator(DIRAC, "psi", "f"), make_generator(DIRAC, "psiBar", "f'")
    out = []
    for pair, sign, chan in (([psi, psibar], 1, ("psi", "psiBar")), ([psibar, psi], -1, ("psiBar", "psi"))):
        first = [t for t in time_ordered_product(pair) if t.hbar == 1]
        out.append(len(first) == 1 and num(first[0].coeff) == sign
                   and first[0].kernels[0][:2] == (Kind.FEYNMAN.value, chan))
    return all(out), f"psi.T psiBar -> +HF[psi,psiBar]: {out[0]}, psiBar.T psi -> -HF[psiBar,psi]: {out[1]}"


def check_3():
    V = interaction(DIRAC)
    leaks = []
    for n, m in itertools.product(range(4), repeat=2):
        if n != m and n + m <= 3:
            F = make_monomial(DIRAC, ["psi"] * n + ["psiBar"] * m, "f")
            if len(bogoliubov_truncated(V, F, 3, vacuum_only=True)):
                leaks.append((n, m))
    survivors = 0
    for species in (["phi1", "phi1"], ["phi1", "phi2"], ["phi2", "phi2"]):
        vac = bogoliubov_truncated(interaction(TS), make_monomial(TS, species, "f"), 1, vacuum_only=True)
        survivors += len(vac.filter(lambda t: t.coupling_degree == 1))
    return not leaks and survivors == 0, f"Dirac n!=m leaks: {leaks}, first-order quadratic survivors: {survivors}"


def check_4():
    species = {TS: ("phi1", "phi2"), MSR: ("phi", "phiTilde"), DIRAC: ("psi", "psiBar")}
    bad, pairs = 0, 0
    for model, deg in ((TS, 4), (MSR, 4), (DIRAC, 2)):
        a, b = species[model]
        mons = [[a] * i + [b] * j for i, j in itertools.product(range(deg + 1), repeat=2)]
        for left, right in itertools.product(mons, repeat=2):
            pairs += 1
            bad += star_product(make_monomial(model, left, "f"),
                                make_monomial(model, right, "f'")) != brute_star(model, left, right)
    return bad == 0, f"{pairs} pairs, {bad} mismatches"


def check_5():
    worst = {}
    traj = integrate_flow(msr_model("d4"), MSRCouplings(0.0, 0.1, 0.5, 2.0, 1.0).to_array(), (0.1, 10.0))
    worst["msr_d4 D"] = np.max(np.abs(traj.column("D") - 2.0))
    traj = integrate_flow(msr_model("d3"), MSRCouplings(0.0, 0.1, 0.5, 2.0, 1.0, "d3").to_array(), (0.1, 10.0))
    worst["msr_d3 D"] = np.max(np.abs(traj.column("D") - 2.0))
    worst["msr_d3 lambda"] = np.max(np.abs(traj.column("lam") - 0.5))
    traj = integrate_flow(dirac_model(), DiracCouplings(0.0, 0.1, 0.5).to_array(), (0.1, 10.0))
    worst["dirac lambda"] = np.max(np.abs(traj.column("lam") - 0.5))
    return max(worst.values()) < 1e-12, ", ".join(f"{k} {v:.1e}" for k, v in worst.items())


def _rel(a, b):
    # exact-zero components (flat couplings, the unused slot) are held to 1e-10 of the vector scale
    floor = max(1e-4 * np.max(np.abs(b)), 1e-300)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), floor)))


def check_6():
    rng = np.random.default_rng(20240611)
    worst = 0.0
    for _ in range(10):
        c = ScalarCouplings(rng.uniform(-1, 1), rng.uniform(0.05, 1), rng.uniform(0.05, 1), rng.uniform(0.1, 2),
                            rng.uniform(0.1, 2), rng.uniform(-0.5, 0.5), rng.uniform(0.5, 2))
        k = rng.uniform(1, 3)
        worst = max(worst, _rel(project_betas_fd(c, k).to_array(), beta_two_scalar(c, k).to_array()))
    for dim in ("d4", "d3") * 5:
        c = MSRCouplings(rng.uniform(-1, 1), rng.uniform(0.05, 1), rng.uniform(-2, 2), rng.uniform(0.1, 3),
                         rng.uniform(0.5, 2), dim)
        k = rng.uniform(1, 3)
        worst = max(worst, _rel(project_betas_fd(c, k).to_array(), beta_msr(c, k).to_array()))
    return worst < 1e-6, f"20 points, worst relative error {worst:.2e}"


def _lpa_msr(points):
    g = FieldGrid.square(0.5, points)
    c = MSRCouplings(0.0, 0.1, 0.2, 1.0, 1.0)
    traj = integrate_flow(model_for(c), c.to_array(), (1.0, 2.0), rtol=1e-12, atol=1e-14)
    bd = ansatz_boundary(g, "msr_d4", lambda k: c.with_values(traj.dense(k)), 1.0)
    res = solve_flow(bd, 2.0, checkpoints=[1.25, 1.5, 1.75, 2.0])
    worst = 0.0
    for s in res.checkpoints:
        fit, ode = fit_couplings(s).couplings, c.with_values(traj.dense(s.k))
        for name in ("m_sq", "lam"):
            worst = max(worst, abs(getattr(fit, name) - getattr(ode, name)) / abs(getattr(ode, name)))
    return worst, res


def check_7():
    coarse, _ = _lpa_msr(41)
    fine, _ = _lpa_msr(81)
    ratio = coarse / fine
    return coarse < 1e-3 and ratio >= 3, (f"41x41 discrepancy {coarse:.2e} (< 1e-3), 81x81 {fine:.2e}, "
                                          f"refinement ratio {ratio:.2f} (needs >= 3)")


def check_8():
    start = ScalarCouplings(0.0, -0.5, 0.3, 1.0, 0.5, 0.2, 1.0).to_array()
    mids, causes = [], set()
    for rtol in (1e-8, 1e-10, 1e-12):
        traj = integrate_flow(two_scalar_model(), start, (2.0, 0.1), rtol=rtol, atol=rtol * 1e-2)
        causes.add(traj.termination)
        mids.append(0.5 * sum(traj.bracket))
    spread = max(mids) - min(mids)
    return causes == {Termination.SINGULAR_LOCUS} and spread < 1e-6, \
        f"crossing at k = {mids[-1]:.10f}, spread under tightening {spread:.1e}"


def check_9():
    _, res = _lpa_msr(41)
    smin = res.diagnostics.sigma_min
    g = FieldGrid.square(0.5, 21)
    c = ScalarCouplings(0.0, 0.05, 0.05, 0.1, 0.1, 0.0)
    traj = integrate_flow(model_for(c), c.to_array(), (0.3, 0.5), rtol=1e-12, atol=1e-14)
    bd = ansatz_boundary(g, "two_scalar", lambda k: c.with_values(traj.dense(k)), 0.3)
    try:
        solve_flow(bd, 0.5)
        aborted = "no abort"
    except SigmaNonPositive as err:
        aborted = f"SigmaNonPositive at node {err.node}, sigma {err.value:.3g}"
    return smin > 0 and aborted.startswith("Sigma"), f"criterion-7 sigma_min {smin:.4g}; adversarial: {aborted}"


def check_10():
    y0 = ScalarCouplings(0.0, 0.2, 0.4, 1.0, 0.5, 0.2, 1.0).to_array()
    slope, hs, _ = convergence_order(two_scalar_model(), y0, (1.0, 3.0))
    return abs(slope - 4) <= 0.3, f"order {slope:.3f} over h in [{min(hs):.3g}, {max(hs):.3g}]"


def check_11():
    diffs, files = [], 0
    for name in ("flow_msr_d4.yaml", "lpa_msr_d4.yaml"):
        cfg = parse_config(str(CONFIGS / name))
        with tempfile.TemporaryDirectory() as tmp:
            a, b = Path(tmp, "a"), Path(tmp, "b")
            run(cfg, a)
            run(cfg, b)
            # the manifest records wall time; every payload it lists is compared byte for byte
            for p in sorted(a.rglob("*")):
                if p.is_file() and p.name != "manifest.json":
                    files += 1
                    if p.read_bytes() != (b / p.relative_to(a)).read_bytes():
                        diffs.append(f"{name}:{p.relative_to(a)}")
    return not diffs, f"{files} files compared, differing: {diffs or 'none'}"


BUDGET = {1: 1, 2: 1, 3: 10, 4: 30, 5: 3, 6: 5, 7: 120, 8: 5, 9: 60, 10: 10, 11: 120}
CHECKS = {n: globals()[f"check_{n}"] for n in BUDGET}


def verdict(n):
    t0 = time.perf_counter()
    ok, detail = CHECKS[n]()
    took = time.perf_counter() - t0
    ok = bool(ok) and took < BUDGET[n]
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{took:.2f} s, budget {BUDGET[n]} s]"
    return ok, line


@pytest.mark.parametrize("n", list(BUDGET))
def test_criterion(n, capsys):
    ok, line = verdict(n)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [verdict(n) for n in BUDGET]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
