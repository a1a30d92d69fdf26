"""Explicit fourth-order marching of the local-potential flow on a field grid."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import BoundaryMismatch, GridError, KRatioExceeded, SigmaNonPositive, StabilityGuard
from ..flows.betas import EPS_SING
from .fit import ansatz_values
from .grid import FieldGrid, PotentialSurface
from .rhs import RHSResult, k_ratio, rhs_surface
from .seminorm import seminorms

BoundaryFn = Callable[[float, np.ndarray, np.ndarray], np.ndarray]


@dataclass
class BoundaryData:
    """Initial surface at k = a and the boundary datum beta(k, x, y) on the grid edge."""

    psi_init: PotentialSurface
    beta: BoundaryFn

    def __post_init__(self):
        self._mask = self.psi_init.grid.boundary_mask()
        x, y = self.psi_init.grid.mesh()
        self._bx, self._by = x[self._mask], y[self._mask]

    def values(self, k: float) -> np.ndarray:
        return np.asarray(self.beta(k, self._bx, self._by), dtype=float) * np.ones_like(self._bx)

    def apply(self, values: np.ndarray, k: float) -> None:
        values[self._mask] = self.values(k)

    def check_compatibility(self, tol: float | None = None) -> float:
        """Largest edge mismatch between psi_init and beta(a); raise above ``tol``."""
        init = self.psi_init.values[self._mask]
        gap = float(np.max(np.abs(self.values(self.psi_init.k) - init)))
        if tol is None:
            h = min(self.psi_init.grid.spacing)
            tol = 1e-9 * max(1.0, float(np.max(np.abs(init)))) + h * h * 1e-6
        if gap > tol:
            raise BoundaryMismatch(f"boundary datum differs from the initial surface by {gap:.3g} at k = "
                                   f"{self.psi_init.k}", k=self.psi_init.k, value=gap)
        return gap


def ansatz_boundary(grid: FieldGrid, model: str, couplings_at: Callable[[float], object], k0: float) -> BoundaryData:
    """Initial data and boundary datum both taken from the coupling ansatz.

    ``couplings_at(k)`` is typically the dense output of an ODE trajectory.
    """
    x, y = grid.mesh()
    psi = PotentialSurface(grid, k0, ansatz_values(model, couplings_at(k0), x, y), model)
    return BoundaryData(psi, lambda k, bx, by: ansatz_values(model, couplings_at(k), bx, by))


@dataclass(frozen=True)
class Guards:
    mu_sq: float = 1.0
    safety: float = 0.2
    min_step: float = 1e-9
    max_step: float | None = None
    k_ratio_cap: float = 0.5
    eps_sing: float = EPS_SING
    seminorm_order: int = 4


@dataclass
class StepRecord:
    k: float
    dk: float
    sigma_min: float
    k_ratio: float
    seminorms: list[float]

    def as_dict(self) -> dict:
        return {"k": self.k, "dk": self.dk, "sigma_min": self.sigma_min, "k_ratio_max": self.k_ratio,
                "seminorms": list(self.seminorms)}


@dataclass
class FlowDiagnostics:
    sigma_min: float = np.inf
    k_ratio_max: float = 0.0
    seminorms: list[float] = field(default_factory=list)
    records: list[StepRecord] = field(default_factory=list)

    def record(self, rec: StepRecord) -> None:
        self.records.append(rec)
        self.sigma_min = min(self.sigma_min, rec.sigma_min)
        self.k_ratio_max = max(self.k_ratio_max, rec.k_ratio)
        self.seminorms = list(rec.seminorms)


def _sigma_min(surface: PotentialSurface, res: RHSResult, k: float) -> tuple[float, tuple[int, int]]:
    best, node = np.inf, None
    for sig in res.sigma:
        i = int(np.argmin(sig))
        if sig.flat[i] < best:
            best, node = float(sig.flat[i]), surface.grid.node(i)
    return best, node


def stable_step(surface: PotentialSurface, res: RHSResult, safety: float) -> float:
    """Largest dk allowed by the diffusion guard safety * h^2 / max|sigma|."""
    h = min(surface.grid.spacing)
    smax = max(float(np.max(np.abs(s))) for s in res.sigma)
    return np.inf if smax == 0 else safety * h * h / smax


def step_flow(u: PotentialSurface, dk: float, boundary: BoundaryData, guards: Guards = Guards(),
              kernels=None, first: RHSResult | None = None) -> PotentialSurface:
    """One classical RK4 step; stage states carry beta at their stage scale."""
    k, mu, eps = u.k, guards.mu_sq, guards.eps_sing
    interior = u.grid.interior_mask()

    def f(state, kk):
        return rhs_surface(state, kk, mu, eps, kernels).rhs

    def stage(incr, kk):
        vals = u.values + incr
        boundary.apply(vals, kk)
        return u.copy(vals, kk)

    k1 = first.rhs if first is not None else f(u, k)
    k2 = f(stage(dk / 2 * k1, k + dk / 2), k + dk / 2)
    k3 = f(stage(dk / 2 * k2, k + dk / 2), k + dk / 2)
    k4 = f(stage(dk * k3, k + dk), k + dk)
    vals = u.values.copy()
    vals[interior] += (dk / 6 * (k1 + 2 * k2 + 2 * k3 + k4))[interior]
    boundary.apply(vals, k + dk)
    return u.copy(vals, k + dk)


@dataclass
class FlowResult:
    surface: PotentialSurface
    diagnostics: FlowDiagnostics
    checkpoints: list[PotentialSurface]
    steps: int


def solve_flow(boundary: BoundaryData, k_end: float, guards: Guards = Guards(),
               checkpoints=(), kernels=None, check_boundary: bool = True,
               on_checkpoint: Callable[[PotentialSurface, FlowDiagnostics], None] | None = None,
               diagnostics: FlowDiagnostics | None = None) -> FlowResult:
    """March from psi_init.k to ``k_end`` under the stability guard, recording diagnostics every step.

    Pass ``diagnostics`` to keep the step records when a guard aborts the run.
    """
    u = boundary.psi_init.copy()
    a = u.k
    if not a > 0:
        raise GridError(f"initial scale must be positive, got {a}", k=a)
    if not k_end > a:
        raise GridError(f"k range [{a}, {k_end}] is empty", k=a)
    if check_boundary:
        boundary.check_compatibility()
    boundary.apply(u.values, a)
    max_step = guards.max_step or (k_end - a) / 50
    marks = sorted({float(c) for c in checkpoints if a < c <= k_end} | {float(k_end)})
    tol = 1e-12 * max(1.0, abs(k_end))
    wanted = {float(c) for c in checkpoints}
    diag = diagnostics if diagnostics is not None else FlowDiagnostics()
    saved: list[PotentialSurface] = []
    steps, target, last_dk = 0, 0, 0.0
    while True:
        k = u.k
        res = rhs_surface(u, k, guards.mu_sq, guards.eps_sing, kernels)
        smin, node = _sigma_min(u, res, k)
        if not smin > 0:
            raise SigmaNonPositive(f"effective diffusion {smin:.6g} <= 0 at node {node} "
                                   f"(fields {u.grid.coords(node)}), k = {k:.12g}", k=k, node=node, value=smin)
        ratio = k_ratio(u, res, k)
        if ratio > guards.k_ratio_cap:
            raise KRatioExceeded(f"K-ratio {ratio:.6g} exceeds the cap {guards.k_ratio_cap} at k = {k:.12g}",
                                 k=k, value=ratio)
        diag.record(StepRecord(k, last_dk, smin, ratio, seminorms(u, guards.seminorm_order)))
        if k in wanted or target == len(marks):
            saved.append(u.copy())
            if on_checkpoint is not None:
                on_checkpoint(u, diag)
        if target == len(marks):
            break
        allowed = min(stable_step(u, res, guards.safety), max_step)
        if allowed < guards.min_step:
            raise StabilityGuard(f"stable step {allowed:.3g} is below min_step {guards.min_step:.3g} "
                                 f"at k = {k:.12g}", k=k, value=allowed)
        # spread the distance to the next mark evenly instead of leaving a sliver
        remaining = marks[target] - k
        dk = remaining / max(1, int(np.ceil(remaining / allowed - 1e-12)))
        u = step_flow(u, dk, boundary, guards, kernels, first=res)
        steps += 1
        last_dk = dk
        if abs(u.k - marks[target]) <= tol:
            u.k = marks[target]
            target += 1
    return FlowResult(u, diag, saved, steps)
