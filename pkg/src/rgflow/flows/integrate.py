"""Adaptive Dormand-Prince 4(5) integration of coupling flows with singular-locus events."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..errors import FlowError, SingularLocus, StepUnderflow
from .betas import FlowModel

# Dormand-Prince 5(4) tableau
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = np.array([
    [0, 0, 0, 0, 0, 0],
    [1 / 5, 0, 0, 0, 0, 0],
    [3 / 40, 9 / 40, 0, 0, 0, 0],
    [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
])
B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 4th order embedded and the 5th order solution, per stage (7 stages, FSAL)
E = np.array([-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
PI_BETA = 0.04
PI_EXPONENT = 0.2 - 0.75 * PI_BETA


class Termination(str, Enum):
    REACHED_END = "ReachedEnd"
    SINGULAR_LOCUS = "SingularLocus"
    STEP_UNDERFLOW = "StepUnderflow"


@dataclass
class FlowTrajectory:
    model: str
    names: tuple[str, ...]
    ks: np.ndarray
    ys: np.ndarray
    fs: np.ndarray
    termination: Termination = Termination.REACHED_END
    bracket: tuple[float, float] | None = None
    message: str = ""
    accepted: int = 0
    rejected: int = 0
    error: FlowError | None = field(default=None, repr=False)

    def column(self, name: str) -> np.ndarray:
        return self.ys[:, self.names.index(name)]

    def dense(self, k) -> np.ndarray:
        """Cubic Hermite interpolation between accepted samples."""
        ks = self.ks
        k = np.asarray(k, dtype=float)
        scalar = k.ndim == 0
        k = np.atleast_1d(k)
        increasing = ks[-1] >= ks[0]
        order = ks if increasing else ks[::-1]
        idx = np.clip(np.searchsorted(order, k) - 1, 0, len(ks) - 2)
        if not increasing:
            idx = len(ks) - 2 - idx
        k0, k1 = ks[idx], ks[idx + 1]
        h = k1 - k0
        t = ((k - k0) / h)[:, None]
        y0, y1, f0, f1 = self.ys[idx], self.ys[idx + 1], self.fs[idx], self.fs[idx + 1]
        h = h[:, None]
        out = ((2 * t ** 3 - 3 * t ** 2 + 1) * y0 + (t ** 3 - 2 * t ** 2 + t) * h * f0
               + (-2 * t ** 3 + 3 * t ** 2) * y1 + (t ** 3 - t ** 2) * h * f1)
        return out[0] if scalar else out

    def raise_for_termination(self) -> None:
        if self.error is not None:
            raise self.error


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x * x)))


class _Blocked(Exception):
    pass


def _trial(model: FlowModel, k: float, y: np.ndarray, f: np.ndarray, h: float, rtol: float, atol: float):
    """One Dormand-Prince step; raises _Blocked if any stage touches the singular locus."""
    K = np.empty((7, y.size))
    K[0] = f
    try:
        for s in range(1, 6):
            ys = y + h * (A[s, :s] @ K[:s])
            if model.margin is not None and model.margin(k + C[s] * h, ys) <= 0:
                raise _Blocked
            K[s] = model.rhs(k + C[s] * h, ys)
        y_new = y + h * (B @ K[:6])
        if model.margin is not None and model.margin(k + h, y_new) <= 0:
            raise _Blocked
        K[6] = model.rhs(k + h, y_new)
    except SingularLocus as exc:
        raise _Blocked from exc
    scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
    err = _rms(h * (E @ K) / scale)
    return y_new, K[6], err


def _initial_step(model, k, y, f, direction, rtol, atol, span) -> float:
    scale = atol + np.abs(y) * rtol
    d0, d1 = _rms(y / scale), _rms(f / scale)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    try:
        f1 = model.rhs(k + direction * h0, y + direction * h0 * f)
        d2 = _rms((f1 - f) / scale) / h0
    except SingularLocus:
        return h0 * 1e-3
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def integrate_flow(model: FlowModel, y0, k_span: tuple[float, float], rtol: float = 1e-8, atol: float = 1e-10,
                   first_step: float | None = None, max_step: float = np.inf, min_step: float | None = None,
                   bracket_tol: float = 1e-10, max_steps: int = 200000, strict: bool = False) -> FlowTrajectory:
    """Integrate ``model`` from k_span[0] to k_span[1] (either direction).

    When a step would cross the singular locus the step length is bisected
    until the last admissible length and the first blocked one are within
    ``bracket_tol`` (relative to max(1, |k|)); the trajectory then ends at the
    admissible point with ``termination = SingularLocus`` and ``bracket`` set.
    """
    a, b = map(float, k_span)
    if not (a > 0 and b > 0):
        raise ValueError("the scale range must be positive")
    direction = 1.0 if b >= a else -1.0
    y = np.array(y0, dtype=float)
    k = a
    if model.margin is not None and model.margin(k, y) <= 0:
        raise SingularLocus(f"initial data at k = {k} lie on the singular side of the locus", k=k)
    f = model.rhs(k, y)
    if min_step is None:
        min_step = 1e-14 * max(abs(a), abs(b))
    span = abs(b - a)
    h = first_step if first_step else _initial_step(model, k, y, f, direction, rtol, atol, span)
    h = min(h, max_step)

    ks, ys, fs = [k], [y.copy()], [f.copy()]
    traj = FlowTrajectory(model.name, model.names, np.empty(0), np.empty((0, y.size)), np.empty((0, y.size)))
    err_prev = 1e-4
    rejected_last = False

    def finish(term, message="", error=None, bracket=None):
        traj.ks, traj.ys, traj.fs = np.array(ks), np.array(ys), np.array(fs)
        traj.termination, traj.message, traj.error, traj.bracket = term, message, error, bracket
        if strict and error is not None:
            raise error
        return traj

    for _ in range(max_steps):
        remaining = abs(b - k)
        if remaining <= 1e-15 * max(1.0, abs(b)):
            return finish(Termination.REACHED_END)
        h = min(h, remaining, max_step)
        if h < min_step and h < remaining:
            exc = StepUnderflow(f"step {h:.3e} fell below the minimum {min_step:.3e} at k = {k:.15g}", k=k, step=h)
            return finish(Termination.STEP_UNDERFLOW, str(exc), exc)
        last = h >= remaining
        try:
            y_new, f_new, err = _trial(model, k, y, f, direction * h, rtol, atol)
        except _Blocked:
            s_lo, s_hi, res_lo = 0.0, h, None
            tol = bracket_tol * max(1.0, abs(k))
            while s_hi - s_lo > tol:
                s = 0.5 * (s_lo + s_hi)
                try:
                    res = _trial(model, k, y, f, direction * s, rtol, atol)
                    s_lo, res_lo = s, res
                except _Blocked:
                    s_hi = s
            if res_lo is not None and res_lo[2] > 1.0:
                # the admissible part of the step is not accurate enough yet; march closer first
                traj.rejected += 1
                h = s_lo * max(MIN_FACTOR, SAFETY * res_lo[2] ** -0.2)
                rejected_last = True
                continue
            if res_lo is not None:
                k = k + direction * s_lo
                y, f = res_lo[0], res_lo[1]
                ks.append(k)
                ys.append(y.copy())
                fs.append(f.copy())
                traj.accepted += 1
            k_hi = k + direction * (s_hi - s_lo) if res_lo is not None else k + direction * s_hi
            bracket = (min(k, k_hi), max(k, k_hi))
            exc = SingularLocus(f"flow reached the singular locus between k = {bracket[0]:.15g} "
                                f"and k = {bracket[1]:.15g}", k=k, which="margin",
                                value=model.margin(k, y) if model.margin else None)
            return finish(Termination.SINGULAR_LOCUS, str(exc), exc, bracket)

        if err <= 1.0:
            k = b if last else k + direction * h
            y, f = y_new, f_new
            ks.append(k)
            ys.append(y.copy())
            fs.append(f.copy())
            traj.accepted += 1
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = SAFETY * err ** -PI_EXPONENT * err_prev ** PI_BETA
                factor = min(MAX_FACTOR, max(MIN_FACTOR, factor))
            if rejected_last:
                factor = min(1.0, factor)
            h *= factor
            err_prev = max(err, 1e-4)
            rejected_last = False
        else:
            traj.rejected += 1
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)
            rejected_last = True
    exc = StepUnderflow(f"step budget of {max_steps} exhausted at k = {k:.15g}", k=k, step=h)
    return finish(Termination.STEP_UNDERFLOW, str(exc), exc)


def integrate_fixed_rk4(model: FlowModel, y0, k_span: tuple[float, float], n_steps: int) -> np.ndarray:
    """Classical fourth-order Runge-Kutta with equal steps; returns the state at the end."""
    a, b = map(float, k_span)
    h = (b - a) / n_steps
    y = np.array(y0, dtype=float)
    for i in range(n_steps):
        k = a + i * h
        k1 = model.rhs(k, y)
        k2 = model.rhs(k + h / 2, y + h / 2 * k1)
        k3 = model.rhs(k + h / 2, y + h / 2 * k2)
        k4 = model.rhs(k + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def convergence_order(model: FlowModel, y0, k_span, steps=(10, 20, 40, 100), reference_steps: int = 4000):
    """Slope of log(error) against log(step size) for the fixed-step scheme.

    The reference solution is the same scheme at ``reference_steps`` steps.
    Returns ``(slope, step_sizes, errors)``.
    """
    ref = integrate_fixed_rk4(model, y0, k_span, reference_steps)
    span = abs(k_span[1] - k_span[0])
    hs, errs = [], []
    for n in steps:
        y = integrate_fixed_rk4(model, y0, k_span, n)
        hs.append(span / n)
        errs.append(float(np.max(np.abs(y - ref) / (np.abs(ref) + 1e-300))))
    slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    return slope, np.array(hs), np.array(errs)
