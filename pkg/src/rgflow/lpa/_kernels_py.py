"""Numpy reference implementation of the nodal kernels.

Signatures match the compiled ``_kernels`` module exactly: results are written
into caller-provided arrays and the return value is the flat interior index of
the first node whose log argument is inadmissible, or -1.
"""

from __future__ import annotations

import numpy as np

INV_8PI2 = 1.0 / (8.0 * np.pi ** 2)
INV_4PI = 1.0 / (4.0 * np.pi)


def _first_bad(arg: np.ndarray, floor: float) -> int:
    bad = np.flatnonzero(~(arg > floor))
    return int(bad[0]) if bad.size else -1


def density(msq: np.ndarray, k: float, mu_sq: float, dim4: bool, eps: float,
            out_b: np.ndarray, out_sigma: np.ndarray) -> int:
    """Flow density B(M^2) and its derivative in M^2 at every node."""
    arg = k * k + msq
    if not dim4:
        out_b[...] = k * INV_4PI * arg
        out_sigma[...] = k * INV_4PI
        return -1
    bad = _first_bad(arg.ravel(), eps * mu_sq)
    if bad >= 0:
        return bad
    log = np.log(arg / mu_sq)
    out_b[...] = k * INV_8PI2 * arg * log
    out_sigma[...] = k * INV_8PI2 * (log + 1.0)
    return -1


def scalar_rhs(u: np.ndarray, hx: float, hy: float, k: float, mu_sq: float, eps: float,
               out_rhs: np.ndarray, out_m1: np.ndarray, out_m2: np.ndarray,
               out_s1: np.ndarray, out_s2: np.ndarray) -> int:
    """Two-scalar nodal RHS from pure second differences on interior nodes."""
    c = u[1:-1, 1:-1]
    out_m1[...] = (u[2:, 1:-1] - 2.0 * c + u[:-2, 1:-1]) / (hx * hx)
    out_m2[...] = (u[1:-1, 2:] - 2.0 * c + u[1:-1, :-2]) / (hy * hy)
    floor = eps * mu_sq
    bad = _first_bad(np.minimum(k * k + out_m1, k * k + out_m2).ravel(), floor)
    if bad >= 0:
        return bad
    l1 = np.log((k * k + out_m1) / mu_sq)
    l2 = np.log((k * k + out_m2) / mu_sq)
    pre = k * INV_8PI2
    out_rhs[...] = pre * ((k * k + out_m1) * l1 + (k * k + out_m2) * l2)
    out_s1[...] = pre * (l1 + 1.0)
    out_s2[...] = pre * (l2 + 1.0)
    return -1


def mixed_difference(u: np.ndarray, hx: float, hy: float, out: np.ndarray) -> None:
    """Central mixed second difference d^2 u / dx dy on interior nodes."""
    out[...] = (u[2:, 2:] - u[2:, :-2] - u[:-2, 2:] + u[:-2, :-2]) / (4.0 * hx * hy)
