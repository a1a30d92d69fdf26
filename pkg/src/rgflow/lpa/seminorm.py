"""Discrete sup-seminorms of a potential surface."""

from __future__ import annotations

import numpy as np

from .grid import PotentialSurface


def derivative_table(values: np.ndarray, spacing: tuple[float, float], n: int) -> dict[tuple[int, int], np.ndarray]:
    """All partial derivatives D^(a,b) with a + b <= n.

    Built by repeated second-order differences, central inside and one-sided
    at the edges (``np.gradient`` with ``edge_order=2``).
    """
    hx, hy = spacing
    table = {(0, 0): values}
    for order in range(1, n + 1):
        for a in range(order + 1):
            b = order - a
            if a > 0:
                table[(a, b)] = np.gradient(table[(a - 1, b)], hx, axis=0, edge_order=2)
            else:
                table[(a, b)] = np.gradient(table[(a, b - 1)], hy, axis=1, edge_order=2)
    return table


def seminorm_estimate(surface: PotentialSurface, n: int) -> float:
    """sup over nodes and |alpha| <= n of |D^alpha u|."""
    if not 0 <= n <= 4:
        raise ValueError(f"seminorm order must be in 0..4, got {n}")
    table = derivative_table(surface.values, surface.grid.spacing, n)
    return max(float(np.max(np.abs(d))) for d in table.values())


def seminorms(surface: PotentialSurface, n_max: int = 4) -> list[float]:
    """[|u|_0, ..., |u|_n_max], sharing one derivative table."""
    table = derivative_table(surface.values, surface.grid.spacing, n_max)
    out, running = [], 0.0
    for n in range(n_max + 1):
        running = max([running] + [float(np.max(np.abs(d))) for (a, b), d in table.items() if a + b == n])
        out.append(running)
    return out
