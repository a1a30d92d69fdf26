"""Coupling containers for the three models and their flat-vector views."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

import numpy as np


class _Vector:
    """Mixin giving a dataclass of floats an ordered numpy view."""

    @classmethod
    def names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in fields(cls) if f.name not in cls._meta)

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in self.names()], dtype=float)

    @classmethod
    def from_array(cls, values, **meta):
        kw = dict(zip(cls.names(), (float(v) for v in values)))
        kw.update(meta)
        return cls(**kw)

    def meta(self) -> dict:
        return {m: getattr(self, m) for m in self._meta}

    def with_values(self, values):
        return self.from_array(values, **self.meta())

    def as_dict(self) -> dict:
        return {n: getattr(self, n) for n in self.names()} | self.meta()


@dataclass(frozen=True)
class ScalarCouplings(_Vector):
    U0: float = 0.0
    m1_sq: float = 0.0
    m2_sq: float = 0.0
    lambda1: float = 0.0
    lambda2: float = 0.0
    lambda3: float = 0.0
    mu_sq: float = 1.0

    _meta = ()

    def swapped(self) -> "ScalarCouplings":
        return replace(self, m1_sq=self.m2_sq, m2_sq=self.m1_sq, lambda1=self.lambda2, lambda2=self.lambda1)


@dataclass(frozen=True)
class MSRCouplings(_Vector):
    U0: float = 0.0
    m_sq: float = 0.0
    lam: float = 0.0
    D: float = 0.0
    mu_sq: float = 1.0
    dimension: str = "d4"

    _meta = ("dimension",)

    def __post_init__(self):
        if self.dimension not in ("d4", "d3"):
            raise ValueError(f"dimension must be 'd4' or 'd3', got {self.dimension!r}")


@dataclass(frozen=True)
class DiracCouplings(_Vector):
    U0: float = 0.0
    m: float = 0.0
    lam: float = 0.0
    # carried as metadata only; the flow equations do not depend on it
    dimension: str = "d2"

    _meta = ("dimension",)


def column_names(state) -> tuple[str, ...]:
    """Public column names, spelling the Python-reserved coupling as ``lambda``."""
    return tuple("lambda" if n == "lam" else n for n in type(state).names())


__all__ = ["ScalarCouplings", "MSRCouplings", "DiracCouplings", "column_names"]
