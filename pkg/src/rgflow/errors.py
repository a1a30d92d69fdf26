"""Exception hierarchy shared by the algebra, flow and grid modules."""

from __future__ import annotations


class RGFlowError(Exception):
    """Base class for every error raised by the package."""


# symbolic algebra

class AlgebraError(RGFlowError):
    pass


class UnknownSpecies(AlgebraError):
    pass


class ModelMismatch(AlgebraError):
    pass


class IncompleteAssignment(AlgebraError):
    pass


class EmptyOperandList(AlgebraError):
    pass


class NonPerturbativeVertex(AlgebraError):
    pass


class ChannelViolation(AlgebraError):
    pass


# ODE flows

class FlowError(RGFlowError):
    pass


class SingularLocus(FlowError):
    """A log argument k^2 + m^2 dropped to the singular threshold."""

    def __init__(self, message: str, k: float | None = None, which: str | None = None,
                 value: float | None = None):
        super().__init__(message)
        self.k = k
        self.which = which
        self.value = value


class StepUnderflow(FlowError):
    def __init__(self, message: str, k: float | None = None, step: float | None = None):
        super().__init__(message)
        self.k = k
        self.step = step


# grid solver

class GridError(RGFlowError):
    """Errors carrying the scale, grid node and offending value."""

    def __init__(self, message: str, k: float | None = None, node=None, value: float | None = None):
        super().__init__(message)
        self.k = k
        self.node = node
        self.value = value


class LogDomain(GridError):
    pass


class StabilityGuard(GridError):
    pass


class SigmaNonPositive(GridError):
    pass


class KRatioExceeded(GridError):
    pass


class IllConditionedFit(GridError):
    pass


class BoundaryMismatch(GridError):
    pass


# configuration

class SchemaViolation(RGFlowError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)
