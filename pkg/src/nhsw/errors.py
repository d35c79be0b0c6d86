"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class NHSWError(Exception):
    """Base class for library errors."""


class ContractError(NHSWError, ValueError):
    """Input violates a documented precondition (length mismatch, non-finite data...)."""


class OutOfDomainError(NHSWError, ValueError):
    pass


class DegenerateColumnError(NHSWError, ValueError):
    pass


class SolverFailure(NHSWError, ArithmeticError):
    """Tridiagonal elimination hit a (numerically) zero pivot."""

    def __init__(self, message: str, pivot: int):
        super().__init__(f"{message} (pivot index {pivot})")
        self.pivot = pivot


class WetIntervalError(NHSWError, ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (cell {index})")
        self.index = index


class IntegrationError(NHSWError, ArithmeticError):
    def __init__(self, message: str, t: float):
        super().__init__(f"{message} at t={t:.6g}")
        self.t = t


class TranscriticalError(NHSWError, ArithmeticError):
    def __init__(self, x: float, factor: float):
        super().__init__(
            f"gH/2 - Q0^2/H^2 = {factor:.3e} near x={x:.6g}: the stationary ODE is singular"
        )
        self.x = x
        self.factor = factor


class PositivityError(NHSWError, ArithmeticError):
    def __init__(self, message: str, x: float):
        super().__init__(f"{message} at x={x:.6g}")
        self.x = x


class StepRejected(NHSWError, ValueError):
    def __init__(self, dt: float, dt_max: float):
        super().__init__(f"dt={dt:.6g} violates the CFL bound, admissible dt={dt_max:.6g}")
        self.dt = dt
        self.dt_max = dt_max


class ConfigError(NHSWError, ValueError):
    pass
