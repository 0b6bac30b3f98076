"""Exceptions raised by the lambda-system simulator."""


class LambdaSystemError(Exception):
    """Base class for every error the simulator raises on purpose."""


class InvalidParameterError(LambdaSystemError, ValueError):
    """A physical or numerical parameter is outside its allowed range."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class InvalidStateError(LambdaSystemError, ValueError):
    """A density vector or density matrix violates its invariants."""


class StepSizeError(LambdaSystemError):
    """The fixed-step integrator lost probability conservation."""

    def __init__(self, residual, dt):
        self.residual = residual
        self.dt = dt
        super().__init__(
            f"population sum drifted by {residual:.3g} with dt={dt:g} ns; "
            f"use a smaller dt"
        )


class IllConditionedError(LambdaSystemError):
    """The generator is too close to defective for the eigen-propagator."""

    def __init__(self, omega, condition):
        self.omega = omega
        self.condition = condition
        super().__init__(
            f"generator at omega={omega:g} GHz is nearly defective "
            f"(eigenvector condition number {condition:.3g})"
        )


class BracketError(LambdaSystemError, ValueError):
    """A root-finding bracket does not straddle the transition."""

    def __init__(self, lo, hi, message='bracket does not straddle the transition'):
        self.lo = lo
        self.hi = hi
        super().__init__(f"[{lo:g}, {hi:g}]: {message}")


class InsufficientSignalError(LambdaSystemError):
    """A decay fit residual is too small (or malformed) to fit."""

    def __init__(self, component, message):
        self.component = component
        super().__init__(f"{component}: {message}")


class NumericalFailureError(LambdaSystemError):
    """A solver produced a result that breaks a guaranteed property."""


class ConfigError(LambdaSystemError):
    """A scenario file could not be read, parsed or validated."""

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        prefix = ''
        if line is not None:
            prefix += f"line {line}: "
        if key is not None:
            prefix += f"{key}: "
        super().__init__(prefix + message)
