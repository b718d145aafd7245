"""
Solver Errors - Centralized exception hierarchy.

Every error carries the process exit code the CLI reports for it:
2 for invalid input or configuration, 3 for solver failures.
"""


class NetsecError(Exception):
    """Base class for all library errors."""
    exit_code: int = 3


# =============================================================================
# Input errors (exit 2)
# =============================================================================

class DomainError(NetsecError, ValueError):
    """A probability argument lies outside the function's domain or is not finite."""
    exit_code = 2


class WeightingSpecError(NetsecError, ValueError):
    """Invalid weighting parameters, or a linear weighting where curvature is required."""
    exit_code = 2


class ParameterError(NetsecError, ValueError):
    """Parameter ordering or precondition violated."""
    exit_code = 2


class GraphError(NetsecError, ValueError):
    """Invalid graph input."""
    exit_code = 2


class GraphParseError(GraphError):
    """Malformed edge-list text."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(f"{prefix}{message}")


class SelfLoopError(GraphParseError):
    """An edge joins a node to itself."""


class DuplicateEdgeError(GraphParseError):
    """The same unordered edge appears twice."""


class GraphParameterError(GraphError):
    """Generator parameters describe an impossible graph."""


class SizeError(NetsecError, ValueError):
    """An enumeration was requested beyond its size cap."""
    exit_code = 2


class ConnectivityError(NetsecError, ValueError):
    """The operation requires a connected graph."""
    exit_code = 2


class HeterogeneityError(NetsecError, ValueError):
    """The operation requires homogeneous players."""
    exit_code = 2


class ConfigError(NetsecError, ValueError):
    """A game configuration file could not be read or validated."""
    exit_code = 2


# =============================================================================
# Solver errors (exit 3)
# =============================================================================

class BracketError(NetsecError):
    """Function values at the bracket endpoints share a sign."""


class NonFiniteError(NetsecError):
    """The function returned NaN or infinity inside the bracket."""


class ConvergenceError(NetsecError):
    """Tolerance not reached within the iteration limit."""


class UndefinedCriticalPointError(NetsecError):
    """X is undefined because dc/L does not exceed the minimum of w'."""


class SingularSystemError(NetsecError):
    """(A+I)s = d∘(1−X) is singular and inconsistent."""


class IntegrityError(NetsecError):
    """A solver result violates its bounds by more than the allowed slack."""


class SweepError(NetsecError):
    """Every point of a parameter sweep failed."""
