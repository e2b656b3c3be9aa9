"""Exception types shared across the simulator."""


class EcsimError(Exception):
    """Base class for every error raised by this package."""


class SingularMatrixError(EcsimError):
    """A pivot fell below the singularity threshold during factorization.

    Usually an ill-posed circuit: floating node, redundant constraint
    (e.g. two ideal voltage sources in parallel), or missing ground.
    """


class DivergenceError(EcsimError):
    """Newton-Raphson update norm exceeded the divergence limit."""


class NoConvergenceError(EcsimError):
    """A nonlinear solve exhausted its iteration budget.

    Carries the final :class:`~ecsim.linalg.SolveReport` and, for transient
    runs, the simulation time of the failing step.
    """

    def __init__(self, message, report=None, time=None):
        super().__init__(message)
        self.report = report
        self.time = time


class VoltageCollapseError(EcsimError):
    """A constant-power model was evaluated at (near-)zero voltage."""


class InvalidParamsError(EcsimError, ValueError):
    """Element or machine parameters violate their invariants."""


class NonPositiveConductanceError(InvalidParamsError):
    """Resistor stamp requested with conductance <= 0."""


class InvalidInductanceError(InvalidParamsError):
    """Inductance matrix is not symmetric with positive self terms."""


class MissingBranchError(EcsimError):
    """An element needs a branch-current unknown it does not own."""


class UnownedUnknownError(EcsimError):
    """The unknown layout is not a bijection (slot unclaimed or claimed twice)."""


class NetlistError(EcsimError):
    """Base for netlist problems; carries the 1-based source line."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}: " if column is None else f"line {line}, col {column}: "
        super().__init__(loc + message)
        self.line = line
        self.column = column


class ParseError(NetlistError):
    """Malformed netlist syntax (unknown record, bad number, unknown key)."""


class ValidationError(NetlistError):
    """Well-formed netlist with inconsistent semantics (bad topology or values)."""
