"""Linear system container, direct solve, and the damped Newton-Raphson driver.

Both analysis engines reduce their work to the same primitive: a callback
that assembles the circuit linearized at the current iterate (companion
models for dynamics, first-order Taylor for nonlinear elements) in the
normal form ``A(x_k) @ x = b(x_k)``. Because every stamped row is the exact
Taylor model of its equation at the iterate, ``A(x) @ x - b(x)`` is the true
nonlinear residual at ``x``, which is what the convergence test uses.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DivergenceError, SingularMatrixError

DIVERGENCE_LIMIT = 1e8


class LinearSystem:
    """Square real system assembled from additive COO entries plus a RHS.

    Duplicate (row, col) entries accumulate; this is what makes per-element
    stamping composable.
    """

    __slots__ = ("dimension", "rows", "cols", "vals", "rhs")

    def __init__(self, dimension, rows, cols, vals, rhs):
        self.dimension = int(dimension)
        self.rows = np.ascontiguousarray(rows, dtype=np.intc)
        self.cols = np.ascontiguousarray(cols, dtype=np.intc)
        self.vals = np.ascontiguousarray(vals, dtype=np.float64)
        self.rhs = np.ascontiguousarray(rhs, dtype=np.float64)
        if not (self.rows.shape == self.cols.shape == self.vals.shape):
            raise ValueError("rows, cols, vals must have identical shapes")
        if self.rhs.shape != (self.dimension,):
            raise ValueError("rhs length must equal dimension")
        if self.rows.size:
            lo = min(self.rows.min(), self.cols.min())
            hi = max(self.rows.max(), self.cols.max())
            if lo < 0 or hi >= self.dimension:
                raise ValueError("entry index outside system dimension")

    @classmethod
    def from_entries(cls, dimension, entries, rhs=None):
        """Build from an iterable of (row, col, value); rhs defaults to zero."""
        entries = list(entries)
        rows = [e[0] for e in entries]
        cols = [e[1] for e in entries]
        vals = [e[2] for e in entries]
        if rhs is None:
            rhs = np.zeros(dimension)
        return cls(dimension, rows, cols, vals, rhs)

    @property
    def entries(self):
        return list(zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist()))

    def to_dense(self):
        return _kernels.assemble_dense(self.dimension, self.rows, self.cols, self.vals)

    def matvec(self, x):
        x = np.ascontiguousarray(x, dtype=np.float64)
        return _kernels.coo_matvec(self.rows, self.cols, self.vals, x, self.dimension)

    def residual_norm(self, x):
        """inf-norm of A @ x - rhs."""
        r = self.matvec(x) - self.rhs
        return float(np.max(np.abs(r))) if r.size else 0.0


@dataclass(frozen=True)
class NewtonConfig:
    """Newton-Raphson controls.

    ``max_iterations=1`` emulates predictor-corrector style integrators:
    exactly one linearized solve per call, convergence reported honestly.
    ``damping_factor`` scales the update (x <- x + a*dx) for hard starts.
    """

    abs_tolerance: float = 1e-9
    max_iterations: int = 50
    damping_factor: float = 1.0

    def __post_init__(self):
        if not self.abs_tolerance > 0:
            raise ValueError("abs_tolerance must be > 0")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0.0 < self.damping_factor <= 1.0:
            raise ValueError("damping_factor must be in (0, 1]")


@dataclass
class SolveReport:
    converged: bool
    iterations_used: int
    final_update_norm: float
    final_residual_norm: float
    #: (update_norm, residual_norm) per iteration, in order.
    history: list = field(default_factory=list)


def _inf_norm(v):
    return float(np.max(np.abs(v))) if v.size else 0.0


def lu_solve(system):
    """Direct solve by partial-pivot LU after COO accumulation.

    Raises SingularMatrixError when a pivot falls below 1e-14 relative to
    the largest accumulated entry.
    """
    a = system.to_dense()
    x = system.rhs.copy()
    status = _kernels.lu_solve_inplace(a, x)
    if status:
        raise SingularMatrixError(
            f"zero pivot in column {status - 1} of {system.dimension}x"
            f"{system.dimension} system (floating node or redundant constraint?)")
    return x


def newton_solve(stamp_provider, x0, cfg=None):
    """Damped Newton-Raphson on a stamp-provider callback.

    ``stamp_provider(x)`` must return the LinearSystem linearized at ``x``
    with the same dimension as ``x0``. Convergence requires BOTH the update
    inf-norm and the residual inf-norm (evaluated at the new iterate) to be
    at or below ``cfg.abs_tolerance``. Each norm is measured relative to
    the solution scale: update over max(1, ||x||_inf), residual over
    max(1, ||rhs||_inf). For per-unit networks (unit-sized x and rhs) these
    coincide with the raw norms; for SI-scale systems (matrix entries
    2L/dt, hundreds of volts) they keep tolerances near the float64
    cancellation floor meaningful. Divergence is judged on the raw update.

    Returns ``(x, SolveReport)``; raises DivergenceError when the update
    norm exceeds DIVERGENCE_LIMIT or iterates stop being finite, and
    propagates SingularMatrixError from the linear solves.
    """
    cfg = cfg or NewtonConfig()
    x = np.array(x0, dtype=np.float64, copy=True)
    system = stamp_provider(x)
    if system.dimension != x.size:
        raise ValueError("stamp_provider dimension does not match x0")

    history = []
    update_norm = np.inf
    residual_norm = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        x_sol = lu_solve(system)
        if cfg.damping_factor == 1.0:
            x_new = x_sol  # exact full step; repeat solves reach a true fixed point
        else:
            x_new = x + cfg.damping_factor * (x_sol - x)
        if not np.all(np.isfinite(x_new)):
            raise DivergenceError("iterate is not finite")
        raw_update = _inf_norm(x_new - x)
        if raw_update > DIVERGENCE_LIMIT:
            raise DivergenceError(f"update norm {raw_update:.3e} exceeds limit")
        update_norm = raw_update / max(1.0, _inf_norm(x_new))
        system = stamp_provider(x_new)
        if system.dimension != x.size:
            raise ValueError("stamp_provider changed system dimension")
        residual_norm = system.residual_norm(x_new) / max(1.0, _inf_norm(system.rhs))
        history.append((update_norm, residual_norm))
        x = x_new
        if update_norm <= cfg.abs_tolerance and residual_norm <= cfg.abs_tolerance:
            converged = True
            break

    report = SolveReport(converged, iterations, update_norm, residual_norm, history)
    return x, report
