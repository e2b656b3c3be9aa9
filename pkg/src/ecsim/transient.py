"""Fixed-step time-domain engine.

Dynamic elements are replaced by their trapezoidal companion models and the
resulting nonlinear algebraic circuit is solved by Newton-Raphson at every
time point. History terms (branch currents, inductive voltages, machine
flux derivatives) are carried in a HistoryState and refreshed from each
solved step.

The run starts with a bootstrap solve at t_start: dynamic states are frozen
at their initial values and the rest of the circuit is solved once, which
recovers algebraically consistent derivative terms. This keeps the first
trapezoidal step second-order even when sources are already active at
t_start (a zero-derivative bootstrap would degrade the whole run to first
order).

With ``max_iterations == 1`` the engine performs exactly one linearized
solve per step and accepts the result; that emulates predictor-corrector
integrators that never re-factorize within a step. Any other iteration
budget is fail-fast: an unconverged step aborts the run with its timestamp.
"""

from dataclasses import dataclass

import numpy as np

from .circuit import (
    TRANSIENT,
    BootstrapContext,
    TransientContext,
    build_system,
)
from .errors import NoConvergenceError
from .linalg import NewtonConfig, lu_solve, newton_solve


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid: step count is round((t_end - t_start) / dt)."""

    t_start: float
    t_end: float
    dt: float

    def __post_init__(self):
        if not self.dt > 0.0:
            raise ValueError("dt must be > 0")
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.n_steps < 1:
            raise ValueError("grid shorter than one step")

    @property
    def n_steps(self):
        return int(round((self.t_end - self.t_start) / self.dt))

    def times(self):
        return self.t_start + self.dt * np.arange(self.n_steps + 1)


class HistoryState:
    """Time, last solved unknown vector, and per-element history records."""

    __slots__ = ("time", "x", "records")

    def __init__(self, time, x, records):
        self.time = float(time)
        self.x = x
        self.records = records


class WaveformSet:
    """Time column plus named signal columns of equal length."""

    def __init__(self, time, columns):
        self.time = np.asarray(time, dtype=float)
        self.columns = {str(k): np.asarray(v, dtype=float) for k, v in columns.items()}
        for name, col in self.columns.items():
            if col.shape != self.time.shape:
                raise ValueError(f"column {name!r} length differs from time base")
        if np.any(np.diff(self.time) <= 0.0):
            raise ValueError("time column must be strictly increasing")

    @property
    def names(self):
        return list(self.columns)

    def __len__(self):
        return self.time.size

    def __getitem__(self, name):
        return self.columns[name]

    def final(self, name):
        return float(self.columns[name][-1])


def default_initial_state(circuit):
    """Zero start refined by element defaults (inductor i0 and the like)."""
    lay = circuit.layout(TRANSIENT)
    x0 = np.zeros(lay.dimension)
    for el in circuit.elements:
        el.set_initial_state(lay, x0)
    return x0


def bootstrap_history(circuit, x0, t0):
    """Initial-time solve with dynamic states frozen.

    Returns the HistoryState for the first step; its ``x`` is the solved
    vector (consistent node voltages and branch currents around the frozen
    states).
    """
    lay = circuit.layout(TRANSIENT)
    system = build_system(circuit, np.asarray(x0, dtype=float), BootstrapContext(t0))
    solved = lu_solve(system)
    records = {el.name: el.init_history(lay, x0, solved, t0)
               for el in circuit.elements if el.has_history}
    return HistoryState(t0, solved, records)


def step(circuit, hist, dt, cfg=None):
    """Advance one trapezoidal step from ``hist.time`` to ``hist.time + dt``.

    Returns (state, new_history, report). Unconverged steps raise
    NoConvergenceError carrying the failing time, except in the
    single-iteration mode which accepts its one linearized solve.
    """
    cfg = cfg or NewtonConfig()
    t_new = hist.time + dt
    ctx = TransientContext(t_new, dt, hist)
    x_new, report = newton_solve(lambda x: build_system(circuit, x, ctx),
                                 hist.x, cfg)
    if not report.converged and cfg.max_iterations > 1:
        raise NoConvergenceError(
            f"time step at t = {t_new:.9g} s did not converge "
            f"(residual {report.final_residual_norm:.3e})",
            report=report, time=t_new)
    lay = circuit.layout(TRANSIENT)
    records = {el.name: el.update_history(hist.records[el.name], lay, x_new,
                                          t_new, dt)
               for el in circuit.elements if el.has_history}
    return x_new, HistoryState(t_new, x_new, records), report


def run_transient(circuit, grid, cfg=None, initial=None, report_sink=None):
    """Run the grid and collect every unknown plus element extras per point.

    ``initial`` overrides the default (zero + element defaults) start
    state; ``report_sink``, when given a list, receives the per-step
    SolveReport objects (degraded-mode studies read residuals from it).
    """
    cfg = cfg or NewtonConfig()
    lay = circuit.layout(TRANSIENT)
    x0 = default_initial_state(circuit) if initial is None else \
        np.array(initial, dtype=float, copy=True)
    if x0.shape != (lay.dimension,):
        raise ValueError("initial state length does not match unknown count")

    names = lay.unknown_names(circuit)
    extra_owners = [el for el in circuit.elements if el.signal_names()]
    for el in extra_owners:
        names = names + list(el.signal_names())

    times = grid.times()
    data = np.empty((times.size, len(names)))

    hist = bootstrap_history(circuit, x0, grid.t_start)

    def record(row, x, t):
        data[row, :lay.dimension] = x
        col = lay.dimension
        for el in extra_owners:
            vals = el.signal_values(lay, x, t)
            data[row, col:col + len(vals)] = vals
            col += len(vals)

    record(0, hist.x, grid.t_start)
    for k in range(1, grid.n_steps + 1):
        x, hist, report = step(circuit, hist, grid.dt, cfg)
        if report_sink is not None:
            report_sink.append(report)
        record(k, x, times[k])

    columns = {name: data[:, i] for i, name in enumerate(names)}
    return WaveformSet(times, columns)
