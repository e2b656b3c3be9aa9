"""Steady vs transient agreement report for machine circuits.

Runs both analyses from the same netlist and tabulates the six machine
quantities (rotor speed, electric torque, four dq currents) side by side.
A long-enough transient should land on the steady solution; the report's
match flag checks every relative difference against the tolerance.
"""

from dataclasses import dataclass

from .errors import ValidationError
from .linalg import NewtonConfig
from .steady import solve_power_flow
from .transient import TimeGrid, run_transient

#: Agreement threshold: three significant digits.
MATCH_TOLERANCE = 1e-3

_QUANTITIES = (
    ("rotor speed (rad/s)", "omega_r", "wr"),
    ("electric torque (N.m)", "torque", "te"),
    ("stator d-axis current (A)", "i_ds", "ids"),
    ("stator q-axis current (A)", "i_qs", "iqs"),
    ("rotor d-axis current (A)", "i_dr", "idr"),
    ("rotor q-axis current (A)", "i_qr", "iqr"),
)


@dataclass
class ComparisonRow:
    quantity: str
    steady: float
    transient: float
    abs_diff: float
    rel_diff: float


@dataclass
class ComparisonReport:
    rows: list
    t_end: float
    max_rel_diff: float
    tolerance: float

    @property
    def matched(self):
        return self.max_rel_diff <= self.tolerance


def run_compare(netlist, dt=None, t_end=None, tol=None, max_nr=None):
    """Solve steady and transient for the netlist's machine and compare.

    Analysis parameters default from the netlist's ``analysis`` record;
    keyword arguments override. The transient starts from zero state
    (start-up) and is evaluated at its final time point.
    """
    circuit = netlist.circuit()
    motors = netlist.motor_elements()
    if len(motors) != 1:
        raise ValidationError("compare needs a netlist with exactly one motor")
    motor = motors[0]

    spec = netlist.analysis
    dt = dt if dt is not None else (spec.dt if spec else 1e-4)
    t_end = t_end if t_end is not None else (spec.t_end if spec else None)
    if t_end is None:
        raise ValidationError("compare needs tend= (analysis record or flag)")
    tol = tol if tol is not None else (spec.tol if spec else 1e-9)
    max_nr = max_nr if max_nr is not None else (spec.max_nr if spec else 50)
    t_start = spec.t_start if spec else 0.0
    cfg = NewtonConfig(abs_tolerance=tol, max_iterations=max_nr)

    steady = solve_power_flow(circuit, cfg).motors[motor.name]
    waves = run_transient(circuit, TimeGrid(t_start, t_end, dt), cfg)

    rows = []
    for label, steady_key, col in _QUANTITIES:
        s_val = steady[steady_key]
        t_val = waves.final(f"{motor.name}.{col}")
        diff = abs(t_val - s_val)
        rows.append(ComparisonRow(label, s_val, t_val, diff,
                                  diff / max(abs(s_val), 1e-12)))
    max_rel = max(r.rel_diff for r in rows)
    return ComparisonReport(rows, t_end, max_rel, MATCH_TOLERANCE)


def format_report(report):
    head = (f"{'quantity':<28}{'steady':>14}{'transient':>14}"
            f"{'abs diff':>12}{'rel diff':>12}")
    lines = [head, "-" * len(head)]
    for r in report.rows:
        lines.append(f"{r.quantity:<28}{r.steady:>14.6g}{r.transient:>14.6g}"
                     f"{r.abs_diff:>12.3e}{r.rel_diff:>12.3e}")
    verdict = "MATCH" if report.matched else "MISMATCH"
    lines.append(f"max relative difference {report.max_rel_diff:.3e} "
                 f"(tolerance {report.tolerance:.1e}) at t = {report.t_end:g} s "
                 f"-> {verdict}")
    return "\n".join(lines)
