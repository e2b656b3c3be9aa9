"""Equivalent-circuit power system simulator.

Steady-state (split real/imaginary phasor) and transient (trapezoidal,
per-step Newton-Raphson) analyses over one shared set of physical circuit
models, including a synchronous-frame squirrel-cage induction machine whose
long-run transient lands on the steady solution.
"""

from ._kernels import backend as kernel_backend
from .circuit import (
    CircuitGraph,
    Ccvs,
    CoupledInductors,
    CurrentSource,
    IdealSwitch,
    Line,
    Resistor,
    Vccs,
    VoltageSource,
    build_system,
)
from .compare import ComparisonReport, format_report, run_compare
from .errors import (
    DivergenceError,
    EcsimError,
    InvalidParamsError,
    NoConvergenceError,
    ParseError,
    SingularMatrixError,
    ValidationError,
    VoltageCollapseError,
)
from .linalg import LinearSystem, NewtonConfig, SolveReport, lu_solve, newton_solve
from .machine import (
    InductionMotor,
    MotorParams,
    MotorState,
    dq_transform,
    electrical_torque,
    flux_linkages,
    inverse_dq_transform,
    mechanical_derivative,
)
from .netlist import Netlist, load_netlist, parse_netlist
from .output import read_waveforms, write_waveforms
from .steady import (
    PqLoad,
    PvGenerator,
    SplitPhasor,
    SteadyStateSolution,
    im_steady_state,
    solve_power_flow,
    transient_state_from_steady,
)
from .transient import TimeGrid, WaveformSet, run_transient, step

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
