"""Phasor-domain solver over coupled real/imaginary sub-circuits.

Constant-power bus models are non-analytic in the complex voltage (they
involve the conjugate), so the circuit is split: every node carries a
(real, imaginary) voltage pair and every branch a current pair, coupled by
controlled sources. The split system is real-differentiable and one
Newton-Raphson loop solves networks, PQ/PV buses, and the machine model's
frequency-domain form (all frame derivatives zero) together.

Load and generator injections follow

    I_re = (P*V_re + Q*V_im) / |V|^2
    I_im = (P*V_im - Q*V_re) / |V|^2

so that V * conj(I) = P + jQ exactly at convergence. A PV bus carries its
reactive power as an extra unknown plus a voltage-magnitude constraint row.
"""

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import (
    GROUND,
    STEADY,
    TRANSIENT,
    CircuitGraph,
    Element,
    SteadyContext,
    VoltageSource,
    add_linearized_row,
    build_system,
    value_at,
    VOLTAGE_EPS2,
)
from .errors import (
    DivergenceError,
    InvalidParamsError,
    NoConvergenceError,
    SingularMatrixError,
    ValidationError,
    VoltageCollapseError,
)
from .linalg import NewtonConfig, newton_solve
from .machine import InductionMotor, MotorParams


@dataclass(frozen=True)
class SplitPhasor:
    """A complex electrical quantity carried as two coupled real unknowns."""

    re: float
    im: float

    @property
    def magnitude(self):
        return math.hypot(self.re, self.im)

    @property
    def angle(self):
        return math.atan2(self.im, self.re)

    def to_complex(self):
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, z):
        z = complex(z)
        return cls(z.real, z.imag)


def pq_injection_linearized(p, q, v_re, v_im):
    """Injected current of a constant-PQ model and its voltage partials.

    Returns ``(i_re, i_im, ((g_rr, g_ri), (g_ir, g_ii)), w)`` with
    ``w = |V|^2``; raises VoltageCollapseError for |V|^2 <= 1e-12 where the
    model is undefined.
    """
    w = v_re * v_re + v_im * v_im
    if w <= VOLTAGE_EPS2:
        raise VoltageCollapseError(
            f"constant-power model evaluated at |V|^2 = {w:.3e}")
    i_re = (p * v_re + q * v_im) / w
    i_im = (p * v_im - q * v_re) / w
    g_rr = (p - 2.0 * v_re * i_re) / w
    g_ri = (q - 2.0 * v_im * i_re) / w
    g_ir = (-q - 2.0 * v_re * i_im) / w
    g_ii = (p - 2.0 * v_im * i_im) / w
    return i_re, i_im, ((g_rr, g_ri), (g_ir, g_ii)), w


class PqLoad(Element):
    """Constant-PQ load drawing S = P + jQ from its node (steady only)."""

    transient_ok = False

    def __init__(self, name, nodes, p, q):
        super().__init__(name, nodes)
        self.p = float(p)
        self.q = float(q)

    def validate(self):
        if self.nodes[0] == GROUND:
            raise InvalidParamsError(f"{self.name}: load cannot sit on ground")

    def stamp(self, st, lay, x, ctx):
        node = self.nodes[0]
        jr, ji = lay.vr(node), lay.vi(node)
        i_re, i_im, g, _ = pq_injection_linearized(self.p, self.q, x[jr], x[ji])
        add_linearized_row(st, jr, x, [(jr, g[0][0]), (ji, g[0][1])], i_re)
        add_linearized_row(st, ji, x, [(jr, g[1][0]), (ji, g[1][1])], i_im)


class PvGenerator(Element):
    """Generator bus: fixed P injection and voltage magnitude, Q solved."""

    transient_ok = False

    def __init__(self, name, nodes, p_set, v_set):
        super().__init__(name, nodes)
        self.p_set = float(p_set)
        self.v_set = float(v_set)

    def validate(self):
        if self.nodes[0] == GROUND:
            raise InvalidParamsError(f"{self.name}: generator cannot sit on ground")
        if not self.v_set > 0.0:
            raise InvalidParamsError(f"{self.name}: v_set must be > 0")

    def internal_names(self, mode):
        return ("q",) if mode == STEADY else ()

    def stamp(self, st, lay, x, ctx):
        node = self.nodes[0]
        jr, ji = lay.vr(node), lay.vi(node)
        jq = lay.internal(self.name, "q")
        v_re, v_im, q = x[jr], x[ji], x[jq]
        i_re, i_im, g, w = pq_injection_linearized(self.p_set, q, v_re, v_im)
        # injected current enters the node: leaving contribution is -I
        add_linearized_row(st, jr, x,
                           [(jr, -g[0][0]), (ji, -g[0][1]), (jq, -v_im / w)],
                           -i_re)
        add_linearized_row(st, ji, x,
                           [(jr, -g[1][0]), (ji, -g[1][1]), (jq, v_re / w)],
                           -i_im)
        # |V|^2 = v_set^2 keeps the unknown count consistent
        add_linearized_row(st, jq, x, [(jr, 2.0 * v_re), (ji, 2.0 * v_im)],
                           v_re * v_re + v_im * v_im - self.v_set ** 2)

    def init_steady(self, lay, x, omega):
        node = self.nodes[0]
        x[lay.vr(node)] = self.v_set
        x[lay.vi(node)] = 0.0
        x[lay.internal(self.name, "q")] = 0.0


@dataclass
class SteadyStateSolution:
    """Converged split-circuit solution plus per-device quantities."""

    node_voltages: dict
    branch_currents: dict
    q_generators: dict
    motors: dict
    omega: float
    report: object
    x: np.ndarray = field(repr=False, default=None)


def detect_omega(circuit):
    """System angular frequency: highest AC-source frequency, else any
    machine's rated frequency, else 0 (DC phasors)."""
    freqs = [el.freq for el in circuit.elements
             if isinstance(el, (VoltageSource,)) and el.is_ac and el.freq]
    if not freqs:
        freqs = [el.params.freq for el in circuit.elements
                 if isinstance(el, InductionMotor)]
    return 2.0 * math.pi * max(freqs) if freqs else 0.0


def _flat_start(circuit, lay):
    mags = [math.hypot(*el.phasor()) for el in circuit.elements
            if isinstance(el, VoltageSource)]
    v0 = max(mags) if mags else 1.0
    x = np.zeros(lay.dimension)
    for node in range(1, circuit.n_nodes):
        x[lay.vr(node)] = v0
    return x


def solve_power_flow(circuit, cfg=None, omega=None):
    """Newton-Raphson steady solution of the split circuit.

    Flat start (every node at the largest source magnitude, zero angle)
    refined by per-element initial guesses; raises NoConvergenceError with
    the final report when the iteration budget runs out, and propagates a
    VoltageCollapseError only when the *initial* state is already invalid.
    """
    cfg = cfg or NewtonConfig()
    if omega is None:
        omega = detect_omega(circuit)
    if not any(isinstance(el, VoltageSource) for el in circuit.elements):
        raise ValidationError("steady analysis needs at least one voltage source")
    lay = circuit.layout(STEADY)
    ctx = SteadyContext(omega)

    x0 = _flat_start(circuit, lay)
    for el in sorted(circuit.elements, key=lambda e: e.init_priority):
        el.init_steady(lay, x0, omega)

    calls = 0

    def provider(x):
        nonlocal calls
        calls += 1
        return build_system(circuit, x, ctx)

    try:
        x, report = newton_solve(provider, x0, cfg)
    except DivergenceError as exc:
        raise NoConvergenceError(f"steady solve diverged: {exc}") from exc
    except VoltageCollapseError:
        if calls <= 1:
            raise
        raise NoConvergenceError(
            "steady solve drove a bus voltage to collapse") from None
    except SingularMatrixError:
        if calls <= 1:
            raise  # singular at the initial state: structural problem
        raise NoConvergenceError(
            "steady solve hit a singular Jacobian away from the start") from None
    if not report.converged:
        raise NoConvergenceError(
            f"steady solve stopped after {report.iterations_used} iterations "
            f"(update {report.final_update_norm:.3e}, "
            f"residual {report.final_residual_norm:.3e})", report=report)
    return package_solution(circuit, lay, x, omega, report)


def package_solution(circuit, lay, x, omega, report):
    volts = {}
    for node in range(1, circuit.n_nodes):
        volts[circuit.node_names[node]] = SplitPhasor(x[lay.vr(node)], x[lay.vi(node)])
    currents = {}
    q_gens = {}
    motors = {}
    for el in circuit.elements:
        for k in range(el.n_branches):
            key = el.name if el.n_branches == 1 else f"{el.name}.{k}"
            currents[key] = SplitPhasor(x[lay.branch_re(el.name, k)],
                                        x[lay.branch_im(el.name, k)])
        if isinstance(el, PvGenerator):
            q_gens[el.name] = x[lay.internal(el.name, "q")]
        if isinstance(el, InductionMotor):
            q = el.steady_quantities(lay, x)
            q["i_0"] = SplitPhasor.from_complex(q["i_0"])
            motors[el.name] = q
    return SteadyStateSolution(volts, currents, q_gens, motors, omega, report, x)


def sequence_components(phasors):
    """(zero, positive, negative) symmetric components of three phasors."""
    a = cmath.exp(2j * math.pi / 3.0)
    va, vb, vc = (complex(p) for p in phasors)
    zero = (va + vb + vc) / 3.0
    pos = (va + a * vb + a * a * vc) / 3.0
    neg = (va + a * a * vb + a * vc) / 3.0
    return zero, pos, neg


def three_phase_motor_circuit(params, phase_a, freq, pin_speed=None,
                              theta0=0.0, name="motor"):
    """Ideal balanced source feeding one machine; shared by both engines.

    ``phase_a`` is the phase-a voltage phasor (peak, cosine reference); the
    other phases follow at -/+ 120 degrees.
    """
    va = complex(phase_a)
    sources = []
    for label, shift in (("a", 0.0), ("b", -2.0 * math.pi / 3.0),
                         ("c", 2.0 * math.pi / 3.0)):
        ph = va * cmath.exp(1j * shift)
        idx = {"a": 1, "b": 2, "c": 3}[label]
        sources.append(VoltageSource(f"src_{label}", (idx, GROUND),
                                     vpk=abs(ph), freq=freq,
                                     phase=cmath.phase(ph)))
    motor = InductionMotor(name, (1, 2, 3), params,
                           pin_speed=pin_speed, theta0=theta0)
    return CircuitGraph(4, sources + [motor], node_names=["0", "a", "b", "c"])


def im_steady_state(params, terminal, f_source, cfg=None, pin_speed=None,
                    theta0=0.0):
    """Frequency-domain machine solution on an ideal three-phase source.

    ``terminal`` is the three phase-voltage phasors (SplitPhasor or
    complex, peak amplitude, cosine reference). The set must be balanced
    apart from a possible zero-sequence component; rotor speed is solved
    jointly with the electrical unknowns unless ``pin_speed`` fixes it.
    """
    if not isinstance(params, MotorParams):
        raise InvalidParamsError("params must be a MotorParams instance")
    if f_source <= 0:
        raise InvalidParamsError("source frequency must be > 0")
    phasors = [p.to_complex() if isinstance(p, SplitPhasor) else complex(p)
               for p in terminal]
    if len(phasors) != 3:
        raise InvalidParamsError("terminal must supply three phase phasors")
    _, pos, neg = sequence_components(phasors)
    if abs(neg) > 1e-9 * max(abs(pos), 1.0):
        raise InvalidParamsError(
            "negative-sequence terminal voltage is not supported in steady state")
    circuit = three_phase_motor_circuit(params, phasors[0], f_source,
                                        pin_speed=pin_speed, theta0=theta0)
    return solve_power_flow(circuit, cfg, omega=2.0 * math.pi * f_source)


def transient_state_from_steady(circuit, solution, t0=0.0):
    """Map a steady solution onto the transient unknown vector at time t0."""
    lay_t = circuit.layout(TRANSIENT)
    lay_s = circuit.layout(STEADY)
    xs = solution.x
    rot = cmath.exp(1j * solution.omega * t0)
    xt = np.zeros(lay_t.dimension)
    for node in range(1, circuit.n_nodes):
        z = complex(xs[lay_s.vr(node)], xs[lay_s.vi(node)]) * rot
        xt[lay_t.v(node)] = z.real
    for el in circuit.elements:
        for k in range(el.n_branches):
            z = complex(xs[lay_s.branch_re(el.name, k)],
                        xs[lay_s.branch_im(el.name, k)]) * rot
            xt[lay_t.branch(el.name, k)] = z.real
        el.map_internal_state(lay_t, lay_s, xs, xt, t0, solution.omega)
    return xt
