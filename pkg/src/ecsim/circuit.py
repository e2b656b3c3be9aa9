"""Circuit description and the stamping machinery shared by both analyses.

The formulation is augmented nodal: unknowns are the non-ground node
voltages, then one explicit branch-current unknown per voltage-defined,
inductive, or switch branch, then device-internal states (machine currents,
rotor speed, generator reactive power). Explicit branch currents are what
let coupled inductors stamp naturally and let ideal switches swap between
zero impedance and zero conductance with no surrogate resistances.

In steady state every electrical quantity is carried as a coupled
real/imaginary pair (two real sub-circuits), which keeps all stamped
functions real-differentiable so Newton-Raphson applies even to the
conjugate-based constant-power models.

Every stamped row is the exact first-order model of its equation at the
given iterate, in the normal form A(x_k) @ x = b(x_k). Consequently
``A(x) @ x - b(x)`` is the true nonlinear residual at ``x`` and linear
rows are represented exactly.

Sign conventions
    KCL rows sum the currents *leaving* a node to zero.
    Passive branch currents (switch, inductor, line, ccvs) flow from n+ to
    n- through the element; source branch currents are the current
    delivered out of the n+ terminal.
"""

import math

import numpy as np

from .companion import CoilHistory, companion_terms, validate_inductance
from .errors import (
    InvalidParamsError,
    MissingBranchError,
    NonPositiveConductanceError,
    UnownedUnknownError,
    ValidationError,
)
from .linalg import LinearSystem

GROUND = 0

STEADY = "steady"
TRANSIENT = "transient"

# Constant-power models are undefined at zero voltage.
VOLTAGE_EPS2 = 1e-12


class SteadyContext:
    mode = STEADY

    def __init__(self, omega):
        self.omega = float(omega)


class TransientContext:
    mode = TRANSIENT

    def __init__(self, t_new, dt, history):
        self.time = float(t_new)
        self.dt = float(dt)
        self.history = history


class BootstrapContext:
    """Initial-time solve with dynamic states frozen.

    Used once per run to recover algebraically consistent derivative terms
    (inductive voltages, flux derivatives) before the first step.
    """

    mode = TRANSIENT

    def __init__(self, t0):
        self.time = float(t0)


class Stamp:
    """Additive contributions of one or more elements: COO entries plus RHS."""

    __slots__ = ("rows", "cols", "vals", "rhs_rows", "rhs_vals")

    def __init__(self):
        self.rows = []
        self.cols = []
        self.vals = []
        self.rhs_rows = []
        self.rhs_vals = []

    def add(self, row, col, val):
        """Add a matrix entry; ground positions (index < 0) are dropped."""
        if row >= 0 and col >= 0:
            self.rows.append(row)
            self.cols.append(col)
            self.vals.append(val)

    def add_rhs(self, row, val):
        if row >= 0:
            self.rhs_rows.append(row)
            self.rhs_vals.append(val)

    @property
    def matrix_entries(self):
        return list(zip(self.rows, self.cols, self.vals))

    @property
    def rhs_entries(self):
        return list(zip(self.rhs_rows, self.rhs_vals))

    def merge(self, other):
        self.rows.extend(other.rows)
        self.cols.extend(other.cols)
        self.vals.extend(other.vals)
        self.rhs_rows.extend(other.rhs_rows)
        self.rhs_vals.extend(other.rhs_vals)


def value_at(x, idx):
    """Unknown value with ground folded in as exactly 0."""
    return x[idx] if idx >= 0 else 0.0


def add_linearized_row(st, row, x, cols_coeffs, f_value):
    """Stamp one row of the Newton normal form J @ x_new = J @ x_k - F(x_k).

    ``cols_coeffs`` holds (column, dF/dx_col) pairs; ``f_value`` is the
    equation residual at the iterate ``x``. Ground columns contribute
    nothing (their value is identically zero).
    """
    if row < 0:
        return
    rhs = -f_value
    for col, coeff in cols_coeffs:
        if col >= 0:
            st.add(row, col, coeff)
            rhs += coeff * x[col]
    st.add_rhs(row, rhs)


# ---------------------------------------------------------------------------
# Canonical stamp patterns (also used directly by tests)
# ---------------------------------------------------------------------------

def stamp_resistor(node_p, node_n, conductance):
    """2x2 nodal conductance pattern (+g, -g; -g, +g) at the two positions."""
    if not conductance > 0.0:
        raise NonPositiveConductanceError(f"conductance must be > 0, got {conductance}")
    st = Stamp()
    st.add(node_p, node_p, conductance)
    st.add(node_p, node_n, -conductance)
    st.add(node_n, node_p, -conductance)
    st.add(node_n, node_n, conductance)
    return st


def stamp_voltage_source(node_p, node_n, branch, value):
    """Fixed potential difference with an explicit (delivered) branch current.

    The branch row enforces V+ - V- = value; the branch current enters both
    KCL rows with the generator sign (current delivered out of n+).
    """
    if branch is None or branch < 0:
        raise MissingBranchError("voltage source needs a branch-current unknown")
    st = Stamp()
    st.add(node_p, branch, -1.0)
    st.add(node_n, branch, 1.0)
    st.add(branch, node_p, 1.0)
    st.add(branch, node_n, -1.0)
    st.add_rhs(branch, value)
    return st


def stamp_ideal_switch(node_p, node_n, branch, closed):
    """Ideal switch: closed pins V+ - V- = 0, open pins I_branch = 0.

    Both states keep the same unknown set, so toggling mid-run changes the
    topology without any large/small surrogate conductances.
    """
    if branch is None or branch < 0:
        raise MissingBranchError("switch needs a branch-current unknown")
    st = Stamp()
    st.add(node_p, branch, 1.0)
    st.add(node_n, branch, -1.0)
    if closed:
        st.add(branch, node_p, 1.0)
        st.add(branch, node_n, -1.0)
    else:
        st.add(branch, branch, 1.0)
    return st


# ---------------------------------------------------------------------------
# Unknown layout
# ---------------------------------------------------------------------------

class UnknownLayout:
    """Bijection between unknowns and vector slots for one analysis mode.

    Ordering: node voltages first (steady: all real parts, then all
    imaginary parts), then branch currents (steady: real block, then
    imaginary block), then device-internal states. Row i is owned by the
    equation that defines unknown i (KCL for nodes, the element constraint
    for branches, the device equation for internals).
    """

    def __init__(self, circuit, mode):
        if mode not in (STEADY, TRANSIENT):
            raise ValueError(f"unknown analysis mode {mode!r}")
        self.mode = mode
        self.n_nodes = circuit.n_nodes - 1  # ground excluded

        self._branch_start = {}
        n_br = 0
        for el in circuit.elements:
            if el.n_branches < 0:
                raise UnownedUnknownError(f"{el.name}: negative branch count")
            if mode == STEADY and not el.steady_ok:
                raise ValidationError(f"element {el.name} unsupported in steady analysis")
            if mode == TRANSIENT and not el.transient_ok:
                raise ValidationError(f"element {el.name} unsupported in transient analysis")
            if el.n_branches:
                self._branch_start[el.name] = n_br
                n_br += el.n_branches
        self.n_branches = n_br

        self._internal_index = {}
        n_int = 0
        for el in circuit.elements:
            names = tuple(el.internal_names(mode))
            if len(set(names)) != len(names):
                raise UnownedUnknownError(f"{el.name}: duplicate internal unknown names")
            for k, key in enumerate(names):
                self._internal_index[(el.name, key)] = n_int + k
            n_int += len(names)
        self.n_internal = n_int

        per = 2 if mode == STEADY else 1
        self._node_block = self.n_nodes
        self._branch_base = per * self.n_nodes
        self._internal_base = per * (self.n_nodes + self.n_branches)
        self.dimension = self._internal_base + n_int
        self._node_names = circuit.node_names

    # -- node voltages ------------------------------------------------
    def v(self, node):
        if self.mode != TRANSIENT:
            raise ValueError("v() is a transient-layout accessor")
        return node - 1 if node != GROUND else -1

    def vr(self, node):
        return node - 1 if node != GROUND else -1

    def vi(self, node):
        return self.n_nodes + node - 1 if node != GROUND else -1

    # -- branch currents ----------------------------------------------
    def _branch_slot(self, name, k):
        try:
            start = self._branch_start[name]
        except KeyError:
            raise MissingBranchError(f"element {name!r} owns no branch current") from None
        return start + k

    def branch(self, name, k=0):
        return self._branch_base + self._branch_slot(name, k)

    def branch_re(self, name, k=0):
        return self._branch_base + self._branch_slot(name, k)

    def branch_im(self, name, k=0):
        return self._branch_base + self.n_branches + self._branch_slot(name, k)

    # -- device internals ----------------------------------------------
    def internal(self, name, key):
        try:
            return self._internal_base + self._internal_index[(name, key)]
        except KeyError:
            raise UnownedUnknownError(f"no internal unknown {key!r} on {name!r}") from None

    # -- reporting -------------------------------------------------------
    def unknown_names(self, circuit):
        names = [None] * self.dimension
        for node in range(1, self.n_nodes + 1):
            label = self._node_names[node]
            if self.mode == STEADY:
                names[self.vr(node)] = f"vr({label})"
                names[self.vi(node)] = f"vi({label})"
            else:
                names[self.v(node)] = f"v({label})"
        for el in circuit.elements:
            for k in range(el.n_branches):
                suffix = el.name if el.n_branches == 1 else f"{el.name}.{k}"
                if self.mode == STEADY:
                    names[self.branch_re(el.name, k)] = f"ir({suffix})"
                    names[self.branch_im(el.name, k)] = f"ii({suffix})"
                else:
                    names[self.branch(el.name, k)] = f"i({suffix})"
            for key in el.internal_names(self.mode):
                names[self.internal(el.name, key)] = f"{el.name}.{key}"
        if any(n is None for n in names):
            raise UnownedUnknownError("unknown layout left unnamed slots")
        return names


class CircuitGraph:
    """Nodes, elements, and the per-analysis unknown layouts.

    Immutable after construction; node 0 is ground and is excluded from the
    unknowns. Both engines consume the same instance.
    """

    def __init__(self, n_nodes, elements, node_names=None):
        if n_nodes < 1:
            raise ValidationError("circuit needs at least the ground node")
        self.n_nodes = int(n_nodes)
        self.elements = tuple(elements)
        if node_names is None:
            node_names = [str(i) for i in range(self.n_nodes)]
        if len(node_names) != self.n_nodes:
            raise ValidationError("node_names length must equal node count")
        self.node_names = list(node_names)

        seen = set()
        referenced = set()
        for el in self.elements:
            if el.name in seen:
                raise ValidationError(f"duplicate element name {el.name!r}")
            seen.add(el.name)
            for n in el.nodes:
                if not 0 <= n < self.n_nodes:
                    raise ValidationError(f"element {el.name} references node {n} out of range")
                referenced.add(n)
            el.validate()
        missing = set(range(1, self.n_nodes)) - referenced
        if missing:
            labels = ", ".join(self.node_names[n] for n in sorted(missing))
            raise ValidationError(f"node(s) not referenced by any element: {labels}")
        for el in self.elements:
            ctrl = getattr(el, "ctrl_name", None)
            if ctrl is not None:
                if ctrl not in seen:
                    raise ValidationError(f"{el.name}: control element {ctrl!r} not found")
        self._layouts = {}

    def layout(self, mode):
        if mode not in self._layouts:
            self._layouts[mode] = UnknownLayout(self, mode)
        return self._layouts[mode]

    def element(self, name):
        for el in self.elements:
            if el.name == name:
                return el
        raise KeyError(name)

    @property
    def dynamic_elements(self):
        return [el for el in self.elements if el.has_history]


def build_system(circuit, state, ctx):
    """Assemble the linearized circuit at ``state`` for the given context.

    Pure function of its arguments: the sum of all element stamps, with
    dynamic elements drawing history terms from the context.
    """
    lay = circuit.layout(ctx.mode)
    state = np.asarray(state, dtype=np.float64)
    if state.shape != (lay.dimension,):
        raise ValueError(
            f"state length {state.shape} does not match unknown count {lay.dimension}")
    st = Stamp()
    for el in circuit.elements:
        el.stamp(st, lay, state, ctx)
    rhs = np.zeros(lay.dimension)
    if st.rhs_rows:
        np.add.at(rhs, np.asarray(st.rhs_rows, dtype=np.intp),
                  np.asarray(st.rhs_vals, dtype=np.float64))
    return LinearSystem(lay.dimension, st.rows, st.cols, st.vals, rhs)


# ---------------------------------------------------------------------------
# Elements
# ---------------------------------------------------------------------------

class Element:
    """Base element: two-terminal by default, no branches, no internals."""

    n_branches = 0
    has_history = False
    steady_ok = True
    transient_ok = True
    init_priority = 0  # machines init after sources have seeded node voltages

    def __init__(self, name, nodes):
        self.name = str(name)
        self.nodes = tuple(int(n) for n in nodes)

    def validate(self):
        pass

    def internal_names(self, mode):
        return ()

    def stamp(self, st, lay, x, ctx):
        raise NotImplementedError

    # steady-state initial guess refinement (flat start is the default)
    def init_steady(self, lay, x, omega):
        pass

    # default transient start-up values for element-owned unknowns
    def set_initial_state(self, lay, x0):
        pass

    # transient history protocol (dynamic elements only)
    def init_history(self, lay, x0, solved, t0):
        return None

    def update_history(self, rec, lay, x_new, t_new, dt):
        return None

    # steady solution -> transient initial state, element-internal part
    def map_internal_state(self, lay_t, lay_s, xs, xt, t0, omega):
        pass

    # extra waveform signals beyond the unknown vector
    def signal_names(self):
        return ()

    def signal_values(self, lay, x, t):
        return ()

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class Resistor(Element):
    def __init__(self, name, nodes, resistance):
        super().__init__(name, nodes)
        self.resistance = float(resistance)

    def validate(self):
        if not self.resistance > 0.0:
            raise InvalidParamsError(f"{self.name}: resistance must be > 0")

    def stamp(self, st, lay, x, ctx):
        g = 1.0 / self.resistance
        a, b = self.nodes
        if ctx.mode == STEADY:
            st.merge(stamp_resistor(lay.vr(a), lay.vr(b), g))
            st.merge(stamp_resistor(lay.vi(a), lay.vi(b), g))
        else:
            st.merge(stamp_resistor(lay.v(a), lay.v(b), g))


class VoltageSource(Element):
    """Independent voltage source: DC value or cosine AC (peak, Hz, radians).

    Also serves as the slack/fixed-phasor source for power-flow networks
    (the AC phasor is vpk at angle ``phase``).
    """

    n_branches = 1

    def __init__(self, name, nodes, *, dc=None, vpk=None, freq=None, phase=0.0):
        super().__init__(name, nodes)
        if (dc is None) == (vpk is None):
            raise InvalidParamsError(f"{name}: give exactly one of dc= or vpk=")
        self.dc = None if dc is None else float(dc)
        self.vpk = None if vpk is None else float(vpk)
        self.freq = None if freq is None else float(freq)
        self.phase = float(phase)

    def validate(self):
        if self.vpk is not None and self.freq is not None and self.freq < 0:
            raise InvalidParamsError(f"{self.name}: frequency must be >= 0")

    @property
    def is_ac(self):
        return self.vpk is not None

    def value_at(self, t):
        if not self.is_ac:
            return self.dc
        if self.freq is None:
            raise InvalidParamsError(
                f"{self.name}: AC source needs f= for transient analysis")
        return self.vpk * math.cos(2.0 * math.pi * self.freq * t + self.phase)

    def phasor(self):
        if self.is_ac:
            return (self.vpk * math.cos(self.phase), self.vpk * math.sin(self.phase))
        return (self.dc, 0.0)

    def stamp(self, st, lay, x, ctx):
        a, b = self.nodes
        if ctx.mode == STEADY:
            re, im = self.phasor()
            st.merge(stamp_voltage_source(lay.vr(a), lay.vr(b),
                                          lay.branch_re(self.name), re))
            st.merge(stamp_voltage_source(lay.vi(a), lay.vi(b),
                                          lay.branch_im(self.name), im))
        else:
            st.merge(stamp_voltage_source(lay.v(a), lay.v(b),
                                          lay.branch(self.name),
                                          self.value_at(ctx.time)))

    def init_steady(self, lay, x, omega):
        re, im = self.phasor()
        a, b = self.nodes
        if a != GROUND and b == GROUND:
            x[lay.vr(a)], x[lay.vi(a)] = re, im
        elif a == GROUND and b != GROUND:
            x[lay.vr(b)], x[lay.vi(b)] = -re, -im


class CurrentSource(Element):
    """Independent current source delivering its value into the n+ node."""

    def __init__(self, name, nodes, *, dc=None, ipk=None, freq=None, phase=0.0):
        super().__init__(name, nodes)
        if (dc is None) == (ipk is None):
            raise InvalidParamsError(f"{name}: give exactly one of dc= or ipk=")
        self.dc = None if dc is None else float(dc)
        self.ipk = None if ipk is None else float(ipk)
        self.freq = None if freq is None else float(freq)
        self.phase = float(phase)

    @property
    def is_ac(self):
        return self.ipk is not None

    def value_at(self, t):
        if not self.is_ac:
            return self.dc
        if self.freq is None:
            raise InvalidParamsError(
                f"{self.name}: AC source needs f= for transient analysis")
        return self.ipk * math.cos(2.0 * math.pi * self.freq * t + self.phase)

    def phasor(self):
        if self.is_ac:
            return (self.ipk * math.cos(self.phase), self.ipk * math.sin(self.phase))
        return (self.dc, 0.0)

    def stamp(self, st, lay, x, ctx):
        a, b = self.nodes
        if ctx.mode == STEADY:
            re, im = self.phasor()
            st.add_rhs(lay.vr(a), re)
            st.add_rhs(lay.vr(b), -re)
            st.add_rhs(lay.vi(a), im)
            st.add_rhs(lay.vi(b), -im)
        else:
            val = self.value_at(ctx.time)
            st.add_rhs(lay.v(a), val)
            st.add_rhs(lay.v(b), -val)


class Vccs(Element):
    """Voltage-controlled current source: I(out+ -> out-) = g * V(ctrl)."""

    def __init__(self, name, nodes, transconductance):
        super().__init__(name, nodes)  # (out+, out-, ctrl+, ctrl-)
        self.transconductance = float(transconductance)

    def _pattern(self, st, op, on, cp, cn):
        g = self.transconductance
        st.add(op, cp, g)
        st.add(op, cn, -g)
        st.add(on, cp, -g)
        st.add(on, cn, g)

    def stamp(self, st, lay, x, ctx):
        op, on, cp, cn = self.nodes
        if ctx.mode == STEADY:
            self._pattern(st, lay.vr(op), lay.vr(on), lay.vr(cp), lay.vr(cn))
            self._pattern(st, lay.vi(op), lay.vi(on), lay.vi(cp), lay.vi(cn))
        else:
            self._pattern(st, lay.v(op), lay.v(on), lay.v(cp), lay.v(cn))


class Ccvs(Element):
    """Current-controlled voltage source: V+ - V- = r * I(ctrl element)."""

    n_branches = 1

    def __init__(self, name, nodes, transresistance, ctrl_name):
        super().__init__(name, nodes)
        self.transresistance = float(transresistance)
        self.ctrl_name = str(ctrl_name)

    def stamp(self, st, lay, x, ctx):
        a, b = self.nodes
        r = self.transresistance
        if ctx.mode == STEADY:
            for part, va, vb in (("re", lay.vr(a), lay.vr(b)),
                                 ("im", lay.vi(a), lay.vi(b))):
                br = getattr(lay, f"branch_{part}")(self.name)
                ctrl = getattr(lay, f"branch_{part}")(self.ctrl_name)
                st.add(va, br, 1.0)
                st.add(vb, br, -1.0)
                st.add(br, va, 1.0)
                st.add(br, vb, -1.0)
                st.add(br, ctrl, -r)
        else:
            br = lay.branch(self.name)
            ctrl = lay.branch(self.ctrl_name)
            st.add(lay.v(a), br, 1.0)
            st.add(lay.v(b), br, -1.0)
            st.add(br, lay.v(a), 1.0)
            st.add(br, lay.v(b), -1.0)
            st.add(br, ctrl, -r)


class IdealSwitch(Element):
    """Ideal switch with an optional toggle schedule (times in seconds)."""

    n_branches = 1

    def __init__(self, name, nodes, closed, toggles=()):
        super().__init__(name, nodes)
        self.closed = bool(closed)
        self.toggles = tuple(sorted(float(t) for t in toggles))

    def closed_at(self, t):
        flips = sum(1 for tt in self.toggles if tt <= t)
        return self.closed ^ (flips % 2 == 1)

    def stamp(self, st, lay, x, ctx):
        a, b = self.nodes
        if ctx.mode == STEADY:
            closed = self.closed
            st.merge(stamp_ideal_switch(lay.vr(a), lay.vr(b),
                                        lay.branch_re(self.name), closed))
            st.merge(stamp_ideal_switch(lay.vi(a), lay.vi(b),
                                        lay.branch_im(self.name), closed))
        else:
            st.merge(stamp_ideal_switch(lay.v(a), lay.v(b),
                                        lay.branch(self.name),
                                        self.closed_at(ctx.time)))


class CoupledInductors(Element):
    """Block of n magnetically coupled coils with explicit branch currents.

    ``coil_nodes`` is a sequence of (n+, n-) pairs, one per coil; ``l_matrix``
    the symmetric inductance matrix. A single inductor is the 1x1 case.
    """

    has_history = True

    def __init__(self, name, coil_nodes, l_matrix, i0=None):
        pairs = [tuple(int(n) for n in p) for p in coil_nodes]
        super().__init__(name, [n for p in pairs for n in p])
        self.coil_nodes = pairs
        self.l_matrix = np.array(l_matrix, dtype=float)
        self.n_coils = len(pairs)
        self.n_branches = self.n_coils
        self.i0 = tuple(0.0 for _ in pairs) if i0 is None else tuple(float(v) for v in i0)
        self._l_rows = tuple(tuple(row) for row in self.l_matrix.tolist())

    def validate(self):
        m = validate_inductance(self.l_matrix)
        if m.shape[0] != self.n_coils:
            raise InvalidParamsError(f"{self.name}: L matrix size != coil count")
        if np.linalg.eigvalsh(m).min() < -1e-12 * np.abs(m).max():
            raise InvalidParamsError(f"{self.name}: L matrix must be positive semidefinite")
        if len(self.i0) != self.n_coils:
            raise InvalidParamsError(f"{self.name}: i0 length != coil count")

    def _kcl(self, st, lay, steady):
        for k, (a, b) in enumerate(self.coil_nodes):
            if steady:
                st.add(lay.vr(a), lay.branch_re(self.name, k), 1.0)
                st.add(lay.vr(b), lay.branch_re(self.name, k), -1.0)
                st.add(lay.vi(a), lay.branch_im(self.name, k), 1.0)
                st.add(lay.vi(b), lay.branch_im(self.name, k), -1.0)
            else:
                st.add(lay.v(a), lay.branch(self.name, k), 1.0)
                st.add(lay.v(b), lay.branch(self.name, k), -1.0)

    def stamp(self, st, lay, x, ctx):
        if ctx.mode == STEADY:
            self._kcl(st, lay, steady=True)
            w = ctx.omega
            for i, (a, b) in enumerate(self.coil_nodes):
                row_r = lay.branch_re(self.name, i)
                row_i = lay.branch_im(self.name, i)
                cols_r = [(lay.vr(a), 1.0), (lay.vr(b), -1.0)]
                cols_i = [(lay.vi(a), 1.0), (lay.vi(b), -1.0)]
                for j in range(self.n_coils):
                    cols_r.append((lay.branch_im(self.name, j), w * self.l_matrix[i, j]))
                    cols_i.append((lay.branch_re(self.name, j), -w * self.l_matrix[i, j]))
                f_r = value_at(x, lay.vr(a)) - value_at(x, lay.vr(b)) + w * sum(
                    self.l_matrix[i, j] * x[lay.branch_im(self.name, j)]
                    for j in range(self.n_coils))
                f_i = value_at(x, lay.vi(a)) - value_at(x, lay.vi(b)) - w * sum(
                    self.l_matrix[i, j] * x[lay.branch_re(self.name, j)]
                    for j in range(self.n_coils))
                add_linearized_row(st, row_r, x, cols_r, f_r)
                add_linearized_row(st, row_i, x, cols_i, f_i)
            return

        self._kcl(st, lay, steady=False)
        if isinstance(ctx, BootstrapContext):
            # freeze each coil current at its initial-state value
            for k in range(self.n_coils):
                br = lay.branch(self.name, k)
                add_linearized_row(st, br, x, [(br, 1.0)], 0.0)
            return

        rec = ctx.history.records[self.name]
        coeffs, v_hist = companion_terms(self._l_rows, 2.0 / ctx.dt,
                                         rec.currents, rec.voltages)
        for i, (a, b) in enumerate(self.coil_nodes):
            row = lay.branch(self.name, i)
            cols = [(lay.v(a), 1.0), (lay.v(b), -1.0)]
            f = value_at(x, lay.v(a)) - value_at(x, lay.v(b)) + v_hist[i]
            for j in range(self.n_coils):
                cols.append((lay.branch(self.name, j), -coeffs[i][j]))
                f -= coeffs[i][j] * x[lay.branch(self.name, j)]
            add_linearized_row(st, row, x, cols, f)

    def set_initial_state(self, lay, x0):
        for k, val in enumerate(self.i0):
            x0[lay.branch(self.name, k)] = val

    def init_history(self, lay, x0, solved, t0):
        currents = tuple(solved[lay.branch(self.name, k)] for k in range(self.n_coils))
        voltages = tuple(
            value_at(solved, lay.v(a)) - value_at(solved, lay.v(b))
            for (a, b) in self.coil_nodes)
        return CoilHistory(currents, voltages)

    def update_history(self, rec, lay, x_new, t_new, dt):
        i_new = np.array([x_new[lay.branch(self.name, k)] for k in range(self.n_coils)])
        i_prev = np.asarray(rec.currents)
        v_new = (2.0 / dt) * (self.l_matrix @ (i_new - i_prev)) - np.asarray(rec.voltages)
        return CoilHistory(tuple(i_new), tuple(v_new))

    def map_internal_state(self, lay_t, lay_s, xs, xt, t0, omega):
        # branch phasor -> instantaneous current handled generically
        pass


class Line(Element):
    """Series R + jX branch. X is the reactance at ``fbase`` hertz; the
    transient model uses L = X / (2*pi*fbase)."""

    n_branches = 1

    def __init__(self, name, nodes, resistance, reactance, fbase=60.0):
        super().__init__(name, nodes)
        self.resistance = float(resistance)
        self.reactance = float(reactance)
        self.fbase = float(fbase)

    @property
    def has_history(self):
        return self.reactance != 0.0

    @property
    def inductance(self):
        return self.reactance / (2.0 * math.pi * self.fbase)

    def validate(self):
        if self.resistance < 0 or self.reactance < 0:
            raise InvalidParamsError(f"{self.name}: r and x must be >= 0")
        if self.resistance == 0 and self.reactance == 0:
            raise InvalidParamsError(f"{self.name}: zero impedance (use a switch)")
        if self.fbase <= 0:
            raise InvalidParamsError(f"{self.name}: fbase must be > 0")

    def stamp(self, st, lay, x, ctx):
        a, b = self.nodes
        r, xx = self.resistance, self.reactance
        if ctx.mode == STEADY:
            br_r = lay.branch_re(self.name)
            br_i = lay.branch_im(self.name)
            st.add(lay.vr(a), br_r, 1.0)
            st.add(lay.vr(b), br_r, -1.0)
            st.add(lay.vi(a), br_i, 1.0)
            st.add(lay.vi(b), br_i, -1.0)
            add_linearized_row(
                st, br_r, x,
                [(lay.vr(a), 1.0), (lay.vr(b), -1.0), (br_r, -r), (br_i, xx)],
                value_at(x, lay.vr(a)) - value_at(x, lay.vr(b)) - r * x[br_r] + xx * x[br_i])
            add_linearized_row(
                st, br_i, x,
                [(lay.vi(a), 1.0), (lay.vi(b), -1.0), (br_r, -xx), (br_i, -r)],
                value_at(x, lay.vi(a)) - value_at(x, lay.vi(b)) - xx * x[br_r] - r * x[br_i])
            return

        br = lay.branch(self.name)
        st.add(lay.v(a), br, 1.0)
        st.add(lay.v(b), br, -1.0)
        if isinstance(ctx, BootstrapContext):
            add_linearized_row(st, br, x, [(br, 1.0)], 0.0)
            return
        vh = 0.0
        coeff = 0.0
        if self.reactance != 0.0:
            rec = ctx.history.records[self.name]
            rows, hist = companion_terms(((self.inductance,),), 2.0 / ctx.dt,
                                         rec.currents, rec.voltages)
            vh, coeff = hist[0], rows[0][0]
        f = (value_at(x, lay.v(a)) - value_at(x, lay.v(b))
             - (r + coeff) * x[br] + vh)
        add_linearized_row(
            st, br, x,
            [(lay.v(a), 1.0), (lay.v(b), -1.0), (br, -(r + coeff))], f)

    def init_history(self, lay, x0, solved, t0):
        a, b = self.nodes
        i0 = solved[lay.branch(self.name)]
        v_l = (value_at(solved, lay.v(a)) - value_at(solved, lay.v(b))
               - self.resistance * i0)
        return CoilHistory((i0,), (v_l,))

    def update_history(self, rec, lay, x_new, t_new, dt):
        i_new = x_new[lay.branch(self.name)]
        v_new = (2.0 * self.inductance / dt) * (i_new - rec.currents[0]) - rec.voltages[0]
        return CoilHistory((i_new,), (v_new,))
