"""Three-phase squirrel-cage induction machine in the synchronous dq frame.

One model serves both analyses. The winding equations in the synchronously
rotating frame (frame speed w_s, rotor electrical speed w_r) are

    v_ds = R_s I_ds + d(psi_ds)/dt - w_s * psi_qs
    v_qs = R_s I_qs + d(psi_qs)/dt + w_s * psi_ds
    0    = R_r I_dr + d(psi_dr)/dt - (w_s - w_r) * psi_qr
    0    = R_r I_qr + d(psi_qr)/dt + (w_s - w_r) * psi_dr

with flux linkages linear in the currents, rotor voltages shorted by the
cage, a single mechanical equation J*dw_r/dt = T_e - T_L(w_r) - D*w_r, and
one zero-sequence equation v_0s = R_s I_0s + L_ls * dI_0s/dt (the
zero-sequence flux sees leakage only; inert under balanced excitation).

The transient engine replaces the flux derivatives with trapezoidal
companion terms (the d- and q-axis winding pairs are ordinary two-coil
blocks); the steady engine sets them to zero, turning the same rows into
the frequency-domain model. The only nonlinearities are the bilinear
speed-voltage products (w_s - w_r)*psi and the torque products, linearized
with ``taylor_linearize_product``.

Rotor speed is carried in electrical rad/s (mechanical speed is
w_r * 2 / poles); torque assumes peak-amplitude currents.
"""

import cmath
import math
from dataclasses import dataclass

from .circuit import (
    GROUND,
    STEADY,
    BootstrapContext,
    Element,
    add_linearized_row,
    value_at,
)
from .companion import CoilHistory, companion_terms, taylor_linearize_product
from .errors import InvalidParamsError

#: Phase displacement of a symmetric three-phase set.
LAMBDA = 2.0 * math.pi / 3.0

_COS_L = math.cos(LAMBDA)
_SIN_L = math.sin(LAMBDA)


@dataclass(frozen=True)
class MotorParams:
    """Machine constants. ``load_torque`` is a polynomial in rotor speed,
    coefficients in ascending powers (a constant load is a 1-tuple)."""

    r_s: float
    r_r: float
    l_ls: float
    l_lr: float
    l_m: float
    inertia: float
    damping: float
    poles: int
    load_torque: tuple
    v_ll: float
    freq: float

    def __post_init__(self):
        coeffs = self.load_torque
        if isinstance(coeffs, (int, float)):
            coeffs = (float(coeffs),)
        object.__setattr__(self, "load_torque", tuple(float(c) for c in coeffs))
        for field_name in ("r_s", "r_r", "l_ls", "l_lr", "l_m", "inertia",
                           "v_ll", "freq"):
            if not getattr(self, field_name) > 0.0:
                raise InvalidParamsError(f"{field_name} must be > 0")
        if self.damping < 0.0:
            raise InvalidParamsError("damping must be >= 0")
        if self.poles < 2 or self.poles % 2:
            raise InvalidParamsError("poles must be a positive even integer")
        if not self.load_torque:
            raise InvalidParamsError("load_torque needs at least one coefficient")

    @property
    def l_s(self):
        return self.l_ls + self.l_m

    @property
    def l_r(self):
        return self.l_lr + self.l_m

    @property
    def omega_s(self):
        return 2.0 * math.pi * self.freq

    @property
    def v_peak(self):
        """Peak phase voltage for the rated line-line RMS value."""
        return self.v_ll * math.sqrt(2.0) / math.sqrt(3.0)

    @property
    def torque_gain(self):
        return 0.75 * self.l_m * self.poles

    def load_torque_at(self, omega_r):
        acc = 0.0
        for c in reversed(self.load_torque):
            acc = acc * omega_r + c
        return acc

    def load_torque_slope(self, omega_r):
        acc = 0.0
        for k in range(len(self.load_torque) - 1, 0, -1):
            acc = acc * omega_r + k * self.load_torque[k]
        return acc


@dataclass
class MotorState:
    """Dynamic state: dq currents, zero-sequence current, speed, frame angle.

    Flux linkages are always derived from the currents, never stored."""

    i_ds: float = 0.0
    i_qs: float = 0.0
    i_dr: float = 0.0
    i_qr: float = 0.0
    i_0s: float = 0.0
    omega_r: float = 0.0
    theta: float = 0.0

    def fluxes(self, params):
        return flux_linkages(self.i_ds, self.i_qs, self.i_dr, self.i_qr, params)


def dq_transform(f_abc, theta):
    """Project instantaneous phase quantities onto (zero, d, q) axes."""
    a, b, c = f_abc
    ct, cb, cc = math.cos(theta), math.cos(theta - LAMBDA), math.cos(theta + LAMBDA)
    st, sb, sc = math.sin(theta), math.sin(theta - LAMBDA), math.sin(theta + LAMBDA)
    f0 = (a + b + c) / 3.0
    fd = (2.0 / 3.0) * (a * ct + b * cb + c * cc)
    fq = (2.0 / 3.0) * (a * st + b * sb + c * sc)
    return f0, fd, fq


def inverse_dq_transform(f_0dq, theta):
    """Rebuild phase quantities; exact inverse of :func:`dq_transform`."""
    f0, fd, fq = f_0dq
    a = f0 + fd * math.cos(theta) + fq * math.sin(theta)
    b = f0 + fd * math.cos(theta - LAMBDA) + fq * math.sin(theta - LAMBDA)
    c = f0 + fd * math.cos(theta + LAMBDA) + fq * math.sin(theta + LAMBDA)
    return a, b, c


def flux_linkages(i_ds, i_qs, i_dr, i_qr, params):
    psi_ds = params.l_s * i_ds + params.l_m * i_dr
    psi_qs = params.l_s * i_qs + params.l_m * i_qr
    psi_dr = params.l_r * i_dr + params.l_m * i_ds
    psi_qr = params.l_r * i_qr + params.l_m * i_qs
    return psi_ds, psi_qs, psi_dr, psi_qr


def electrical_torque(i_ds, i_qs, i_dr, i_qr, params):
    return params.torque_gain * (i_dr * i_qs - i_qr * i_ds)


def mechanical_derivative(t_e, omega_r, params):
    t_l = params.load_torque_at(omega_r)
    if t_l < 0.0:
        raise InvalidParamsError(
            f"negative load torque ({t_l:.4g} N.m at w_r={omega_r:.4g} rad/s) "
            "is not supported")
    return (t_e - t_l - params.damping * omega_r) / params.inertia


def equivalent_circuit_currents(v_primed, slip, params):
    """Classical per-phase steady solution at a given slip.

    ``v_primed`` is the d+jq stator voltage (the conjugate of the phase-a
    phasor in this frame convention). Used only to seed Newton-Raphson.
    """
    ws = params.omega_s
    z_m = 1j * ws * params.l_m
    z_s = params.r_s + 1j * ws * params.l_ls
    if abs(slip) < 1e-12:
        i_s = v_primed / (z_s + z_m)
        return i_s, 0j
    z_r = params.r_r / slip + 1j * ws * params.l_lr
    i_s = v_primed / (z_s + z_m * z_r / (z_m + z_r))
    i_r = -i_s * z_m / (z_m + z_r)
    return i_s, i_r


@dataclass(frozen=True)
class MotorHistory:
    """Per-step memory: winding-pair coil histories plus mechanical terms."""

    d_axis: CoilHistory   # (I_ds, I_dr) and their flux-derivative voltages
    q_axis: CoilHistory
    zero: CoilHistory     # (I_0s,) and its leakage voltage
    omega_r: float
    p_omega_r: float


class InductionMotor(Element):
    """Squirrel-cage machine element on three phase terminals.

    Internal unknowns (transient): I_ds, I_qs, I_dr, I_qr, I_0s, w_r.
    Steady state replaces I_0s by a real/imaginary zero-sequence pair and
    solves rotor speed jointly with the torque-balance row (no assumed
    operating slip). ``pin_speed`` swaps the mechanical row for w_r = value
    (locked-rotor and torque-slip studies).
    """

    has_history = True
    init_priority = 1

    _TRANSIENT_KEYS = ("ids", "iqs", "idr", "iqr", "i0s", "wr")
    _STEADY_KEYS = ("ids", "iqs", "idr", "iqr", "wr", "i0r", "i0i")

    def __init__(self, name, nodes, params, pin_speed=None, theta0=0.0):
        super().__init__(name, nodes)  # (phase a, phase b, phase c)
        if len(self.nodes) != 3:
            raise InvalidParamsError(f"{name}: motor needs three phase terminals")
        self.params = params
        self.pin_speed = None if pin_speed is None else float(pin_speed)
        self.theta0 = float(theta0)

    def validate(self):
        if not isinstance(self.params, MotorParams):
            raise InvalidParamsError(f"{self.name}: params must be MotorParams")

    def internal_names(self, mode):
        return self._STEADY_KEYS if mode == STEADY else self._TRANSIENT_KEYS

    # -- helpers -----------------------------------------------------------

    def _jj(self, lay, keys):
        return [lay.internal(self.name, k) for k in keys]

    def _axis_rows(self):
        # d- and q-axis winding pairs share one two-coil inductance matrix
        p = self.params
        return ((p.l_s, p.l_m), (p.l_m, p.l_r))

    def theta_at(self, t):
        return self.theta0 + self.params.omega_s * t

    # -- stamping -----------------------------------------------------------

    def stamp(self, st, lay, x, ctx):
        if ctx.mode == STEADY:
            self._stamp_steady(st, lay, x, ctx.omega)
        elif isinstance(ctx, BootstrapContext):
            self._stamp_frozen(st, lay, x, ctx.time)
        else:
            self._stamp_transient(st, lay, x, ctx)

    def _stamp_transient(self, st, lay, x, ctx):
        p = self.params
        ws, dt = p.omega_s, ctx.dt
        jds, jqs, jdr, jqr, j0, jw = self._jj(lay, self._TRANSIENT_KEYS)
        na, nb, nc = (lay.v(n) for n in self.nodes)
        ids, iqs, idr, iqr = x[jds], x[jqs], x[jdr], x[jqr]
        i0, wr = x[j0], x[jw]
        va, vb, vc = value_at(x, na), value_at(x, nb), value_at(x, nc)

        rec = ctx.history.records[self.name]
        scale = 2.0 / dt
        axis_rows = self._axis_rows()
        cd, vh_d = companion_terms(axis_rows, scale,
                                   rec.d_axis.currents, rec.d_axis.voltages)
        cq, vh_q = companion_terms(axis_rows, scale,
                                   rec.q_axis.currents, rec.q_axis.voltages)
        c0, vh_0 = companion_terms(((p.l_ls,),), scale,
                                   rec.zero.currents, rec.zero.voltages)

        theta = self.theta_at(ctx.time)
        ca, cb, cc = (math.cos(theta), math.cos(theta - LAMBDA),
                      math.cos(theta + LAMBDA))
        sa, sb, sc = (math.sin(theta), math.sin(theta - LAMBDA),
                      math.sin(theta + LAMBDA))

        psi_ds, psi_qs, psi_dr, psi_qr = flux_linkages(ids, iqs, idr, iqr, p)
        v0s, vds, vqs = dq_transform((va, vb, vc), theta)
        u = ws - wr  # slip speed, the bilinear partner of the rotor fluxes

        # stator d: R_s I_ds + p(psi_ds) - w_s psi_qs - v_ds = 0
        f = (p.r_s * ids + (-vh_d[0] + cd[0][0] * ids + cd[0][1] * idr)
             - ws * psi_qs - vds)
        add_linearized_row(st, jds, x, [
            (jds, p.r_s + cd[0][0]), (jdr, cd[0][1]),
            (jqs, -ws * p.l_s), (jqr, -ws * p.l_m),
            (na, -(2.0 / 3.0) * ca), (nb, -(2.0 / 3.0) * cb), (nc, -(2.0 / 3.0) * cc),
        ], f)

        # stator q: R_s I_qs + p(psi_qs) + w_s psi_ds - v_qs = 0
        f = (p.r_s * iqs + (-vh_q[0] + cq[0][0] * iqs + cq[0][1] * iqr)
             + ws * psi_ds - vqs)
        add_linearized_row(st, jqs, x, [
            (jqs, p.r_s + cq[0][0]), (jqr, cq[0][1]),
            (jds, ws * p.l_s), (jdr, ws * p.l_m),
            (na, -(2.0 / 3.0) * sa), (nb, -(2.0 / 3.0) * sb), (nc, -(2.0 / 3.0) * sc),
        ], f)

        # rotor d: R_r I_dr + p(psi_dr) - (w_s - w_r) psi_qr = 0
        a_u, a_psi, _ = taylor_linearize_product(u, psi_qr)
        f = (p.r_r * idr + (-vh_d[1] + cd[1][0] * ids + cd[1][1] * idr)
             - u * psi_qr)
        add_linearized_row(st, jdr, x, [
            (jdr, p.r_r + cd[1][1]), (jds, cd[1][0]),
            (jqr, -a_psi * p.l_r), (jqs, -a_psi * p.l_m), (jw, a_u),
        ], f)

        # rotor q: R_r I_qr + p(psi_qr) + (w_s - w_r) psi_dr = 0
        a_u, a_psi, _ = taylor_linearize_product(u, psi_dr)
        f = (p.r_r * iqr + (-vh_q[1] + cq[1][0] * iqs + cq[1][1] * iqr)
             + u * psi_dr)
        add_linearized_row(st, jqr, x, [
            (jqr, p.r_r + cq[1][1]), (jqs, cq[1][0]),
            (jds, a_psi * p.l_m), (jdr, a_psi * p.l_r), (jw, -a_u),
        ], f)

        # mechanical: J p(w_r) - (T_e - T_L - D w_r) = 0
        if self.pin_speed is not None:
            add_linearized_row(st, jw, x, [(jw, 1.0)], wr - self.pin_speed)
        else:
            te = electrical_torque(ids, iqs, idr, iqr, p)
            p_wr = (2.0 / dt) * (wr - rec.omega_r) - rec.p_omega_r
            f = p.inertia * p_wr - (te - p.load_torque_at(wr) - p.damping * wr)
            k = p.torque_gain
            add_linearized_row(st, jw, x, [
                (jw, p.inertia * 2.0 / dt + p.load_torque_slope(wr) + p.damping),
                (jdr, -k * iqs), (jqs, -k * idr), (jqr, k * ids), (jds, k * iqr),
            ], f)

        # zero sequence: R_s I_0s + L_ls p(I_0s) - v_0s = 0
        f = p.r_s * i0 + (-vh_0[0] + c0[0][0] * i0) - v0s
        add_linearized_row(st, j0, x, [
            (j0, p.r_s + c0[0][0]),
            (na, -1.0 / 3.0), (nb, -1.0 / 3.0), (nc, -1.0 / 3.0),
        ], f)

        # terminal currents drawn from the phase nodes
        for node, cth, sth in ((na, ca, sa), (nb, cb, sb), (nc, cc, sc)):
            add_linearized_row(st, node, x,
                               [(j0, 1.0), (jds, cth), (jqs, sth)],
                               i0 + ids * cth + iqs * sth)

    def _stamp_frozen(self, st, lay, x, t0):
        """Bootstrap: internal states pinned, terminal currents injected."""
        keys = self._TRANSIENT_KEYS
        jds, jqs, jdr, jqr, j0, jw = self._jj(lay, keys)
        for j in (jds, jqs, jdr, jqr, j0, jw):
            add_linearized_row(st, j, x, [(j, 1.0)], 0.0)
        theta = self.theta_at(t0)
        ids, iqs, i0 = x[jds], x[jqs], x[j0]
        for node, off in zip((lay.v(n) for n in self.nodes), (0.0, -LAMBDA, LAMBDA)):
            cth, sth = math.cos(theta + off), math.sin(theta + off)
            add_linearized_row(st, node, x,
                               [(j0, 1.0), (jds, cth), (jqs, sth)],
                               i0 + ids * cth + iqs * sth)

    def _stamp_steady(self, st, lay, x, omega):
        p = self.params
        ws = p.omega_s
        jds, jqs, jdr, jqr, jw, j0r, j0i = self._jj(lay, self._STEADY_KEYS)
        node_cols = [(lay.vr(n), lay.vi(n)) for n in self.nodes]
        (ra, ia), (rb, ib), (rc, ic) = node_cols
        ids, iqs, idr, iqr = x[jds], x[jqs], x[jdr], x[jqr]
        wr, i0r, i0i = x[jw], x[j0r], x[j0i]

        vra, via = value_at(x, ra), value_at(x, ia)
        vrb, vib = value_at(x, rb), value_at(x, ib)
        vrc, vic = value_at(x, rc), value_at(x, ic)

        # balanced positive-sequence projection of the terminal phasors
        vds = (vra + _COS_L * (vrb + vrc) - _SIN_L * (vib - vic)) / 3.0
        vqs = -(via + _COS_L * (vib + vic) + _SIN_L * (vrb - vrc)) / 3.0
        v0r = (vra + vrb + vrc) / 3.0
        v0i = (via + vib + vic) / 3.0

        psi_ds, psi_qs, psi_dr, psi_qr = flux_linkages(ids, iqs, idr, iqr, p)
        u = ws - wr

        f = p.r_s * ids - ws * psi_qs - vds
        add_linearized_row(st, jds, x, [
            (jds, p.r_s), (jqs, -ws * p.l_s), (jqr, -ws * p.l_m),
            (ra, -1.0 / 3.0), (rb, -_COS_L / 3.0), (ib, _SIN_L / 3.0),
            (rc, -_COS_L / 3.0), (ic, -_SIN_L / 3.0),
        ], f)

        f = p.r_s * iqs + ws * psi_ds - vqs
        add_linearized_row(st, jqs, x, [
            (jqs, p.r_s), (jds, ws * p.l_s), (jdr, ws * p.l_m),
            (ia, 1.0 / 3.0), (ib, _COS_L / 3.0), (rb, _SIN_L / 3.0),
            (ic, _COS_L / 3.0), (rc, -_SIN_L / 3.0),
        ], f)

        a_u, a_psi, _ = taylor_linearize_product(u, psi_qr)
        f = p.r_r * idr - u * psi_qr
        add_linearized_row(st, jdr, x, [
            (jdr, p.r_r), (jqr, -a_psi * p.l_r), (jqs, -a_psi * p.l_m), (jw, a_u),
        ], f)

        a_u, a_psi, _ = taylor_linearize_product(u, psi_dr)
        f = p.r_r * iqr + u * psi_dr
        add_linearized_row(st, jqr, x, [
            (jqr, p.r_r), (jds, a_psi * p.l_m), (jdr, a_psi * p.l_r), (jw, -a_u),
        ], f)

        if self.pin_speed is not None:
            add_linearized_row(st, jw, x, [(jw, 1.0)], wr - self.pin_speed)
        else:
            te = electrical_torque(ids, iqs, idr, iqr, p)
            f = p.load_torque_at(wr) + p.damping * wr - te
            k = p.torque_gain
            add_linearized_row(st, jw, x, [
                (jw, p.load_torque_slope(wr) + p.damping),
                (jdr, -k * iqs), (jqs, -k * idr), (jqr, k * ids), (jds, k * iqr),
            ], f)

        # zero-sequence phasor sees R_s + j w_s L_ls
        f = p.r_s * i0r - ws * p.l_ls * i0i - v0r
        add_linearized_row(st, j0r, x, [
            (j0r, p.r_s), (j0i, -ws * p.l_ls),
            (ra, -1.0 / 3.0), (rb, -1.0 / 3.0), (rc, -1.0 / 3.0),
        ], f)
        f = p.r_s * i0i + ws * p.l_ls * i0r - v0i
        add_linearized_row(st, j0i, x, [
            (j0i, p.r_s), (j0r, ws * p.l_ls),
            (ia, -1.0 / 3.0), (ib, -1.0 / 3.0), (ic, -1.0 / 3.0),
        ], f)

        # drawn phase currents: positive-sequence rotation of (I_ds - j I_qs)
        rotations = ((1.0, 0.0), (_COS_L, -_SIN_L), (_COS_L, _SIN_L))
        for (nr, ni), (rr, ri) in zip(node_cols, rotations):
            add_linearized_row(st, nr, x,
                               [(jds, rr), (jqs, ri), (j0r, 1.0)],
                               ids * rr + iqs * ri + i0r)
            add_linearized_row(st, ni, x,
                               [(jds, ri), (jqs, -rr), (j0i, 1.0)],
                               ids * ri - iqs * rr + i0i)

    # -- initial guesses and history ----------------------------------------

    def init_steady(self, lay, x, omega):
        p = self.params
        a = self.nodes[0]
        v_a = complex(value_at(x, lay.vr(a)), value_at(x, lay.vi(a)))
        if abs(v_a) < 1e-9:
            v_a = p.v_peak * cmath.exp(1j * math.pi)
        if self.pin_speed is not None:
            wr = self.pin_speed
            slip = (p.omega_s - wr) / p.omega_s
        else:
            wr = 0.95 * p.omega_s
            slip = 0.05
        i_s, i_r = equivalent_circuit_currents(v_a.conjugate(), slip, p)
        jds, jqs, jdr, jqr, jw, j0r, j0i = self._jj(lay, self._STEADY_KEYS)
        x[jds], x[jqs] = i_s.real, i_s.imag
        x[jdr], x[jqr] = i_r.real, i_r.imag
        x[jw] = wr
        x[j0r] = x[j0i] = 0.0

    def init_history(self, lay, x0, solved, t0):
        p = self.params
        ws = p.omega_s
        jds, jqs, jdr, jqr, j0, jw = self._jj(lay, self._TRANSIENT_KEYS)
        ids, iqs, idr, iqr = solved[jds], solved[jqs], solved[jdr], solved[jqr]
        i0, wr = solved[j0], solved[jw]
        v_abc = tuple(value_at(solved, lay.v(n)) for n in self.nodes)
        v0s, vds, vqs = dq_transform(v_abc, self.theta_at(t0))
        psi_ds, psi_qs, psi_dr, psi_qr = flux_linkages(ids, iqs, idr, iqr, p)
        u = ws - wr
        p_psi_ds = vds - p.r_s * ids + ws * psi_qs
        p_psi_qs = vqs - p.r_s * iqs - ws * psi_ds
        p_psi_dr = -p.r_r * idr + u * psi_qr
        p_psi_qr = -p.r_r * iqr - u * psi_dr
        v_l0 = v0s - p.r_s * i0
        te = electrical_torque(ids, iqs, idr, iqr, p)
        if self.pin_speed is not None:
            p_wr = 0.0
        else:
            p_wr = mechanical_derivative(te, wr, p)
        return MotorHistory(
            d_axis=CoilHistory((ids, idr), (p_psi_ds, p_psi_dr)),
            q_axis=CoilHistory((iqs, iqr), (p_psi_qs, p_psi_qr)),
            zero=CoilHistory((i0,), (v_l0,)),
            omega_r=wr, p_omega_r=p_wr)

    def update_history(self, rec, lay, x_new, t_new, dt):
        p = self.params
        jds, jqs, jdr, jqr, j0, jw = self._jj(lay, self._TRANSIENT_KEYS)
        ids, iqs, idr, iqr = x_new[jds], x_new[jqs], x_new[jdr], x_new[jqr]
        i0, wr = x_new[j0], x_new[jw]
        scale = 2.0 / dt

        def pair_update(old, cur_a, cur_b):
            da, db = cur_a - old.currents[0], cur_b - old.currents[1]
            va = scale * (p.l_s * da + p.l_m * db) - old.voltages[0]
            vb = scale * (p.l_m * da + p.l_r * db) - old.voltages[1]
            return CoilHistory((cur_a, cur_b), (va, vb))

        v0 = scale * p.l_ls * (i0 - rec.zero.currents[0]) - rec.zero.voltages[0]
        p_wr = scale * (wr - rec.omega_r) - rec.p_omega_r
        if self.pin_speed is not None:
            p_wr = 0.0
        return MotorHistory(
            d_axis=pair_update(rec.d_axis, ids, idr),
            q_axis=pair_update(rec.q_axis, iqs, iqr),
            zero=CoilHistory((i0,), (v0,)),
            omega_r=wr, p_omega_r=p_wr)

    def map_internal_state(self, lay_t, lay_s, xs, xt, t0, omega):
        src = {k: xs[lay_s.internal(self.name, k)] for k in self._STEADY_KEYS}
        i0 = complex(src["i0r"], src["i0i"]) * cmath.exp(1j * omega * t0)
        vals = dict(ids=src["ids"], iqs=src["iqs"], idr=src["idr"],
                    iqr=src["iqr"], i0s=i0.real, wr=src["wr"])
        for k, v in vals.items():
            xt[lay_t.internal(self.name, k)] = v

    # -- reporting ------------------------------------------------------------

    def signal_names(self):
        return (f"{self.name}.te",)

    def signal_values(self, lay, x, t):
        jds, jqs, jdr, jqr = self._jj(lay, ("ids", "iqs", "idr", "iqr"))
        return (electrical_torque(x[jds], x[jqs], x[jdr], x[jqr], self.params),)

    def steady_quantities(self, lay, x):
        """Solved machine quantities from a steady-state unknown vector."""
        jds, jqs, jdr, jqr, jw, j0r, j0i = self._jj(lay, self._STEADY_KEYS)
        te = electrical_torque(x[jds], x[jqs], x[jdr], x[jqr], self.params)
        return {
            "i_ds": x[jds], "i_qs": x[jqs], "i_dr": x[jdr], "i_qr": x[jqr],
            "omega_r": x[jw], "torque": te,
            "i_0": complex(x[j0r], x[j0i]),
        }
