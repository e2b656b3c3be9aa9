"""Machine model: transformations, fluxes, torque, and shared stamps."""

import cmath
import math

import numpy as np
import pytest

from ecsim import (
    MotorParams,
    MotorState,
    NewtonConfig,
    dq_transform,
    electrical_torque,
    flux_linkages,
    inverse_dq_transform,
    mechanical_derivative,
)
from ecsim.circuit import STEADY, TRANSIENT, SteadyContext, build_system
from ecsim.errors import InvalidParamsError
from ecsim.machine import LAMBDA, MotorHistory
from ecsim.companion import CoilHistory
from ecsim.steady import im_steady_state, three_phase_motor_circuit
from ecsim.circuit import TransientContext
from ecsim.transient import HistoryState

from conftest import MOTOR_20HP, REFERENCE_POINT, SOURCE_PHASE
from oracles import balanced_three_phase, induction_equivalent


def terminal_phasors(params, phase=SOURCE_PHASE):
    return balanced_three_phase(params.v_peak * cmath.exp(1j * phase))


# -- transformations ------------------------------------------------------

def test_dq_aligned_balanced_set():
    assert dq_transform((1.0, -0.5, -0.5), 0.0) == pytest.approx((0.0, 1.0, 0.0))


def test_dq_zero_input():
    assert dq_transform((0.0, 0.0, 0.0), 1.3) == (0.0, 0.0, 0.0)


def test_dq_pure_zero_sequence():
    for theta in (0.0, 0.7, 2.0):
        f0, fd, fq = dq_transform((1.0, 1.0, 1.0), theta)
        assert f0 == pytest.approx(1.0, abs=1e-15)
        assert fd == pytest.approx(0.0, abs=1e-15)
        assert fq == pytest.approx(0.0, abs=1e-15)


def test_inverse_zero_sequence_column():
    assert inverse_dq_transform((1.0, 0.0, 0.0), 0.42) == pytest.approx((1.0, 1.0, 1.0))


def test_inverse_d_axis_column():
    a, b, c = inverse_dq_transform((0.0, 1.0, 0.0), 0.0)
    assert (a, b, c) == pytest.approx((1.0, math.cos(-LAMBDA), math.cos(LAMBDA)))
    assert (a, b, c) == pytest.approx((1.0, -0.5, -0.5))


def test_round_trip_is_identity(rng):
    for _ in range(200):
        f = tuple(rng.normal(size=3))
        theta = rng.uniform(0.0, 2.0 * math.pi)
        back = inverse_dq_transform(dq_transform(f, theta), theta)
        assert max(abs(x - y) for x, y in zip(f, back)) <= 1e-13


# -- fluxes, torque, mechanics ---------------------------------------------

def test_flux_zero_currents(motor_params):
    assert flux_linkages(0.0, 0.0, 0.0, 0.0, motor_params) == (0.0, 0.0, 0.0, 0.0)


def test_flux_unit_stator_current(motor_params):
    psi_ds, psi_qs, psi_dr, psi_qr = flux_linkages(1.0, 0.0, 0.0, 0.0, motor_params)
    assert psi_ds == pytest.approx(0.078331, abs=1e-9)
    assert psi_dr == pytest.approx(0.07614, abs=1e-9)
    assert psi_qs == 0.0 and psi_qr == 0.0


def test_flux_superposition(motor_params, rng):
    a = rng.normal(size=4)
    b = rng.normal(size=4)
    fa = np.array(flux_linkages(*a, motor_params))
    fb = np.array(flux_linkages(*b, motor_params))
    fab = np.array(flux_linkages(*(a + b), motor_params))
    assert np.max(np.abs(fab - (fa + fb))) <= 1e-15


def test_torque_reference_currents(motor_params):
    te = electrical_torque(REFERENCE_POINT["i_ds"], REFERENCE_POINT["i_qs"],
                           REFERENCE_POINT["i_dr"], REFERENCE_POINT["i_qr"],
                           motor_params)
    assert te == pytest.approx(REFERENCE_POINT["torque"], rel=5e-3)


def test_torque_zero_and_antisymmetry(motor_params, rng):
    assert electrical_torque(0.0, 0.0, 0.0, 0.0, motor_params) == 0.0
    ids, iqs, idr, iqr = rng.normal(size=4)
    t1 = electrical_torque(ids, iqs, idr, iqr, motor_params)
    t2 = electrical_torque(idr, iqr, ids, iqs, motor_params)
    assert t1 == pytest.approx(-t2, rel=1e-12)


def test_mechanical_balance(motor_params):
    p = MotorParams(**{**MOTOR_20HP, "damping": 0.0})
    assert mechanical_derivative(10.0, 100.0, p) == 0.0


def test_mechanical_reference_point(motor_params):
    # printed reference values balance within rounding
    acc = mechanical_derivative(REFERENCE_POINT["torque"],
                                REFERENCE_POINT["omega_r"], motor_params)
    assert abs(acc) < 0.05


def test_mechanical_stall(motor_params):
    assert mechanical_derivative(0.0, 0.0, motor_params) == pytest.approx(-100.0)


def test_negative_load_torque_rejected(motor_params):
    p = MotorParams(**{**MOTOR_20HP, "load_torque": (-5.0,)})
    with pytest.raises(InvalidParamsError):
        mechanical_derivative(0.0, 10.0, p)


def test_params_validation():
    with pytest.raises(InvalidParamsError):
        MotorParams(**{**MOTOR_20HP, "r_s": 0.0})
    with pytest.raises(InvalidParamsError):
        MotorParams(**{**MOTOR_20HP, "poles": 3})
    with pytest.raises(InvalidParamsError):
        MotorParams(**{**MOTOR_20HP, "inertia": -1.0})


def test_load_torque_polynomial():
    p = MotorParams(**{**MOTOR_20HP, "load_torque": (2.0, 0.5, 0.01)})
    assert p.load_torque_at(3.0) == pytest.approx(2.0 + 1.5 + 0.09)
    assert p.load_torque_slope(3.0) == pytest.approx(0.5 + 0.06)


def test_motor_state_fluxes_consistent(motor_params, rng):
    s = MotorState(*rng.normal(size=4))
    assert s.fluxes(motor_params) == flux_linkages(
        s.i_ds, s.i_qs, s.i_dr, s.i_qr, motor_params)


# -- stamps shared by both analyses -----------------------------------------

def test_steady_solution_zeroes_motor_rows(motor_params):
    from ecsim import solve_power_flow
    c = three_phase_motor_circuit(motor_params, terminal_phasors(motor_params)[0],
                                  60.0, name="m1")
    sol = solve_power_flow(c)
    lay = c.layout(STEADY)
    system = build_system(c, sol.x, SteadyContext(sol.omega))
    resid = system.matvec(sol.x) - system.rhs
    rows = [lay.internal("m1", k) for k in
            ("ids", "iqs", "idr", "iqr", "wr", "i0r", "i0i")]
    assert max(abs(resid[r]) for r in rows) <= 1e-9


def test_locked_rotor_matches_equivalent_circuit(motor_params):
    sol = im_steady_state(motor_params, terminal_phasors(motor_params), 60.0,
                          pin_speed=0.0)
    m = sol.motors["motor"]
    i_mag = math.hypot(m["i_ds"], m["i_qs"])
    i_ref, _, _ = induction_equivalent(1.0, motor_params.v_peak, 60.0,
                                       **{k: MOTOR_20HP[k] for k in
                                          ("r_s", "r_r", "l_ls", "l_lr", "l_m")})
    assert i_mag == pytest.approx(i_ref, rel=1e-6)


def test_balanced_run_keeps_zero_sequence_at_zero(motor_params):
    from ecsim import run_transient, TimeGrid
    c = three_phase_motor_circuit(motor_params, terminal_phasors(motor_params)[0],
                                  60.0, name="m1")
    waves = run_transient(c, TimeGrid(0.0, 0.02, 1e-4), NewtonConfig())
    assert np.max(np.abs(waves["m1.i0s"])) < 1e-10


def test_frame_shift_leaves_torque_and_speed(motor_params):
    sols = []
    for delta in (0.0, 0.83):
        term = balanced_three_phase(
            motor_params.v_peak * cmath.exp(1j * (SOURCE_PHASE + delta)))
        sols.append(im_steady_state(motor_params, term, 60.0).motors["motor"])
    a, b = sols
    assert b["omega_r"] == pytest.approx(a["omega_r"], rel=1e-9)
    assert b["torque"] == pytest.approx(a["torque"], rel=1e-9)
    # current pair rotates with the source: conjugate-frame rotation by -delta
    ia = complex(a["i_ds"], a["i_qs"])
    ib = complex(b["i_ds"], b["i_qs"])
    assert ib == pytest.approx(ia * cmath.exp(-1j * 0.83), rel=1e-9)


def test_stall_passivity(motor_params, rng):
    # locked rotor, any balanced excitation: average input power >= 0
    for _ in range(5):
        mag = rng.uniform(10.0, 400.0)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        term = balanced_three_phase(mag * cmath.exp(1j * ang))
        sol = im_steady_state(motor_params, term, 60.0, pin_speed=0.0)
        m = sol.motors["motor"]
        v_primed = complex(term[0]).conjugate()
        i_primed = complex(m["i_ds"], m["i_qs"])
        p_in = 1.5 * (v_primed * i_primed.conjugate()).real
        assert p_in >= 0.0


def _random_motor_context(motor_params, rng, lay):
    rec = MotorHistory(
        d_axis=CoilHistory(tuple(rng.normal(size=2)), tuple(rng.normal(size=2))),
        q_axis=CoilHistory(tuple(rng.normal(size=2)), tuple(rng.normal(size=2))),
        zero=CoilHistory((rng.normal(),), (rng.normal(),)),
        omega_r=rng.normal(), p_omega_r=rng.normal())
    hist = HistoryState(0.0, None, {"m1": rec})
    return TransientContext(1e-4, 1e-4, hist)


@pytest.mark.parametrize("mode", [TRANSIENT, STEADY])
def test_jacobian_matches_finite_differences(motor_params, rng, mode):
    c = three_phase_motor_circuit(motor_params, -motor_params.v_peak, 60.0,
                                  name="m1")
    lay = c.layout(mode)
    if mode == TRANSIENT:
        ctx = _random_motor_context(motor_params, rng, lay)
    else:
        ctx = SteadyContext(motor_params.omega_s)
    x = rng.normal(size=lay.dimension) * 10.0
    if mode == STEADY:
        x[lay.internal("m1", "wr")] = 0.9 * motor_params.omega_s
    system = build_system(c, x, ctx)
    jac = system.to_dense()

    def residual(y):
        s = build_system(c, y, ctx)
        return s.matvec(y) - s.rhs

    motor_rows = [lay.internal("m1", k)
                  for k in c.element("m1").internal_names(mode)]
    for j in range(lay.dimension):
        h = 1e-5 * max(1.0, abs(x[j]))
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        col = (residual(xp) - residual(xm)) / (2.0 * h)
        for r in motor_rows:
            scale = max(1.0, abs(jac[r, j]))
            assert abs(col[r] - jac[r, j]) <= 1e-6 * scale
