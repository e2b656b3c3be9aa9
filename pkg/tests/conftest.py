import math
from pathlib import Path

import numpy as np
import pytest

from ecsim import MotorParams
from ecsim import _kernels

NETLIST_DIR = Path(__file__).resolve().parent.parent / "netlists"

# 20 hp, 460 V, 60 Hz squirrel-cage machine: rated constants used across
# the suite.
MOTOR_20HP = dict(
    r_s=0.2761, r_r=0.1645, l_ls=2.191e-3, l_lr=2.191e-3, l_m=76.14e-3,
    inertia=0.1, damping=0.01771, poles=2, load_torque=(10.0,),
    v_ll=460.0, freq=60.0)

# Documented reference operating point of that machine (three significant
# digits; currents are peak amperes).
REFERENCE_POINT = dict(
    omega_r=375.01, torque=16.64, i_ds=-11.36, i_qs=13.09,
    i_dr=11.56, i_qr=-0.49)

# Source phase-a angle that reproduces the reference current signs.
SOURCE_PHASE = math.pi


@pytest.fixture
def motor_params():
    return MotorParams(**MOTOR_20HP)


@pytest.fixture
def netlists():
    return NETLIST_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)


@pytest.fixture(params=sorted(_kernels.available_backends()))
def backend(request):
    """Run a test under each available kernel backend."""
    prev = _kernels.use(request.param)
    yield request.param
    _kernels.use(prev)
