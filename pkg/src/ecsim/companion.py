"""Trapezoidal companion models and the bilinear-product linearization.

A set of n magnetically coupled coils obeys v_i = sum_j L_ij dI_j/dt. The
trapezoidal rule turns that into the algebraic update

    v_i(t+dt) = -v_hist_i + sum_j (2 L_ij / dt) I_j(t+dt)
    v_hist_i  =  v_i(t) + sum_j (2 L_ij / dt) I_j(t)

so each coil stamps as an equivalent resistance 2*L_ii/dt, one
current-controlled transresistance 2*L_ij/dt per coupled coil, and a history
voltage source. The same numbers are reused by the machine model for the
flux-derivative terms of its winding equations.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInductanceError


@dataclass(frozen=True)
class CoilHistory:
    """Per-coil state carried between steps: currents and inductive voltages."""

    currents: tuple
    voltages: tuple


@dataclass(frozen=True)
class CompanionStamp:
    """Trapezoidal equivalent of one coil at the next time point.

    ``coeffs[j]`` is 2*L_ij/dt; ``coeffs[i]`` (the self term) is ``r_eq``.
    """

    r_eq: float
    coeffs: tuple
    v_hist: float


def validate_inductance(l_matrix):
    l_matrix = np.asarray(l_matrix, dtype=float)
    if l_matrix.ndim != 2 or l_matrix.shape[0] != l_matrix.shape[1]:
        raise InvalidInductanceError("inductance matrix must be square")
    if not np.allclose(l_matrix, l_matrix.T, rtol=1e-12, atol=0.0):
        raise InvalidInductanceError("inductance matrix must be symmetric")
    if np.any(np.diag(l_matrix) <= 0.0):
        raise InvalidInductanceError("self inductances must be > 0")
    return l_matrix


def companion_terms(l_rows, scale, i_prev, v_prev):
    """Lean core of the trapezoidal update for pre-validated coil blocks.

    ``l_rows`` are the inductance-matrix rows as plain sequences and
    ``scale`` is 2/dt. Returns (coefficient rows 2*L_ij/dt, history
    voltages), everything as tuples of floats; this is the per-iteration
    path, so no numpy and no re-validation.
    """
    coeff_rows = []
    v_hist = []
    for i, row in enumerate(l_rows):
        coeffs = tuple(scale * lij for lij in row)
        acc = v_prev[i]
        for c, ij in zip(coeffs, i_prev):
            acc += c * ij
        coeff_rows.append(coeffs)
        v_hist.append(acc)
    return coeff_rows, v_hist


def companion_coupled_coils(l_matrix, dt, hist):
    """Companion stamps for one coupled-coil block at step size dt.

    ``hist`` supplies the coil currents and inductive voltages at the
    previous time point (all zeros for a quiescent start).
    """
    l_matrix = validate_inductance(l_matrix)
    if dt <= 0.0:
        raise InvalidInductanceError("time step must be > 0")
    n = l_matrix.shape[0]
    if len(hist.currents) != n or len(hist.voltages) != n:
        raise InvalidInductanceError("history length must match coil count")
    coeff_rows, v_hist = companion_terms(l_matrix.tolist(), 2.0 / dt,
                                         hist.currents, hist.voltages)
    return [CompanionStamp(coeff_rows[i][i], coeff_rows[i], v_hist[i])
            for i in range(n)]


def taylor_linearize_product(x_k, y_k):
    """First-order model of x*y about (x_k, y_k): x*y ~ a_x*x + a_y*y + c.

    Exact at the expansion point; the remainder is (x-x_k)*(y-y_k).
    """
    return y_k, x_k, -x_k * y_k
