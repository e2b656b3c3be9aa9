"""Pure-numpy reference implementations of the hot numeric kernels.

Same contracts as the compiled versions in ``_fast.pyx``; used whenever the
extension is unavailable or ``ECSIM_PURE=1`` is set.
"""

import numpy as np

# Pivot smaller than PIVOT_RTOL * max|A| is treated as exact zero.
PIVOT_RTOL = 1e-14


def assemble_dense(n, rows, cols, vals):
    """Accumulate COO triplets (duplicates add) into a dense n-by-n matrix."""
    a = np.zeros((n, n))
    np.add.at(a, (rows, cols), vals)
    return a


def lu_solve_inplace(a, b):
    """Solve a @ x = b by partial-pivot LU, overwriting both arguments.

    On success ``b`` holds the solution and 0 is returned; a zero pivot in
    column j returns j + 1 and leaves the arrays in a partially eliminated
    state.
    """
    n = a.shape[0]
    if n == 0:
        return 0
    tol = PIVOT_RTOL * np.max(np.abs(a))
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) <= tol:
            return k + 1
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[k], b[p] = b[p], b[k]
        m = a[k + 1:, k] / a[k, k]
        a[k + 1:, k + 1:] -= np.outer(m, a[k, k + 1:])
        b[k + 1:] -= m * b[k]
    for k in range(n - 1, -1, -1):
        b[k] = (b[k] - a[k, k + 1:] @ b[k + 1:]) / a[k, k]
    return 0


def coo_matvec(rows, cols, vals, x, n):
    """Return A @ x for the COO triplet form of A."""
    y = np.zeros(n)
    np.add.at(y, rows, vals * x[cols])
    return y
