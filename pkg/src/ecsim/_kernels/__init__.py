"""Numeric kernel backend selection.

The compiled Cython extension is preferred when importable; the numpy
fallback is always available. ``ECSIM_PURE=1`` pins the fallback, and
:func:`use` switches backends at runtime (benchmarks, backend-parity tests).
"""

import os

from . import _pure

_IMPLS = {"pure": _pure}
if os.environ.get("ECSIM_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _fast
        _IMPLS["compiled"] = _fast
    except ImportError:
        pass

_current = _IMPLS.get("compiled", _pure)


def backend():
    """Name of the active backend: 'compiled' or 'pure'."""
    return "compiled" if _current is _IMPLS.get("compiled") else "pure"


def available_backends():
    return tuple(sorted(_IMPLS))


def use(name):
    """Select a backend by name; returns the previously active name."""
    global _current
    if name not in _IMPLS:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}")
    prev = backend()
    _current = _IMPLS[name]
    return prev


def assemble_dense(n, rows, cols, vals):
    return _current.assemble_dense(n, rows, cols, vals)


def lu_solve_inplace(a, b):
    return _current.lu_solve_inplace(a, b)


def coo_matvec(rows, cols, vals, x, n):
    return _current.coo_matvec(rows, cols, vals, x, n)
