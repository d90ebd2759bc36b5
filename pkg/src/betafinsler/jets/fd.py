"""Finite-difference differentiator used as an independent oracle.

Nothing here touches :class:`Jet`.  Functions are evaluated on mpmath
numbers so that nested central differences of order four stay far above
roundoff; the step size then controls the only error left, truncation,
which one Richardson pass reduces from O(h^2) to O(h^4).
"""
from __future__ import annotations

import itertools

import mpmath
import numpy as np

DEFAULT_STEP = 1e-5
DEFAULT_DPS = 40


def central_partial(func, args, slots, h=DEFAULT_STEP, richardson=True, dps=DEFAULT_DPS):
    """Mixed partial of ``func(*args)`` by nested central differences.

    ``args`` is a flat sequence of coordinates; ``slots`` lists the argument
    positions to differentiate (repeat a slot for higher order).  ``func``
    must accept mpmath numbers and return a scalar (or an array of them).
    """
    with mpmath.workdps(dps):
        base = [mpmath.mpf(float(a)) for a in args]
        d1 = _stencil(func, base, slots, mpmath.mpf(h))
        if not richardson or not slots:
            return _to_float(d1)
        d2 = _stencil(func, base, slots, 2 * mpmath.mpf(h))
        # nested first differences carry O(h^2) error whatever the order
        return _to_float((4 * d1 - d2) / 3)


def _stencil(func, base, slots, h):
    total = None
    for signs in itertools.product((1, -1), repeat=len(slots)):
        pt = list(base)
        for s, sign in zip(slots, signs):
            pt[s] = pt[s] + sign * h
        val = func(*pt)
        weight = int(np.prod(signs)) if signs else 1
        term = _scale(val, weight)
        total = term if total is None else total + term
    return _scale(total, 1 / (2 * h) ** len(slots)) if slots else total


def _scale(v, a):
    if isinstance(v, (list, tuple, np.ndarray)):
        return np.array([x * a for x in np.ravel(v)], dtype=object).reshape(np.shape(v))
    return v * a


def _to_float(v):
    if isinstance(v, np.ndarray):
        return np.array([float(x) for x in v.ravel()]).reshape(v.shape)
    return float(v)


def derivative(fn, t, order=1, h=DEFAULT_STEP, richardson=True, dps=DEFAULT_DPS):
    """Ordinary derivative of a univariate function."""
    return central_partial(lambda s: fn(s), [t], [0] * order, h, richardson, dps)
