"""The two bivariate maps under which Kummer/gamma pairs stay independent.

HV map::

    U = Y / (1 + X),      V = X (1 + U)          (so U + V = X + Y)

KV map::

    U = (1 + 1/(X+Y)) / (1 + 1/X),   V = X + Y   (U always in (0, 1))

All functions accept scalars or equal-length arrays and return a
:class:`PositivePair` of the same kind.
"""

from typing import NamedTuple

import numpy as np

from .errors import DomainError, ShapeError

__all__ = ["PositivePair", "hv_forward", "hv_inverse", "kv_forward", "kv_inverse"]


class PositivePair(NamedTuple):
    first: np.ndarray
    second: np.ndarray


def _prepare(x, y, names):
    xa = np.asarray(x, dtype=float)
    ya = np.asarray(y, dtype=float)
    if xa.shape != ya.shape:
        raise ShapeError(f"{names[0]} and {names[1]} have shapes {xa.shape} and {ya.shape}")
    for name, arr in zip(names, (xa, ya)):
        bad = ~(arr > 0) | ~np.isfinite(arr)
        if np.any(bad):
            raise DomainError(f"{name} must be finite and positive, got {arr[bad].ravel()[0]!r}")
    return xa, ya


def _pack(first, second):
    if np.ndim(first) == 0:
        return PositivePair(float(first), float(second))
    return PositivePair(first, second)


def hv_forward(x, y):
    """``(u, v) = (y/(1+x), x(1+u))``."""
    x, y = _prepare(x, y, ("x", "y"))
    u = y / (1.0 + x)
    return _pack(u, x * (1.0 + u))


def hv_inverse(u, v):
    """Inverse of :func:`hv_forward`: ``x = v/(1+u)``, ``y = u(1+x)``."""
    u, v = _prepare(u, v, ("u", "v"))
    x = v / (1.0 + u)
    return _pack(x, u * (1.0 + x))


def kv_forward(x, y):
    """``v = x + y``, ``u = x(1+v) / (v(1+x))``.

    Written without the nested reciprocals of the usual display; the two
    forms agree algebraically and this one keeps full precision for large
    arguments.
    """
    x, y = _prepare(x, y, ("x", "y"))
    v = x + y
    u = (x / v) * ((1.0 + v) / (1.0 + x))
    # x < v guarantees u < 1 exactly; rounding can land on 1.0 when y << x.
    u = np.minimum(u, np.nextafter(1.0, 0.0))
    return _pack(u, v)


def kv_inverse(u, v):
    """Inverse of :func:`kv_forward`: ``x = u v / (1 + v (1-u))``, ``y = v - x``."""
    u, v = _prepare(u, v, ("u", "v"))
    if np.any(u >= 1.0):
        raise DomainError(f"u must lie in (0, 1), got {u[u >= 1.0].ravel()[0]!r}")
    one_minus_u = 1.0 - u
    denom = 1.0 + v * one_minus_u
    x = u * v / denom
    # y = v - x rewritten to avoid cancellation: v (1 + v)(1 - u) / denom
    y = v * (1.0 + v) * one_minus_u / denom
    return _pack(x, y)
