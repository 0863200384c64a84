"""Tricomi confluent hypergeometric function of the second kind.

Evaluated directly from its Laplace-type integral

    U(a, b, z) = 1/Gamma(a) * int_0^inf exp(-z t) t**(a-1) (1+t)**(b-a-1) dt,

valid for ``a > 0`` and ``z > 0`` and any real ``b``. Everything is carried
in log space so that normalizing constants of Kummer laws with large shape
parameters neither overflow nor underflow.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .quadrature import log_integral_halfline

__all__ = ["QuadratureConfig", "DEFAULT_CONFIG", "tricomi_u", "log_tricomi_u",
           "log_tricomi_integral"]


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances for the adaptive quadrature behind :func:`tricomi_u`."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-300
    max_subdivisions: int = 200

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be at least 1")


DEFAULT_CONFIG = QuadratureConfig()


def _critical_points(a, b, z):
    # Zeros of d/dt [ -z t + (a-1) log t + (b-a-1) log(1+t) ]:
    #   z t^2 - (b - 2 - z) t - (a - 1) = 0
    p = b - 2.0 - z
    disc = p * p + 4.0 * z * (a - 1.0)
    if disc < 0:
        return ()
    root = math.sqrt(disc)
    return tuple(t for t in ((p + root) / (2 * z), (p - root) / (2 * z)) if t > 0)


def log_tricomi_integral(a, b, z, cfg=DEFAULT_CONFIG, extra_points=()):
    """``log int_0^inf exp(-z t) t**(a-1) (1+t)**(b-a-1) dt``, i.e. log(Gamma(a) U)."""
    a = float(a)
    b = float(b)
    z = float(z)
    if not (a > 0 and math.isfinite(a)):
        raise DomainError(f"tricomi_u requires a > 0, got a={a}")
    if not (z > 0 and math.isfinite(z)):
        raise DomainError(f"tricomi_u requires z > 0, got z={z}")
    if not math.isfinite(b):
        raise DomainError(f"tricomi_u requires finite b, got b={b}")
    power = b - a - 1.0

    def log_g(t):
        return -z * t + power * np.log1p(t)

    crit = _critical_points(a, b, z)
    peak = max(crit) if crit else 1.0
    return log_integral_halfline(
        log_g, a,
        extra_points=tuple(crit) + tuple(extra_points),
        peak_hint=peak,
        rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol,
        max_subdivisions=cfg.max_subdivisions,
    )


def log_tricomi_u(a, b, z, cfg=DEFAULT_CONFIG):
    """Natural log of U(a, b, z); stays finite where U itself would overflow."""
    return log_tricomi_integral(a, b, z, cfg) - float(gammaln(a))


def tricomi_u(a, b, z, cfg=DEFAULT_CONFIG):
    """Tricomi U(a, b, z) for ``a > 0``, ``z > 0`` and real ``b``.

    Parameters
    ----------
    a : float
        First parameter, strictly positive.
    b : float
        Second parameter, any real value.
    z : float
        Argument, strictly positive.
    cfg : QuadratureConfig, optional
        Quadrature tolerances.

    Returns
    -------
    float
        U(a, b, z) to relative accuracy about ``cfg.rel_tol``.

    Raises
    ------
    DomainError
        If ``a <= 0`` or ``z <= 0``.
    QuadratureError
        If the adaptive quadrature does not converge.

    Examples
    --------
    >>> round(tricomi_u(1, 2, 2), 12)
    0.5
    """
    return math.exp(log_tricomi_u(a, b, z, cfg))
