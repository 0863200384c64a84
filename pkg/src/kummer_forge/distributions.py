"""Kummer, gamma and beta (first kind) laws.

Parameterizations
-----------------
``KummerParams(a, b, c)``
    density proportional to ``x**(a-1) * exp(-c x) * (1+x)**-(a+b)`` on
    ``(0, inf)``; ``a, c > 0``, ``b`` any real.
``GammaParams(shape, rate)``
    density proportional to ``y**(shape-1) * exp(-rate y)``.
``BetaParams(a, b)``
    density proportional to ``u**(a-1) * (1-u)**(b-1)`` on ``(0, 1)``.

Every function here takes one of these records as its first argument;
``DistributionSpec`` is their union.
"""

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import ClassVar, Union

import numpy as np
from scipy.special import betainc, betaln, gammainc, gammaln, xlogy

from .errors import DomainError, MomentDomainError, SamplerDegenerateError
from .quadrature import integrate_pieces, log_integral_halfline, log_integral_unit
from .rng import generator
from .specfun import DEFAULT_CONFIG, _critical_points, log_tricomi_integral, log_tricomi_u

__all__ = [
    "KummerParams", "GammaParams", "BetaParams", "DistributionSpec", "SampleBatch",
    "spec_from_dict", "spec_to_dict", "spec_from_json", "support",
    "log_norm_const", "log_kernel", "log_pdf", "pdf", "cdf",
    "moment", "log_moment", "survival_power_moment", "log_expectation",
    "expectation", "sample", "draw", "kummer_acceptance_rate",
]


def _check_positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer))
            and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class KummerParams:
    a: float
    b: float
    c: float
    family: ClassVar[str] = "kummer"

    def __post_init__(self):
        _check_positive("Kummer a", self.a)
        _check_positive("Kummer c", self.c)
        if not math.isfinite(self.b):
            raise DomainError(f"Kummer b must be finite, got {self.b!r}")


@dataclass(frozen=True)
class GammaParams:
    shape: float
    rate: float
    family: ClassVar[str] = "gamma"

    def __post_init__(self):
        _check_positive("gamma shape", self.shape)
        _check_positive("gamma rate", self.rate)


@dataclass(frozen=True)
class BetaParams:
    a: float
    b: float
    family: ClassVar[str] = "beta"

    def __post_init__(self):
        _check_positive("beta a", self.a)
        _check_positive("beta b", self.b)


DistributionSpec = Union[KummerParams, GammaParams, BetaParams]

_FAMILIES = {"kummer": KummerParams, "gamma": GammaParams, "beta": BetaParams}


def spec_from_dict(d):
    """Build a spec from ``{"family": "kummer", "a": 2, "b": 1, "c": 1}`` and friends."""
    d = dict(d)
    try:
        cls = _FAMILIES[str(d.pop("family")).lower()]
    except KeyError as exc:
        raise DomainError(f"unknown or missing family in {d!r}") from exc
    try:
        return cls(**{k: float(v) for k, v in d.items()})
    except TypeError as exc:
        raise DomainError(f"bad parameters for {cls.family}: {exc}") from exc


def spec_from_json(text):
    try:
        return spec_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise DomainError(f"spec is not valid JSON: {exc}") from exc


def spec_to_dict(spec):
    out = {"family": spec.family}
    out.update({k: float(v) for k, v in spec.__dict__.items()})
    return out


def support(spec):
    return (0.0, 1.0) if isinstance(spec, BetaParams) else (0.0, math.inf)


def _unsupported(spec):
    return TypeError(f"not a distribution spec: {spec!r}")


@lru_cache(maxsize=4096)
def log_norm_const(spec):
    """``log Z`` with ``pdf = kernel / Z`` and the kernels from the module docstring.

    Kummer: ``Z = Gamma(a) U(a, 1-b, c)``; gamma: ``Gamma(shape) rate**-shape``;
    beta: ``B(a, b)``.
    """
    if isinstance(spec, KummerParams):
        return log_tricomi_integral(spec.a, 1.0 - spec.b, spec.c)
    if isinstance(spec, GammaParams):
        return float(gammaln(spec.shape) - spec.shape * math.log(spec.rate))
    if isinstance(spec, BetaParams):
        return float(betaln(spec.a, spec.b))
    raise _unsupported(spec)


def log_kernel(spec, x):
    """Log of the unnormalized density; ``x`` must lie in the closed support."""
    x = np.asarray(x, dtype=float)
    if isinstance(spec, KummerParams):
        return xlogy(spec.a - 1.0, x) - spec.c * x - (spec.a + spec.b) * np.log1p(x)
    if isinstance(spec, GammaParams):
        return xlogy(spec.shape - 1.0, x) - spec.rate * x
    if isinstance(spec, BetaParams):
        return xlogy(spec.a - 1.0, x) + xlogy(spec.b - 1.0, 1.0 - x)
    raise _unsupported(spec)


def _check_support(spec, x):
    lo, hi = support(spec)
    bad = ~((x >= lo) & (x <= hi))
    if np.any(bad):
        raise DomainError(
            f"x={x[bad].ravel()[0]!r} outside the support [{lo}, {hi}] of {spec!r}")


def log_pdf(spec, x):
    """Log of the normalized density.

    Boundary points of the support are allowed and give the one-sided limit
    (finite, ``-inf`` or ``+inf`` depending on the shape parameter).
    """
    xa = np.asarray(x, dtype=float)
    _check_support(spec, xa)
    with np.errstate(divide="ignore"):
        out = log_kernel(spec, xa) - log_norm_const(spec)
    return float(out) if out.ndim == 0 else out


def pdf(spec, x):
    return np.exp(log_pdf(spec, x))


def _kummer_cdf(spec, x):
    """CDF at an array of points in ``(0, inf)`` via piecewise quadrature.

    The points are sorted and the density is integrated between consecutive
    ones, so one call costs O(n) panel evaluations regardless of spread.
    """
    a, b, c = spec.a, spec.b, spec.c
    log_z = log_norm_const(spec)
    pts = np.unique(x)
    lo = np.concatenate([[0.0], pts[:-1]])
    hi = pts

    def density(t):
        return np.exp(xlogy(a - 1.0, t) - c * t - (a + b) * np.log1p(t) - log_z)

    pieces = np.empty(pts.size)
    # First piece touches the origin; for a < 1 integrate in w = t**a.
    if a < 1.0:
        inv = 1.0 / a

        def head(w):
            t = w ** inv
            return np.exp(-c * t - (a + b) * np.log1p(t) - log_z) / a

        pieces[0] = integrate_pieces(head, [0.0], [pts[0] ** a], rel_tol=1e-12,
                                     abs_tol=1e-16)[0]
    else:
        pieces[0] = integrate_pieces(density, [0.0], [pts[0]], rel_tol=1e-12,
                                     abs_tol=1e-16)[0]
    if pts.size > 1:
        pieces[1:] = integrate_pieces(density, lo[1:], hi[1:], rel_tol=1e-10,
                                      abs_tol=1e-15)
    cum = np.cumsum(pieces)
    return np.clip(cum[np.searchsorted(pts, x)], 0.0, 1.0)


def cdf(spec, x):
    """``P(X <= x)``; points below/above the support clamp to 0/1."""
    xa = np.asarray(x, dtype=float)
    out = np.empty(xa.shape)
    flat = xa.ravel()
    res = out.ravel()
    lo, hi = support(spec)
    res[:] = np.nan
    res[flat <= lo] = 0.0
    res[flat >= hi] = 1.0
    inside = (flat > lo) & (flat < hi)
    if np.any(inside):
        v = flat[inside]
        if isinstance(spec, GammaParams):
            res[inside] = gammainc(spec.shape, spec.rate * v)
        elif isinstance(spec, BetaParams):
            res[inside] = betainc(spec.a, spec.b, v)
        elif isinstance(spec, KummerParams):
            res[inside] = _kummer_cdf(spec, v)
        else:
            raise _unsupported(spec)
    out = res.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


def _lower_shape(spec):
    return spec.shape if isinstance(spec, GammaParams) else spec.a


def log_moment(spec, s):
    """``log E X**s``; raises :class:`MomentDomainError` if the moment is infinite."""
    s = float(s)
    bound = _lower_shape(spec)
    if not s > -bound:
        name = "shape" if isinstance(spec, GammaParams) else "a"
        raise MomentDomainError(
            f"E X^{s:g} is infinite for {spec!r}: requires s > -{name} = {-bound:g}")
    if isinstance(spec, KummerParams):
        return log_tricomi_integral(spec.a + s, 1.0 + s - spec.b, spec.c) - log_norm_const(spec)
    if isinstance(spec, GammaParams):
        return float(gammaln(spec.shape + s) - gammaln(spec.shape) - s * math.log(spec.rate))
    if isinstance(spec, BetaParams):
        return float(betaln(spec.a + s, spec.b) - betaln(spec.a, spec.b))
    raise _unsupported(spec)


def moment(spec, s):
    """Real-order moment ``E X**s``.

    Kummer: ``Gamma(a+s) U(a+s, 1+s-b, c) / (Gamma(a) U(a, 1-b, c))``;
    gamma: ``Gamma(shape+s) / Gamma(shape) * rate**-s``;
    beta: ``B(a+s, b) / B(a, b)``.
    """
    return math.exp(log_moment(spec, s))


def survival_power_moment(spec, k):
    """``g_k = E (1+X)**-k`` for the Kummer and gamma families.

    ``k`` may be any nonnegative real; ``g_0 = 1``.
    """
    k = float(k)
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    if k == 0:
        return 1.0
    if isinstance(spec, KummerParams):
        return math.exp(log_tricomi_u(spec.a, 1.0 - spec.b - k, spec.c)
                        - log_tricomi_u(spec.a, 1.0 - spec.b, spec.c))
    if isinstance(spec, GammaParams):
        return math.exp(spec.shape * math.log(spec.rate)
                        + log_tricomi_u(spec.shape, 1.0 + spec.shape - k, spec.rate))
    if isinstance(spec, BetaParams):
        raise DomainError("survival_power_moment is defined for laws on (0, inf) only")
    raise _unsupported(spec)


def log_expectation(spec, log_weight=None, power=0.0, extra_points=(), cfg=DEFAULT_CONFIG):
    """``log E[X**power * exp(log_weight(X))]`` by direct quadrature.

    Independent of the closed forms above: the weighted kernel is
    integrated numerically and divided by the normalizer. ``log_weight``
    must be vectorized and bounded near the origin.
    """
    lw = (lambda t: 0.0) if log_weight is None else log_weight
    power = float(power)
    opts = dict(rel_tol=cfg.rel_tol, abs_tol=cfg.abs_tol, max_subdivisions=cfg.max_subdivisions)
    if isinstance(spec, BetaParams):
        lead0 = spec.a + power
        if not lead0 > 0:
            raise MomentDomainError(f"E X^{power:g} is infinite for {spec!r}")
        val = log_integral_unit(lw, lead0, spec.b, extra_points=extra_points, **opts)
        return val - log_norm_const(spec)
    lead = _lower_shape(spec) + power
    if not lead > 0:
        raise MomentDomainError(f"E X^{power:g} is infinite for {spec!r}")
    if isinstance(spec, KummerParams):
        a, b, c = spec.a, spec.b, spec.c
        crit = _critical_points(lead, lead + 1.0 - (a + b), c)

        def log_g(t):
            return -c * t - (a + b) * np.log1p(t) + lw(t)
    elif isinstance(spec, GammaParams):
        rate = spec.rate
        crit = ((lead - 1.0) / rate,) if lead > 1 else ()

        def log_g(t):
            return -rate * t + lw(t)
    else:
        raise _unsupported(spec)
    peak = max(crit) if crit else 1.0
    val = log_integral_halfline(log_g, lead, extra_points=tuple(crit) + tuple(extra_points),
                                peak_hint=peak, **opts)
    return val - log_norm_const(spec)


def expectation(spec, log_weight=None, power=0.0, extra_points=(), cfg=DEFAULT_CONFIG):
    return math.exp(log_expectation(spec, log_weight, power, extra_points, cfg))


@dataclass(frozen=True)
class SampleBatch:
    """Draws from ``spec`` tagged with the stream that produced them."""

    values: np.ndarray = field(repr=False)
    spec: DistributionSpec
    seed: int
    stream_id: int

    def __len__(self):
        return self.values.size


_WINDOW = 100_000
_MIN_ACCEPTANCE = 1e-4


def _kummer_proposal(spec):
    """Envelope for rejection sampling: returns ``(propose, log_accept)``.

    If ``a + b >= 0`` the envelope is Gamma(a, c) and the acceptance ratio
    ``(1+x)**-(a+b)`` is at most 1. Otherwise ``(1+x)**-(a+b)`` is bounded by
    ``(1+x)**m`` with ``m = ceil(-(a+b))``, whose binomial expansion turns the
    envelope into a finite mixture of Gamma(a+j, c), j = 0..m.
    """
    a, b, c = spec.a, spec.b, spec.c
    s = a + b
    if s >= 0:
        def propose(rng, size):
            return rng.standard_gamma(a, size) / c

        def log_accept(x):
            return -s * np.log1p(x)
        return propose, log_accept

    m = math.ceil(-s)
    j = np.arange(m + 1)
    log_w = (gammaln(m + 1) - gammaln(j + 1) - gammaln(m - j + 1)
             + gammaln(a + j) - (a + j) * math.log(c))
    probs = np.exp(log_w - log_w.max())
    probs /= probs.sum()
    shapes = a + j

    def propose(rng, size):
        comp = rng.choice(m + 1, size=size, p=probs)
        return rng.standard_gamma(shapes[comp]) / c

    def log_accept(x):
        return (-s - m) * np.log1p(x)
    return propose, log_accept


def kummer_acceptance_rate(spec):
    """Expected acceptance probability of the Kummer rejection sampler.

    It is the ratio of the Kummer normalizer to the envelope's total mass.
    """
    a, b, c = spec.a, spec.b, spec.c
    s = a + b
    if s >= 0:
        log_env = gammaln(a) - a * math.log(c)
    else:
        m = math.ceil(-s)
        j = np.arange(m + 1)
        log_w = (gammaln(m + 1) - gammaln(j + 1) - gammaln(m - j + 1)
                 + gammaln(a + j) - (a + j) * math.log(c))
        top = log_w.max()
        log_env = top + math.log(np.exp(log_w - top).sum())
    return math.exp(log_norm_const(spec) - log_env)


def _draw_kummer(spec, n, rng):
    propose, log_accept = _kummer_proposal(spec)
    out = np.empty(n)
    filled = trials = accepted = 0
    while filled < n:
        need = n - filled
        rate = accepted / trials if trials else 0.5
        size = int(min(max(1.2 * need / max(rate, _MIN_ACCEPTANCE) + 64, 1024), 4_000_000))
        x = propose(rng, size)
        u = rng.random(size)
        ok = (x > 0) & (np.log(u) < log_accept(x))
        take = x[ok][:need]
        out[filled:filled + take.size] = take
        filled += take.size
        trials += size
        accepted += int(ok.sum())
        if trials >= _WINDOW and accepted < _MIN_ACCEPTANCE * trials:
            raise SamplerDegenerateError(
                f"Kummer rejection sampler for {spec!r}: acceptance "
                f"{accepted}/{trials} below {_MIN_ACCEPTANCE:g}",
                accepted=accepted, trials=trials)
    return out


def _redraw_until(values, ok, regen):
    # Replace the rare draws that fall on the boundary of the support.
    while not ok(values).all():
        bad = ~ok(values)
        values[bad] = regen(int(bad.sum()))
    return values


def draw(spec, n, rng):
    """``n`` i.i.d. draws from ``spec`` using an existing generator."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if isinstance(spec, GammaParams):
        def regen(k):
            return rng.standard_gamma(spec.shape, k) / spec.rate
        return _redraw_until(regen(n), lambda v: v > 0, regen)
    if isinstance(spec, BetaParams):
        def regen(k):
            g1 = rng.standard_gamma(spec.a, k)
            g2 = rng.standard_gamma(spec.b, k)
            with np.errstate(invalid="ignore"):
                return g1 / (g1 + g2)
        return _redraw_until(regen(n), lambda v: (v > 0) & (v < 1), regen)
    if isinstance(spec, KummerParams):
        return _draw_kummer(spec, n, rng)
    raise _unsupported(spec)


def sample(spec, n, seed, stream_id=0):
    """``n`` i.i.d. draws, bit-reproducible for a given ``(seed, stream_id)``.

    Gamma uses numpy's Marsaglia-Tsang squeeze sampler, beta a ratio of two
    gammas, Kummer rejection from a gamma (mixture) envelope.
    """
    values = draw(spec, n, generator(seed, stream_id))
    return SampleBatch(values=values, spec=spec, seed=int(seed), stream_id=int(stream_id))
