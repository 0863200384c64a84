"""Recover input laws from regression constants, exponential-family tilts,
and the end-to-end sample characterization pipeline.

Recovery maps
-------------
HV regressions. ``E(V | U) = alpha`` and ``E(1/V | U) = beta`` with
``alpha * beta > 1`` force ``X ~ Kummer(A, c - A, p)`` and ``Y ~ Gamma(c, p)``
where ``A = alpha beta / (alpha beta - 1)`` and ``p = beta / (alpha beta - 1)``.

HV moment ratios. ``E(V^(r+1) | U) / E(V^r | U) = alpha_{r+1}`` and the same
ratio one order lower, ``alpha_r``, give ``A = alpha_{r+1} / (alpha_{r+1} - alpha_r) - r``
and ``p = 1 / (alpha_{r+1} - alpha_r)``.

KV regressions and ratios come in two versions. The *printed* maps are
the ones stated in the source theorems. The *consistent* maps are the
exact inverses of the forward statement (``U ~ Beta(a, b)`` implies
``E U = a/(a+b)`` and ``E U^-1 = (a+b-1)/(a-1)``); the two disagree, and
both are exposed so the discrepancy stays visible.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (BetaParams, GammaParams, KummerParams, cdf,
                            kummer_acceptance_rate)
from .errors import (ConstraintError, DomainError, MomentDomainError, SampleSizeError,
                     ShapeError)
from .report import Check, SuiteReport
from .rng import DEFAULT_SEED, derive_seed
from .stats import (DEFAULT_SIGNIFICANCE, independence_test, ks_test,
                    regression_constancy_test)

__all__ = [
    "RegressionConstants", "RatioConstants", "TiltSpec", "LawPair",
    "recover_hv_regression", "recover_hv_ratio",
    "hv_ratio_from_second_moments", "hv_ratio_from_inverse_moments",
    "recover_kv_regression", "recover_kv_ratio",
    "recover_kv_regression_consistent", "recover_kv_ratio_consistent",
    "kv_ratio_from_moments", "kv_ratio_from_inverse_moments",
    "kv_moment_corollary_printed", "kv_inverse_moment_corollary_printed",
    "kv_forward_consistency", "tilt_params", "tilt_log_weight",
    "characterize_from_samples", "MIN_PAIRS",
]

MIN_PAIRS = 1000


def _finite(name, value):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class RegressionConstants:
    """``alpha = E(V|U)`` (or ``E(U|V)``), ``beta = E(1/V|U)`` (or ``E(1/U|V)``), shape ``c``."""

    alpha: float
    beta: float
    c: float

    def __post_init__(self):
        for name in ("alpha", "beta", "c"):
            v = _finite(name, getattr(self, name))
            if not v > 0:
                raise DomainError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class RatioConstants:
    """Two consecutive conditional moment ratios.

    ``alpha_r = E(W^r|.) / E(W^(r-1)|.)`` and
    ``alpha_r1 = E(W^(r+1)|.) / E(W^r|.)``, with ``r`` an integer.
    """

    r: int
    alpha_r: float
    alpha_r1: float
    c: float

    def __post_init__(self):
        if int(self.r) != self.r:
            raise DomainError(f"r must be an integer, got {self.r!r}")
        for name in ("alpha_r", "alpha_r1", "c"):
            v = _finite(name, getattr(self, name))
            if not v > 0:
                raise DomainError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class LawPair:
    """The recovered law of ``X`` and of ``Y``."""

    x: KummerParams
    y: GammaParams


# HV side


def recover_hv_regression(k):
    """Input laws from constant regressions ``E(V|U) = alpha``, ``E(1/V|U) = beta``."""
    ab = k.alpha * k.beta
    if not ab > 1:
        raise ConstraintError(f"constraint αβ>1 violated: alpha*beta = {ab:g}")
    shape = ab / (ab - 1.0)
    rate = k.beta / (ab - 1.0)
    return LawPair(KummerParams(shape, k.c - shape, rate), GammaParams(k.c, rate))


def recover_hv_ratio(k):
    """Input laws from constant moment ratios of ``V`` given ``U``."""
    gap = k.alpha_r1 - k.alpha_r
    if not gap > 0:
        raise ConstraintError(
            f"constraint α_(r+1)>α_r violated: {k.alpha_r1:g} <= {k.alpha_r:g}")
    shape = k.alpha_r1 / gap - k.r
    if not shape > 0:
        raise ConstraintError(
            f"constraint α_(r+1)/(α_(r+1)-α_r)>r violated: {k.alpha_r1 / gap:g} <= {k.r}")
    rate = 1.0 / gap
    return LawPair(KummerParams(shape, k.c - shape, rate), GammaParams(k.c, rate))


def hv_ratio_from_second_moments(a, b, c):
    """Constants for ``E(V|U) = a`` and ``E(V^2|U) = b``: ``r = 1``, ``alpha_1 = a``, ``alpha_2 = b/a``.

    Requires ``b > a^2``, a positive conditional variance.
    """
    a, b = _finite("a", a), _finite("b", b)
    if not (a > 0 and b > a * a):
        raise ConstraintError(f"constraint b>a² violated: a={a:g}, b={b:g}")
    return RatioConstants(1, a, b / a, c)


def hv_ratio_from_inverse_moments(a, b, c):
    """Constants for ``E(1/V|U) = a`` and ``E(1/V^2|U) = b`` (``r = -1``).

    ``alpha_0 = 1/a`` and ``alpha_-1 = a/b``; requires ``b > a^2``.
    """
    a, b = _finite("a", a), _finite("b", b)
    if not (a > 0 and b > a * a):
        raise ConstraintError(f"constraint b>a² violated: a={a:g}, b={b:g}")
    return RatioConstants(-1, a / b, 1.0 / a, c)


# KV side


def _kv_regression_domain(k):
    if not (0 < k.alpha < 1 < k.beta):
        raise ConstraintError(
            f"constraint 0<α<1<β violated: alpha={k.alpha:g}, beta={k.beta:g}")


def recover_kv_regression(k):
    """Printed map for constant ``E(U|V) = alpha``, ``E(1/U|V) = beta``.

    ``X ~ Kummer(1 + (1-alpha)/(alpha beta), (1-alpha)(beta-1)/(alpha beta), c)``,
    ``Y ~ Gamma((1-alpha)(beta-1)/(alpha beta), c)``. Its Beta shapes do not
    reproduce ``alpha`` and ``beta``; see :func:`kv_forward_consistency`.
    """
    _kv_regression_domain(k)
    ab = k.alpha * k.beta
    shape = 1.0 + (1.0 - k.alpha) / ab
    second = (1.0 - k.alpha) * (k.beta - 1.0) / ab
    return LawPair(KummerParams(shape, second, k.c), GammaParams(second, k.c))


def recover_kv_regression_consistent(k):
    """Exact inverse of the forward KV statement for constant regressions.

    Solves ``a/(a+b) = alpha``, ``(a+b-1)/(a-1) = beta`` and returns
    ``X ~ Kummer(a, b, c)``, ``Y ~ Gamma(b, c)``.
    """
    _kv_regression_domain(k)
    ab = k.alpha * k.beta
    if not ab > 1:
        raise ConstraintError(f"the consistent inverse needs αβ>1, got alpha*beta = {ab:g}")
    a = k.alpha * (k.beta - 1.0) / (ab - 1.0)
    b = (1.0 - k.alpha) * (k.beta - 1.0) / (ab - 1.0)
    return LawPair(KummerParams(a, b, k.c), GammaParams(b, k.c))


def _kv_ratio_domain(k):
    if not (0 < k.alpha_r < 1 and 0 < k.alpha_r1 < 1):
        raise ConstraintError(
            f"constraint α_r,α_(r+1)∈(0,1) violated: {k.alpha_r:g}, {k.alpha_r1:g}")


def recover_kv_ratio(k):
    """Printed map for constant moment ratios of ``U`` given ``V``.

    ``X ~ Kummer(alpha_r (1-alpha_{r+1}) / alpha_{r+1} - r + 1,
    (1-alpha_r)(1-alpha_{r+1}) / alpha_{r+1}, c)``, ``Y ~ Gamma(second, c)``.
    """
    _kv_ratio_domain(k)
    ar, ar1, r = k.alpha_r, k.alpha_r1, k.r
    shape = ar * (1.0 - ar1) / ar1 - r + 1.0
    if not shape > 0:
        raise ConstraintError(
            f"constraint α_r(1-α_(r+1))/α_(r+1)>r-1 violated: shape {shape:g}")
    second = (1.0 - ar) * (1.0 - ar1) / ar1
    return LawPair(KummerParams(shape, second, k.c), GammaParams(second, k.c))


def recover_kv_ratio_consistent(k):
    """Exact inverse of the forward KV statement for constant moment ratios.

    With ``d = alpha_{r+1} - alpha_r``: ``a = alpha_{r+1}(1 - alpha_r)/d - r`` and
    ``b = (1 - alpha_r)(1 - alpha_{r+1})/d``.
    """
    _kv_ratio_domain(k)
    ar, ar1, r = k.alpha_r, k.alpha_r1, k.r
    gap = ar1 - ar
    if not gap > 0:
        raise ConstraintError(f"the consistent inverse needs α_(r+1)>α_r, got {ar1:g} <= {ar:g}")
    a = ar1 * (1.0 - ar) / gap - r
    if not a > 0:
        raise ConstraintError(f"recovered Kummer shape {a:g} is not positive")
    b = (1.0 - ar) * (1.0 - ar1) / gap
    return LawPair(KummerParams(a, b, k.c), GammaParams(b, k.c))


def kv_ratio_from_moments(a, b, c):
    """Constants for ``E(U|V) = a``, ``E(U^2|V) = b``: ``r = 1``, ``alpha_1 = a``, ``alpha_2 = b/a``."""
    a, b = _finite("a", a), _finite("b", b)
    if not (0 < b < a < 1):
        raise ConstraintError(f"constraint 0<b<a<1 violated: a={a:g}, b={b:g}")
    return RatioConstants(1, a, b / a, c)


def kv_ratio_from_inverse_moments(a, b, c):
    """Constants for ``E(1/U|V) = a``, ``E(1/U^2|V) = b``: ``r = -1``, ``alpha_0 = 1/a``, ``alpha_-1 = a/b``."""
    a, b = _finite("a", a), _finite("b", b)
    if not (1 < a < b):
        raise ConstraintError(f"constraint 1<a<b violated: a={a:g}, b={b:g}")
    return RatioConstants(-1, a / b, 1.0 / a, c)


def kv_moment_corollary_printed(a, b, c):
    """Parameters displayed for ``E(U|V) = a``, ``E(U^2|V) = b``: ``(kummer_a, kummer_b, c)``.

    Returned as raw numbers since they need not form a valid law.
    """
    return (a * (a - b) / b, (1.0 - a) * (b - a) / b, float(c))


def kv_inverse_moment_corollary_printed(a, b, c):
    """Parameters displayed for ``E(1/U|V) = a``, ``E(1/U^2|V) = b``."""
    return (a * (a - 1.0) / b, (a - 1.0) * (b - a) / b, float(c))


def kv_forward_consistency(k):
    """Compare the printed and consistent KV regression inverses.

    For each, the Beta shapes implied for ``U`` are pushed forward to
    ``(E U, E 1/U)`` and compared with the requested ``(alpha, beta)``.
    """
    out = {}
    for label, fn in (("printed", recover_kv_regression),
                      ("consistent", recover_kv_regression_consistent)):
        try:
            pair = fn(k)
        except ConstraintError as exc:
            out[label] = {"error": str(exc)}
            continue
        # U ~ Beta(a, b) with a the Kummer shape of X and b the gamma shape of Y.
        a, b = pair.x.a, pair.y.shape
        mean_u = a / (a + b)
        inv_u = (a + b - 1.0) / (a - 1.0) if a > 1 else math.inf
        out[label] = {
            "x": (pair.x.a, pair.x.b, pair.x.c),
            "y": (pair.y.shape, pair.y.rate),
            "implied_alpha": mean_u,
            "implied_beta": inv_u,
            "alpha_error": abs(mean_u - k.alpha),
            "beta_error": abs(inv_u - k.beta),
        }
    return out


# Tilts


@dataclass(frozen=True)
class TiltSpec:
    """Reweighting of a density.

    ``kind`` is ``"power"`` (weight ``x^r``), ``"ratio"`` (weight
    ``(x/(1+x))^r``) or ``"exponential"`` (weight ``exp(eta x)`` with ``eta < 0``).
    """

    kind: str
    parameter: float

    def __post_init__(self):
        if self.kind not in ("power", "ratio", "exponential"):
            raise DomainError(f"unknown tilt kind {self.kind!r}")
        _finite("tilt parameter", self.parameter)
        if self.kind == "exponential" and not self.parameter < 0:
            raise DomainError(f"exponential tilt needs eta < 0, got {self.parameter!r}")


def tilt_log_weight(tilt, x):
    """Log of the tilt weight at ``x``."""
    x = np.asarray(x, dtype=float)
    t = tilt.parameter
    if tilt.kind == "power":
        return t * np.log(x)
    if tilt.kind == "ratio":
        return t * (np.log(x) - np.log1p(x))
    return t * x


def _positive_shape(value, what):
    if not value > 0:
        raise MomentDomainError(
            f"tilt leaves {what} = {value:g}; the weighted law is not integrable")
    return value


def tilt_params(spec, tilt):
    """Parameters of ``spec`` reweighted by ``tilt`` and renormalized."""
    t = tilt.parameter
    if isinstance(spec, KummerParams):
        if tilt.kind == "power":
            return KummerParams(_positive_shape(spec.a + t, "a"), spec.b - t, spec.c)
        if tilt.kind == "ratio":
            return KummerParams(_positive_shape(spec.a + t, "a"), spec.b, spec.c)
        return KummerParams(spec.a, spec.b, _positive_shape(spec.c - t, "c"))
    if isinstance(spec, GammaParams):
        if tilt.kind == "power":
            return GammaParams(_positive_shape(spec.shape + t, "shape"), spec.rate)
        if tilt.kind == "ratio":
            # y^(s+t-1) e^(-rate y) (1+y)^-t is Kummer(s+t, -s, rate).
            return KummerParams(_positive_shape(spec.shape + t, "shape"), -spec.shape, spec.rate)
        return GammaParams(spec.shape, _positive_shape(spec.rate - t, "rate"))
    if isinstance(spec, BetaParams):
        if tilt.kind == "power":
            return BetaParams(_positive_shape(spec.a + t, "a"), spec.b)
        raise DomainError(f"a {tilt.kind} tilt of a beta law leaves the beta family")
    raise DomainError(f"unsupported distribution spec {spec!r}")


# Pipeline


def _pairs(x, y):
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ShapeError(f"x and y have lengths {x.size} and {y.size}")
    if x.size < MIN_PAIRS:
        raise SampleSizeError(f"need at least {MIN_PAIRS} pairs, got {x.size}")
    return x, y


def _law_dict(spec):
    if isinstance(spec, KummerParams):
        return {"family": "kummer", "a": spec.a, "b": spec.b, "c": spec.c}
    return {"family": "gamma", "shape": spec.shape, "rate": spec.rate}


def _fit_checks(report, label, pair, x, y, significance, gating):
    report.add(Check.from_test(f"{label}: ks(X ~ fitted Kummer)",
                               ks_test(x, lambda t: cdf(pair.x, t), significance), gating))
    report.add(Check.from_test(f"{label}: ks(Y ~ fitted gamma)",
                               ks_test(y, lambda t: cdf(pair.y, t), significance), gating))
    report.details[f"{label}_fit"] = {"x": _law_dict(pair.x), "y": _law_dict(pair.y)}


def characterize_from_samples(x, y, family="hv", seed=DEFAULT_SEED,
                              significance=DEFAULT_SIGNIFICANCE, n_perm=199, workers=1):
    """Test independence of the transformed pair and, if it holds, fit the input laws.

    ``x, y`` are paired draws of the inputs. The pair is pushed through the
    ``family`` map (``"hv"`` or ``"kv"``); independence of the outputs and
    constancy of the relevant regressions are tested. Only if independence
    is not rejected are the regression constants estimated, mapped back to
    parameters, and checked with KS tests on ``x`` and ``y``.
    """
    from .transforms import hv_forward, kv_forward

    x, y = _pairs(x, y)
    if family not in ("hv", "kv"):
        raise DomainError(f"family must be 'hv' or 'kv', got {family!r}")
    report = SuiteReport(f"characterize-{family}", seed, x.size)
    if family == "hv":
        u, v = hv_forward(x, y)
        # V is regressed on U.
        cond, resp, exps = u, v, (1.0, -1.0)
    else:
        u, v = kv_forward(x, y)
        cond, resp, exps = v, u, (1.0, 2.0)

    ind = independence_test(u, v, n_perm=n_perm, seed=derive_seed(seed, 1),
                            significance=significance, workers=workers)
    report.add(Check.from_test("independence(U, V)", ind))
    for e in exps:
        reg = regression_constancy_test(cond, resp, exponent=e, significance=significance,
                                        calibration="auto", seed=derive_seed(seed, 20 + int(e)))
        report.add(Check.from_test(f"regression constancy {reg.method}", reg))

    if not ind.passed:
        report.details["fit"] = None
        report.details["reason"] = "independence rejected; no parameters fitted"
        return report

    if family == "hv":
        alpha, beta = float(v.mean()), float((1.0 / v).mean())
        provisional = recover_hv_regression(RegressionConstants(alpha, beta, 1.0))
        rate = provisional.x.c
        shape_c = rate * float(y.mean())
        pair = recover_hv_regression(RegressionConstants(alpha, beta, shape_c))
        report.details["constants"] = {"alpha": alpha, "beta": beta}
        report.details["parameters"] = {"a": pair.x.a, "b": shape_c, "c": rate}
        report.details["acceptance_rate"] = kummer_acceptance_rate(pair.x)
        _fit_checks(report, "hv", pair, x, y, significance, True)
        return report

    m1, m2 = float(u.mean()), float((u * u).mean())
    consts = kv_ratio_from_moments(m1, m2, 1.0)
    report.details["constants"] = {"E(U|V)": m1, "E(U^2|V)": m2}
    # Scale c from the gamma shape each map assigns to Y.
    fits = {}
    for label, fn, gating in (("printed", recover_kv_ratio, False),
                              ("consistent", recover_kv_ratio_consistent, True)):
        try:
            provisional = fn(consts)
        except (ConstraintError, DomainError) as exc:
            report.details[f"{label}_fit"] = {"error": str(exc)}
            report.add(Check(f"{label}: parameters admissible", math.inf, 0.0, None, False, gating))
            continue
        rate = provisional.y.shape / float(y.mean())
        pair = fn(RatioConstants(consts.r, consts.alpha_r, consts.alpha_r1, rate))
        fits[label] = pair
        _fit_checks(report, label, pair, x, y, significance, gating)
    if "consistent" in fits:
        p = fits["consistent"]
        report.details["parameters"] = {"a": p.x.a, "b": p.x.b, "c": p.x.c}
    return report
