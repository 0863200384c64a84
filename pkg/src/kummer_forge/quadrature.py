"""Adaptive Gauss-Kronrod quadrature, vectorized over panels.

Two drivers share one 21-point Gauss-Kronrod rule:

* :func:`integrate` -- one integral over a list of breakpoints, global
  error criterion (QUADPACK QAG style, but bisecting every over-budget
  panel in a round instead of only the worst one).
* :func:`integrate_pieces` -- many independent integrals at once with a
  local criterion; used for CDFs evaluated at thousands of points.

:func:`log_integral_halfline` and :func:`log_integral_unit` build on
:func:`integrate` to evaluate integrals of positive log-integrands over
``(0, inf)`` and ``(0, 1)`` without overflow and with algebraic endpoint
singularities removed by a power substitution.
"""

import math

import numpy as np

from .errors import QuadratureError

# Kronrod abscissae (positive half, descending) and weights, QUADPACK qk21.
_XGK = np.array([
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525204240,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
# 10-point Gauss weights, attached to the odd-indexed Kronrod abscissae.
_WG = np.array([
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_g = np.zeros(11)
_g[1:10:2] = _WG
GAUSS_WEIGHTS = np.concatenate([_g[:-1], _g[::-1]])
del _g

_EPS = np.finfo(float).eps


def gk21(f, lo, hi):
    """Apply the 21-point Kronrod rule to every panel ``[lo[i], hi[i]]``.

    ``f`` receives a 2-D array of abscissae (one row per panel) and must
    return an array of the same shape. Returns ``(estimate, error)``, where
    the error is the Kronrod-Gauss difference.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = center[:, None] + half[:, None] * NODES[None, :]
    with np.errstate(all="ignore"):
        fx = np.asarray(f(x), dtype=float)
    if not np.all(np.isfinite(fx)):
        bad = np.argwhere(~np.isfinite(fx))[0]
        raise QuadratureError(
            f"integrand not finite at x={x[tuple(bad)]!r}",
            interval=(float(lo[bad[0]]), float(hi[bad[0]])),
            achieved=math.inf,
        )
    k = half * (fx @ KRONROD_WEIGHTS)
    g = half * (fx @ GAUSS_WEIGHTS)
    return k, np.abs(k - g)


def integrate(f, breakpoints, rel_tol=1e-10, abs_tol=1e-300, max_subdivisions=200):
    """Integrate ``f`` over ``[breakpoints[0], breakpoints[-1]]``.

    Panels between consecutive breakpoints are refined by bisection until
    the summed error estimate is below ``max(abs_tol, rel_tol * |I|)``.
    ``max_subdivisions`` bounds the number of bisections (the initial
    panels are free).

    Returns
    -------
    (value, error) : tuple of float
    """
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 1 or bp.size < 2 or np.any(np.diff(bp) <= 0):
        raise ValueError("breakpoints must be strictly increasing, length >= 2")
    lo, hi = bp[:-1].copy(), bp[1:].copy()
    est, err = gk21(f, lo, hi)
    splits = 0
    while True:
        total = est.sum()
        err_sum = err.sum()
        target = max(abs_tol, rel_tol * abs(total))
        if err_sum <= target:
            return float(total), float(err_sum)
        sel = err > target / err.size
        sel[np.argmax(err)] = True
        width = hi[sel] - lo[sel]
        scale = np.maximum(np.abs(lo[sel]), np.abs(hi[sel]))
        splits += int(sel.sum())
        if splits > max_subdivisions or np.any(width <= 64 * _EPS * scale):
            worst = int(np.argmax(err))
            raise QuadratureError(
                f"no convergence after {splits} subdivisions: "
                f"error {err_sum:.3e} > target {target:.3e}",
                interval=(float(lo[worst]), float(hi[worst])),
                achieved=float(err_sum),
            )
        mid = 0.5 * (lo[sel] + hi[sel])
        new_lo = np.concatenate([lo[sel], mid])
        new_hi = np.concatenate([mid, hi[sel]])
        new_est, new_err = gk21(f, new_lo, new_hi)
        keep = ~sel
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        est = np.concatenate([est[keep], new_est])
        err = np.concatenate([err[keep], new_err])


def integrate_pieces(f, lo, hi, rel_tol=1e-10, abs_tol=1e-15, max_subdivisions=None):
    """Integrate ``f`` independently over each ``[lo[i], hi[i]]``.

    Each piece is accepted once its own error estimate is below
    ``max(abs_tol, rel_tol * |I_i|)``. The default subdivision budget is
    200 bisections per piece.
    """
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    m = lo.size
    out = np.zeros(m)
    if m == 0:
        return out
    budget = 200 * m if max_subdivisions is None else max_subdivisions
    owner = np.arange(m)
    splits = 0
    while owner.size:
        est, err = gk21(f, lo, hi)
        done = err <= np.maximum(abs_tol, rel_tol * np.abs(est))
        np.add.at(out, owner[done], est[done])
        if done.all():
            break
        sel = ~done
        lo_s, hi_s, own_s = lo[sel], hi[sel], owner[sel]
        splits += lo_s.size
        scale = np.maximum(np.abs(lo_s), np.abs(hi_s))
        if splits > budget or np.any(hi_s - lo_s <= 64 * _EPS * scale):
            worst = int(np.argmax(err[sel]))
            raise QuadratureError(
                f"piecewise quadrature did not converge after {splits} subdivisions",
                interval=(float(lo_s[worst]), float(hi_s[worst])),
                achieved=float(err[sel][worst]),
            )
        mid = 0.5 * (lo_s + hi_s)
        lo = np.concatenate([lo_s, mid])
        hi = np.concatenate([mid, hi_s])
        owner = np.concatenate([own_s, own_s])
    return out


def _scan_tail(log_f, start, peak_hint, drop=50.0, points=9, limit=1e300):
    """Doubling panel edges on ``[start, inf)`` until ``log_f`` is negligible.

    Returns the edges and the largest log-value seen.
    """
    edges = [start]
    best = -math.inf
    argbest = start
    left = start
    while True:
        right = 2.0 * left
        t = np.geomspace(left, right, points)
        with np.errstate(all="ignore"):
            vals = np.asarray(log_f(t), dtype=float)
        vals = np.where(np.isnan(vals), -np.inf, vals)
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, argbest = float(vals[i]), float(t[i])
        edges.append(right)
        past_peak = right > 2.0 * max(argbest, peak_hint)
        decreasing = vals[-1] <= vals[-2]
        if past_peak and decreasing and vals[-1] + math.log(right) < best - drop:
            return edges, best
        if right > limit:
            raise QuadratureError(
                "integrand tail does not decay", interval=(start, right), achieved=math.inf
            )
        left = right


def log_integral_halfline(log_g, lead, extra_points=(), peak_hint=1.0,
                          rel_tol=1e-10, abs_tol=1e-300, max_subdivisions=200):
    """Return ``log`` of ``int_0^inf t**(lead-1) * exp(log_g(t)) dt``.

    ``lead > 0`` is the algebraic power at the origin; ``log_g`` must be
    bounded near 0. For ``lead < 1`` the substitution ``w = t**lead`` on
    ``(0, 1]`` removes the endpoint singularity; ``[1, inf)`` is cut into doubling panels that
    stop once the integrand is negligible. A single log-shift keeps every
    evaluation in range.
    """
    if not lead > 0:
        raise ValueError("lead must be positive")
    # The power substitution only pays off for a genuine singularity; for
    # lead >= 1 it would squeeze mass near the origin into a sliver.
    substitute = lead < 1.0
    inv = 1.0 / lead
    log_lead = math.log(lead)

    def log_tail(t):
        return (lead - 1.0) * np.log(t) + log_g(t)

    if substitute:
        def log_head(w):
            return log_g(w ** inv) - log_lead

        def to_head(t):
            return t ** lead
    else:
        log_head = log_tail

        def to_head(t):
            return t

    inner = [p for p in extra_points if 0.0 < p < 1.0]
    probe = np.concatenate([np.linspace(0.0, 1.0, 33)[1:], np.geomspace(1e-12, 1.0, 25),
                            np.asarray(inner, dtype=float)])
    with np.errstate(all="ignore"):
        head_vals = np.asarray(log_head(to_head(probe)), dtype=float)
    head_max = float(np.nanmax(head_vals))
    edges, tail_max = _scan_tail(log_tail, 1.0, peak_hint)
    outer = [p for p in extra_points if p > 1.0]
    if outer:
        with np.errstate(all="ignore"):
            tail_max = max(tail_max, float(np.nanmax(log_tail(np.asarray(outer)))))
    shift = max(head_max, tail_max)
    if not math.isfinite(shift):
        raise QuadratureError("integrand vanishes or overflows on the grid",
                              interval=(0.0, math.inf), achieved=math.inf)

    head_edges = np.unique([0.0, 1.0] + [to_head(p) for p in inner])
    tail_edges = np.unique(list(edges) + outer)
    # One integration variable: s in [0,1] is the head variable, s >= 1 is t.
    bps = np.concatenate([head_edges, tail_edges[1:]])

    def f(s):
        w = np.minimum(s, 1.0)
        t = np.maximum(s, 1.0)
        return np.where(s <= 1.0,
                        np.exp(log_head(w) - shift),
                        np.exp(log_tail(t) - shift))

    total, _ = integrate(f, bps, rel_tol, abs_tol, max_subdivisions)
    if not total > 0:
        raise QuadratureError("integral underflowed to zero",
                              interval=(0.0, math.inf), achieved=math.inf)
    return shift + math.log(total)


def log_integral_unit(log_g, lead0, lead1, extra_points=(),
                      rel_tol=1e-10, abs_tol=1e-300, max_subdivisions=200):
    """Return ``log`` of ``int_0^1 t**(lead0-1) (1-t)**(lead1-1) exp(log_g(t)) dt``.

    Both endpoint singularities are removed by power substitutions on the
    halves ``(0, 1/2]`` and ``[1/2, 1)``.
    """
    if not (lead0 > 0 and lead1 > 0):
        raise ValueError("lead0 and lead1 must be positive")
    w_mid = 0.5 ** lead0
    v_mid = 0.5 ** lead1

    def log_left(w):
        t = w ** (1.0 / lead0)
        return (lead1 - 1.0) * np.log1p(-t) + log_g(t) - math.log(lead0)

    def log_right(v):
        one_minus_t = v ** (1.0 / lead1)
        t = 1.0 - one_minus_t
        return (lead0 - 1.0) * np.log(t) + log_g(t) - math.log(lead1)

    # s in [0, w_mid] is w (left); s in [w_mid, w_mid + v_mid] is v_mid - v (right).
    def log_f(s):
        w = np.minimum(s, w_mid)
        v = np.maximum(w_mid + v_mid - s, 0.0)
        return np.where(s <= w_mid, log_left(w), log_right(v))

    grid = np.linspace(0.0, w_mid + v_mid, 65)[1:-1]
    with np.errstate(all="ignore"):
        shift = float(np.nanmax(log_f(grid)))
    if not math.isfinite(shift):
        raise QuadratureError("integrand vanishes or overflows on the grid",
                              interval=(0.0, 1.0), achieved=math.inf)
    bps = [0.0, w_mid, w_mid + v_mid]
    for p in extra_points:
        if 0.0 < p < 0.5:
            bps.append(p ** lead0)
        elif 0.5 < p < 1.0:
            bps.append(w_mid + v_mid - (1.0 - p) ** lead1)
    bps = np.unique(bps)
    total, _ = integrate(lambda s: np.exp(log_f(s) - shift), bps,
                         rel_tol, abs_tol, max_subdivisions)
    if not total > 0:
        raise QuadratureError("integral underflowed to zero",
                              interval=(0.0, 1.0), achieved=math.inf)
    return shift + math.log(total)
