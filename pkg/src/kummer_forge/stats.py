"""Goodness-of-fit, independence and regression-constancy tests.

All tests return a :class:`TestResult` and never raise on a rejection;
they raise only for malformed input (too few points, mismatched lengths,
underfilled bins).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy.stats import chi2, norm

from .errors import BinningError, MomentDomainError, SampleSizeError, ShapeError
from .rng import generator

__all__ = ["TestResult", "DEFAULT_SIGNIFICANCE", "kolmogorov_sf", "ks_test",
           "distance_correlation", "independence_test", "regression_constancy_test",
           "hill_tail_index"]

DEFAULT_SIGNIFICANCE = 1e-3


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    n: int
    method: str
    passed: bool
    extra: dict = field(default_factory=dict, compare=False)

    __test__ = False  # keep pytest from collecting this class


def _result(statistic, p_value, n, method, significance, **extra):
    p_value = float(min(1.0, max(0.0, p_value)))
    extra["significance"] = float(significance)
    return TestResult(float(statistic), p_value, int(n), method,
                      bool(p_value > significance), extra)


def kolmogorov_sf(lam):
    """Survival function of the Kolmogorov distribution, ``P(K > lam)``.

    Uses the alternating series ``2 sum (-1)^(k-1) exp(-2 k^2 lam^2)`` for
    large arguments and the Jacobi-transformed theta series for small ones,
    where the first converges too slowly.
    """
    lam = float(lam)
    if lam <= 0:
        return 1.0
    if lam < 1.0:
        k = np.arange(1, 20)
        s = np.exp(-((2 * k - 1) ** 2) * math.pi ** 2 / (8 * lam * lam)).sum()
        return float(min(1.0, max(0.0, 1.0 - math.sqrt(2 * math.pi) / lam * s)))
    k = np.arange(1, 101)
    terms = np.exp(-2.0 * k * k * lam * lam)
    signs = np.where(k % 2 == 1, 1.0, -1.0)
    return float(min(1.0, max(0.0, 2.0 * (signs * terms).sum())))


def ks_test(values, cdf, significance=DEFAULT_SIGNIFICANCE):
    """One-sample Kolmogorov-Smirnov test against a continuous CDF.

    ``cdf`` is a vectorized callable mapping points to probabilities. The
    p-value is the asymptotic Kolmogorov tail at ``sqrt(n) * D``.
    """
    x = np.sort(np.asarray(values, dtype=float).ravel())
    n = x.size
    if n < 100:
        raise SampleSizeError(f"ks_test needs at least 100 values, got {n}")
    f = np.clip(np.asarray(cdf(x), dtype=float), 0.0, 1.0)
    i = np.arange(1, n + 1)
    d = max(float(np.max(i / n - f)), float(np.max(f - (i - 1) / n)))
    return _result(d, kolmogorov_sf(math.sqrt(n) * d), n, "ks", significance)


def _centered_distances(x):
    d = np.abs(x[:, None] - x[None, :])
    row = d.mean(axis=0)
    return d - row[None, :] - row[:, None] + row.mean()


@numba.njit(cache=True, nogil=True)
def _permuted_cross(a, b, p):
    # sum_ij a[i, j] * b[p[i], p[j]] over a symmetric a, b.
    n = a.shape[0]
    off = 0.0
    diag = 0.0
    for i in range(n):
        pi = p[i]
        diag += a[i, i] * b[pi, pi]
        for j in range(i + 1, n):
            off += a[i, j] * b[pi, p[j]]
    return 2.0 * off + diag


def distance_correlation(x, y):
    """Sample distance correlation of two 1-D samples (V-statistic form)."""
    a = _centered_distances(np.asarray(x, dtype=float))
    b = _centered_distances(np.asarray(y, dtype=float))
    dcov2 = (a * b).mean()
    denom = math.sqrt((a * a).mean() * (b * b).mean())
    if denom == 0:
        return 0.0
    return math.sqrt(max(dcov2, 0.0) / denom)


def _binned(x, bins):
    # Stable ranks break ties by input order.
    order = np.argsort(x, kind="stable")
    idx = np.empty(x.size, dtype=np.intp)
    idx[order] = np.arange(x.size) * bins // x.size
    return idx


_PERM_BLOCK = 50


def independence_test(u, v, n_perm=199, seed=0, significance=DEFAULT_SIGNIFICANCE,
                      subsample=2000, bins=10, workers=1):
    """Permutation distance-correlation test combined with a binned chi-square test.

    Distance correlation is computed on at most ``subsample`` points and
    calibrated with ``n_perm`` permutations; the chi-square test uses a
    ``bins x bins`` quantile table over the full sample. The reported
    p-value is ``min(1, 2 * min(p_dcor, p_chi2))``.

    Permutations are generated in fixed blocks, each from its own stream,
    so the p-value does not depend on ``workers``.
    """
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.size != v.size:
        raise ShapeError(f"u and v have lengths {u.size} and {v.size}")
    n = u.size
    if n < 100:
        raise SampleSizeError(f"independence_test needs at least 100 pairs, got {n}")
    if n_perm < 99:
        raise SampleSizeError(f"n_perm must be at least 99, got {n_perm}")

    if n > subsample:
        pick = np.sort(generator(seed, 0).choice(n, subsample, replace=False))
        us, vs = u[pick], v[pick]
    else:
        us, vs = u, v
    a = _centered_distances(us)
    b = _centered_distances(vs)
    observed = _permuted_cross(a, b, np.arange(us.size))
    denom = math.sqrt((a * a).mean() * (b * b).mean())
    dcor = math.sqrt(max(observed / us.size ** 2, 0.0) / denom) if denom > 0 else 0.0

    def block(k):
        rng = generator(seed, 1000 + k)
        size = min(_PERM_BLOCK, n_perm - k * _PERM_BLOCK)
        hits = 0
        for _ in range(size):
            p = rng.permutation(us.size)
            if _permuted_cross(a, b, p) >= observed:
                hits += 1
        return hits

    n_blocks = -(-n_perm // _PERM_BLOCK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(block, range(n_blocks)))
    else:
        hits = sum(block(k) for k in range(n_blocks))
    p_dcor = (1 + hits) / (1 + n_perm)

    table = np.zeros((bins, bins))
    np.add.at(table, (_binned(u, bins), _binned(v, bins)), 1.0)
    expected = table.sum(axis=1)[:, None] * table.sum(axis=0)[None, :] / n
    chi_stat = float(((table - expected) ** 2 / expected).sum())
    p_chi = float(chi2.sf(chi_stat, (bins - 1) ** 2))

    p = min(1.0, 2.0 * min(p_dcor, p_chi))
    return _result(dcor, p, n, "dcor-permutation+chi2", significance,
                   p_dcor=p_dcor, p_chi2=p_chi, chi2=chi_stat, n_perm=int(n_perm),
                   subsample=int(us.size))


_HILL_MIN_INDEX = 2.25


def hill_tail_index(w, k=None):
    """Hill estimate of the tail index of ``|w|`` from its ``k`` largest values.

    ``k`` defaults to ``min(1000, n // 10)``. An index at or below 2 means
    an infinite second moment.
    """
    s = np.sort(np.abs(np.asarray(w, dtype=float).ravel()))[::-1]
    if k is None:
        k = min(1000, s.size // 10)
    k = int(k)
    if k < 2 or s[k] <= 0:
        return math.inf
    logs = np.log(s[:k] / s[k])
    mean = logs.mean()
    return math.inf if mean <= 0 else float(1.0 / mean)


def _check_variance(w, label):
    if not np.all(np.isfinite(w)):
        raise MomentDomainError(f"{label} has non-finite values")
    half = w.size // 2
    v1, v2 = np.var(w[:half]), np.var(w[half:])
    if not (math.isfinite(v1) and math.isfinite(v2)):
        raise MomentDomainError(f"{label} has non-finite sample variance")
    if max(v1, v2) > 0 and (min(v1, v2) == 0 or max(v1, v2) / min(v1, v2) > 10.0):
        raise MomentDomainError(
            f"{label}: sample variance unstable across halves ({v1:.3g} vs {v2:.3g}); "
            "the moment is probably infinite")
    index = hill_tail_index(w)
    if index < _HILL_MIN_INDEX:
        raise MomentDomainError(
            f"{label}: estimated tail index {index:.3g} < {_HILL_MIN_INDEX}; "
            "the variance is probably infinite")


def _max_deviation(idx, counts, w, wd, bins):
    """Largest standardized deviation of a bin statistic from the pooled one."""
    n = w.size
    if wd is None:
        stat_b = np.bincount(idx, weights=w, minlength=bins) / counts
        pooled = w.mean()
        resid = w - stat_b[idx]
    else:
        num_b = np.bincount(idx, weights=w, minlength=bins) / counts
        den_b = np.bincount(idx, weights=wd, minlength=bins) / counts
        stat_b = num_b / den_b
        pooled = w.mean() / wd.mean()
        resid = (w - stat_b[idx] * wd) / den_b[idx]
    var_b = np.bincount(idx, weights=resid ** 2, minlength=bins) / np.maximum(counts - 1, 1)
    se2_b = var_b / counts  # variance of each bin statistic
    frac = counts / n
    total = (frac ** 2 * se2_b).sum()
    var_dev = (1 - frac) ** 2 * se2_b + (total - frac ** 2 * se2_b)
    dev = stat_b - pooled
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(var_dev > 0, np.abs(dev) / np.sqrt(var_dev),
                     np.where(np.abs(dev) > 1e-12 * max(1.0, abs(pooled)), np.inf, 0.0))
    return float(z.max()), stat_b, float(pooled)


@numba.njit(cache=True, nogil=True)
def _shuffled_max_deviation(w, wd, has_den, idx, uniforms, bins):
    """``_max_deviation`` after a Fisher-Yates shuffle of the bin labels.

    ``uniforms`` drives the shuffle (all-ones leaves the labels in place).
    Per-bin moments are accumulated in one pass.
    """
    n = idx.size
    lab = idx.copy()
    for i in range(n - 1, 0, -1):
        j = int(uniforms[i] * (i + 1))
        if j > i:
            j = i
        lab[i], lab[j] = lab[j], lab[i]
    cnt = np.zeros(bins)
    s1 = np.zeros(bins)
    s2 = np.zeros(bins)
    d1 = np.zeros(bins)
    d2 = np.zeros(bins)
    sx = np.zeros(bins)
    for i in range(n):
        b = lab[i]
        cnt[b] += 1.0
        s1[b] += w[i]
        s2[b] += w[i] * w[i]
        if has_den:
            d1[b] += wd[i]
            d2[b] += wd[i] * wd[i]
            sx[b] += w[i] * wd[i]
    if has_den:
        pooled = s1.sum() / d1.sum()
    else:
        pooled = s1.sum() / n
    stat = np.zeros(bins)
    se2 = np.zeros(bins)
    for b in range(bins):
        m = s1[b] / cnt[b]
        if has_den:
            dm = d1[b] / cnt[b]
            r = m / dm
            ss = (s2[b] - 2.0 * r * sx[b] + r * r * d2[b]) / (dm * dm)
            stat[b] = r
        else:
            ss = s2[b] - cnt[b] * m * m
            stat[b] = m
        se2[b] = max(ss, 0.0) / max(cnt[b] - 1.0, 1.0) / cnt[b]
    total = 0.0
    for b in range(bins):
        f = cnt[b] / n
        total += f * f * se2[b]
    best = 0.0
    for b in range(bins):
        f = cnt[b] / n
        var_dev = (1.0 - f) ** 2 * se2[b] + (total - f * f * se2[b])
        dev = abs(stat[b] - pooled)
        if var_dev > 0:
            z = dev / np.sqrt(var_dev)
        elif dev > 1e-12 * max(1.0, abs(pooled)):
            z = np.inf
        else:
            z = 0.0
        if z > best:
            best = z
    return best


def regression_constancy_test(u, v, exponent=1.0, bins=10, significance=DEFAULT_SIGNIFICANCE,
                              denominator_exponent=None, min_per_bin=30,
                              calibration="normal", n_perm=199, seed=0):
    """Test whether ``E(v**exponent | u)`` is constant.

    ``u`` is cut into ``bins`` quantile bins. Each bin mean is compared with
    the pooled mean through its exact standard error under independence of
    bins; the statistic is the largest absolute standardized deviation.

    With ``denominator_exponent = d`` the per-bin statistic becomes the
    ratio ``mean(v**exponent) / mean(v**d)`` (conditional moment ratio),
    standardized by the delta method.

    ``calibration`` selects the p-value:

    ``"normal"``
        Bonferroni-corrected normal tail. Requires a finite variance of the
        powers of ``v``; this is checked (finite, stable across halves,
        Hill tail index above 2.25) and a :class:`MomentDomainError` raised
        otherwise.
    ``"permutation"``
        Shuffles of ``v`` against ``u`` (at least ``n_perm``, and at least
        ``2/significance - 1`` so a rejection is attainable). Exact under
        independence of ``u`` and ``v`` whatever the tails.
    ``"auto"``
        ``"normal"`` when its precondition holds, else ``"permutation"``.
    """
    if calibration not in ("normal", "permutation", "auto"):
        raise ValueError(f"unknown calibration {calibration!r}")
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    if u.size != v.size:
        raise ShapeError(f"u and v have lengths {u.size} and {v.size}")
    n = u.size
    if bins < 5:
        raise BinningError(f"need at least 5 bins, got {bins}")
    if n < bins * min_per_bin:
        raise BinningError(f"{n} points cannot fill {bins} bins with {min_per_bin} each")
    with np.errstate(all="ignore"):
        w = v ** exponent
        wd = None if denominator_exponent is None else v ** denominator_exponent
    if calibration == "permutation":
        for arr in (w, wd):
            if arr is not None and not np.all(np.isfinite(arr)):
                raise MomentDomainError("powers of v have non-finite values")
    else:
        try:
            _check_variance(w, f"v^{exponent:g}")
            if wd is not None:
                _check_variance(wd, f"v^{denominator_exponent:g}")
        except MomentDomainError:
            if calibration == "normal":
                raise
            calibration = "permutation"
        else:
            calibration = "normal"

    idx = _binned(u, bins)
    counts = np.bincount(idx, minlength=bins).astype(float)
    if counts.min() < min_per_bin:
        raise BinningError(f"smallest bin has {int(counts.min())} points < {min_per_bin}")

    stat, stat_b, pooled = _max_deviation(idx, counts, w, wd, bins)
    extra = {}
    if calibration == "normal":
        p = min(1.0, bins * 2.0 * norm.sf(stat))
    else:
        if n_perm < 99:
            raise SampleSizeError(f"n_perm must be at least 99, got {n_perm}")
        # Enough shuffles that the smallest attainable p is below the level.
        n_perm = max(int(n_perm), math.ceil(2.0 / significance) - 1)
        has_den = wd is not None
        wd_arr = wd if has_den else np.empty(0)
        observed = _shuffled_max_deviation(w, wd_arr, has_den, idx, np.ones(n), bins)
        rng = generator(seed, 2000)
        hits = 0
        for _ in range(n_perm):
            s_perm = _shuffled_max_deviation(w, wd_arr, has_den, idx, rng.random(n), bins)
            hits += s_perm >= observed * (1.0 - 1e-12)
        p = (1 + hits) / (1 + n_perm)
        extra["n_perm"] = n_perm
    label = f"regression E(v^{exponent:g}|u)"
    if wd is not None:
        label += f"/E(v^{denominator_exponent:g}|u)"
    if calibration == "permutation":
        label += " [permutation]"
    return _result(stat, p, n, label, significance, calibration=calibration,
                   bin_statistics=[float(s) for s in stat_b], pooled=pooled, **extra)
