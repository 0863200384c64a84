"""From constant regressions back to the input laws.

If U and V from the HV map have E(V|U) = alpha and E(1/V|U) = beta, the
inputs must be X ~ Kummer(ab/(ab-1), c - ab/(ab-1), b/(ab-1)) and
Y ~ Gamma(c, b/(ab-1)) with ab = alpha * beta. The KV maps are shown as
printed next to the inverse that is consistent with U ~ Beta(a, b).

Run: python demos/03_characterization.py
"""

import math

from kummer_forge import (GammaParams, KummerParams, RatioConstants, RegressionConstants,
                          characterize_from_samples, recover_hv_ratio, recover_hv_regression,
                          recover_kv_regression)
from kummer_forge.characterize import (hv_ratio_from_second_moments, kv_forward_consistency,
                                       kv_moment_corollary_printed, kv_ratio_from_moments,
                                       recover_kv_ratio, recover_kv_regression_consistent)
from kummer_forge.distributions import draw
from kummer_forge.rng import generator

print("HV side")
print("  regression (alpha, beta, c) = (2, 1, 3):", recover_hv_regression(RegressionConstants(2, 1, 3)))
print("  ratio r=1, (alpha_1, alpha_2) = (2, 3):  ", recover_hv_ratio(RatioConstants(1, 2, 3, 3)))
print("  from E(V|U)=2, E(V^2|U)=6:              ",
      recover_hv_ratio(hv_ratio_from_second_moments(2, 6, 3)))

print("\nKV side: printed map versus the beta-moment inverse")
k = RegressionConstants(2 / 3, 2.0, 1.0)  # the constants of U ~ Beta(2, 1)
print("  printed:   ", recover_kv_regression(k))
print("  consistent:", recover_kv_regression_consistent(k))
for label, d in kv_forward_consistency(k).items():
    print(f"  {label:<10} implies E U = {d['implied_alpha']:.4f}, E 1/U = {d['implied_beta']:.4f}")
print("  moment corollary as displayed for (a, b) = (0.5, 0.3):",
      tuple(round(v, 6) for v in kv_moment_corollary_printed(0.5, 0.3, 1)))
print("  the ratio theorem for the same constants:         ",
      recover_kv_ratio(kv_ratio_from_moments(0.5, 0.3, 1)))

print("\nEnd to end on 100000 HV pairs, X ~ Kummer(2, 1, 1), Y ~ Gamma(3, 1)")
n = 100_000
x = draw(KummerParams(2, 1, 1), n, generator(3, 1))
y = draw(GammaParams(3, 1), n, generator(3, 2))
rep = characterize_from_samples(x, y, family="hv", seed=3, workers=4)
print("  fitted:", {k: round(v, 4) for k, v in rep.details["parameters"].items()})
for line in rep.summary_lines():
    print("  " + line)

print("\nNegative control: Y lognormal with the same mean")
y_bad = generator(3, 3).lognormal(math.log(3) - 0.55 ** 2 / 2, 0.55, n)
bad = characterize_from_samples(x, y_bad, family="hv", seed=3, workers=4)
print("  verdict:", "PASS" if bad.passed else "FAIL", "-", bad.details.get("reason"))
