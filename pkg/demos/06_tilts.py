"""Tilting a law by x^r, (x/(1+x))^r or e^(eta x) stays in the family.

Run: python demos/06_tilts.py
"""

import numpy as np

from kummer_forge import GammaParams, KummerParams, TiltSpec, tilt_params
from kummer_forge.characterize import tilt_log_weight
from kummer_forge.distributions import log_pdf
from kummer_forge.verify import check_tilts

k = KummerParams(2.0, 1.0, 1.0)
for tilt in (TiltSpec("power", 1.0), TiltSpec("ratio", 1.0), TiltSpec("exponential", -1.0)):
    new = tilt_params(k, tilt)
    x = np.array([0.1, 1.0, 10.0])
    gap = log_pdf(new, x) - log_pdf(k, x) - tilt_log_weight(tilt, x)
    print(f"{tilt.kind:>11} {tilt.parameter:+}: {k} -> {new};"
          f" log-ratio spread {np.ptp(gap):.1e}")
print("gamma, ratio tilt 1:", tilt_params(GammaParams(3, 1), TiltSpec("ratio", 1.0)))

rep = check_tilts(n=100_000, seed=2, workers=4)
print(f"\nTilt suite: {'PASS' if rep.passed else 'FAIL'}")
for line in rep.summary_lines():
    print("  " + line)
