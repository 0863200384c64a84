"""The HV and KV maps keep Kummer/gamma pairs independent.

HV: X ~ Kummer(a, b-a, c), Y ~ Gamma(b, c), U = Y/(1+X), V = X(1+U)
    gives U ~ Kummer(b, a-b, c) independent of V ~ Gamma(a, c).
KV: X ~ Kummer(a, b, c), Y ~ Gamma(b, c), V = X+Y, U = (1+1/V)/(1+1/X)
    gives U ~ Beta(a, b) independent of V ~ Kummer(a+b, -b, c).

Run: python demos/02_independence_properties.py
"""

from kummer_forge import GammaParams, hv_forward, kv_forward
from kummer_forge.verify import run_property_suite

print("The maps themselves")
print("  hv_forward(2, 1.5) =", tuple(hv_forward(2.0, 1.5)), " U + V = X + Y")
print("  kv_forward(3, 1)   =", tuple(kv_forward(3.0, 1.0)))


def show(title, report):
    print(f"\n{title}: {'PASS' if report.passed else 'FAIL'}")
    for line in report.summary_lines():
        print("  " + line)


show("HV property, (a, b, c) = (2, 3, 1), n = 100000",
     run_property_suite("hv", 2.0, 3.0, 1.0, n=100_000, seed=7, workers=4))
show("KV property, (a, b, c) = (2, 1, 1), n = 100000",
     run_property_suite("kv", 2.0, 1.0, 1.0, n=100_000, seed=7, workers=4))

# Power check: with the wrong gamma shape for Y the property fails.
show("HV with Y ~ Gamma(4, 1) instead of Gamma(3, 1)",
     run_property_suite("hv", 2.0, 3.0, 1.0, n=100_000, seed=7,
                        y_spec=GammaParams(4.0, 1.0), workers=4))
