"""Structured pass/fail records emitted by the verification suites."""

import json
import math
from dataclasses import dataclass, field
from typing import Optional

__all__ = ["Check", "SuiteReport"]

_BIG = 1.7976931348623157e308


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return math.copysign(_BIG, x)
    return x


def _clean(obj):
    # JSON has no NaN/Infinity; map them to null / the largest double.
    if isinstance(obj, float):
        return _json_float(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):  # numpy scalars
        return _clean(obj.item())
    return obj


@dataclass
class Check:
    """One verified statement.

    ``threshold`` is a tolerance when ``p_value`` is None (pass iff
    ``statistic <= threshold``) and a significance level otherwise (pass
    iff ``p_value > threshold``). Non-gating checks are exploratory: they
    are reported but do not affect the suite verdict.
    """

    name: str
    statistic: float
    threshold: float
    p_value: Optional[float]
    passed: bool
    gating: bool = True

    @classmethod
    def tolerance(cls, name, value, tol, gating=True):
        value = float(value)
        return cls(name, value, float(tol), None, bool(value <= tol), gating)

    @classmethod
    def from_test(cls, name, result, gating=True):
        threshold = _significance_of(result)
        return cls(name, result.statistic, threshold, result.p_value, result.passed, gating)

    @classmethod
    def band(cls, name, estimate, target, se, width=4.0, gating=True):
        """Pass iff ``|estimate - target| <= width * se``; statistic is the z-score."""
        if se > 0:
            z = abs(estimate - target) / se
        else:
            z = 0.0 if estimate == target else math.inf
        return cls(name, float(z), float(width), None, bool(z <= width), gating)

    def to_dict(self):
        return {
            "name": self.name,
            "statistic": _json_float(self.statistic),
            "threshold": _json_float(self.threshold),
            "p_value": _json_float(self.p_value),
            "pass": bool(self.passed),
            "gating": bool(self.gating),
        }


def _significance_of(result):
    # TestResult stores the verdict, not the level; recover it from the extra map.
    return float(result.extra.get("significance", 1e-3))


@dataclass
class SuiteReport:
    suite: str
    seed: int
    n: int
    checks: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c.passed for c in self.checks if c.gating)

    def add(self, check):
        self.checks.append(check)
        return check

    def failures(self):
        return [c for c in self.checks if c.gating and not c.passed]

    def to_dict(self):
        return {
            "suite": self.suite,
            "seed": int(self.seed),
            "n": int(self.n),
            "checks": [c.to_dict() for c in self.checks],
            "pass": self.passed,
            "details": _clean(self.details),
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False, ensure_ascii=False)

    def summary_lines(self):
        for c in self.checks:
            flag = "PASS" if c.passed else "FAIL"
            if not c.gating:
                flag += " (exploratory)"
            p = "" if c.p_value is None else f" p={c.p_value:.4g}"
            yield f"{flag:<22} {c.name}: stat={c.statistic:.4g} thr={c.threshold:.3g}{p}"
