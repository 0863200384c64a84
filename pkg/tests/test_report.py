import json
import math

import jsonschema
import pytest

from kummer_forge.report import Check, SuiteReport
from kummer_forge.stats import TestResult
from report_schema import REPORT_SCHEMA


def test_check_constructors():
    assert Check.tolerance("t", 1e-13, 1e-12).passed
    assert not Check.tolerance("t", 2e-12, 1e-12).passed
    band = Check.band("b", 10.25, 10.0, 0.125)
    assert band.statistic == 2.0 and band.passed
    assert not Check.band("b", 10.75, 10.0, 0.125).passed
    assert not Check.band("b", 1.0, 0.0, 0.0).passed
    res = TestResult(0.1, 0.02, 100, "ks", True, {"significance": 0.01})
    chk = Check.from_test("ks", res)
    assert chk.threshold == 0.01 and chk.p_value == 0.02 and chk.passed


def test_overall_pass_ignores_exploratory_checks():
    rep = SuiteReport("demo", 1, 10)
    rep.add(Check.tolerance("gating", 0.0, 1.0))
    rep.add(Check.tolerance("exploratory", 5.0, 1.0, gating=False))
    assert rep.passed and rep.failures() == []
    rep.add(Check.tolerance("gating 2", 5.0, 1.0))
    assert not rep.passed and [c.name for c in rep.failures()] == ["gating 2"]


def test_json_is_strict_and_schema_valid():
    rep = SuiteReport("demo", 7, 10, details={"x": math.nan, "y": [math.inf]})
    rep.add(Check("inf stat", math.inf, 1.0, None, False))
    rep.add(Check("nan p", 0.5, 0.001, math.nan, False))
    doc = json.loads(rep.to_json())
    jsonschema.validate(doc, REPORT_SCHEMA)
    assert doc["checks"][0]["statistic"] == 1.7976931348623157e308
    assert doc["checks"][1]["p_value"] is None
    assert doc["details"] == {"x": None, "y": [1.7976931348623157e308]}
    assert len(list(rep.summary_lines())) == 2
