import importlib.util
import json
import os

import pytest

from conftest import FIXTURES

ROOT = os.path.dirname(FIXTURES)


@pytest.fixture(scope="module")
def script():
    spec = importlib.util.spec_from_file_location("reproduce_examples", os.path.join(ROOT, "reproduce_examples.py"))
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.fixture
def expected_all():
    with open(os.path.join(FIXTURES, "expected.json"), "r") as f:
        return json.load(f)


def test_containment_examples(script, expected_all, tmp_path):
    report = script.Report()
    script.example_zonotope_containment(report, expected_all["ex1"], str(tmp_path))
    script.example_counterexample(report, expected_all["ex2"])
    script.example_minkowski(report, expected_all["ex3"], None)
    script.example_hausdorff(report, expected_all["ex4"])
    assert report.failures == 0
    assert os.path.exists(tmp_path / "zonotopes.svg")


def test_failed_checks_are_counted(script, capsys):
    report = script.Report()
    report.check("passes", True)
    report.check("fails", False, "detail")
    assert report.failures == 1
    assert "❌ fails: detail" in capsys.readouterr().out


@pytest.mark.slow
def test_approximation_examples(script, expected_all):
    report = script.Report()
    script.example_order_reduction(report, None)
    script.example_projection(report, expected_all["mpc"], None)
    assert report.failures == 0
