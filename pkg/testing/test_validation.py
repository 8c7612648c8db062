"""
Tests for the validation suite at quick scale, one criterion at a time.
"""
import pytest

from src.models.config import Command, Report, ReportEntry, RunConfig
from src.services import densities
from src.services.sampling import MonteCarloService
from src.services.validation import SCALES, ValidationSuite
from src.utils.errors import UnknownQuantityError


@pytest.fixture
def suite() -> ValidationSuite:
    return ValidationSuite(scale="quick", seed=1, service=MonteCarloService(threads=2))


@pytest.fixture
def config() -> RunConfig:
    return RunConfig(command=Command.VALIDATE, scale="quick", seed=1)


def entries_by_name(report: Report) -> dict:
    return {entry.name: entry for entry in report.results}


def test_scales():
    assert SCALES["default"].mc_trials == 10_000_000
    assert SCALES["quick"].k > SCALES["default"].k


def test_unknown_scale():
    with pytest.raises(UnknownQuantityError):
        ValidationSuite(scale="huge")


def test_unknown_criterion(suite, config):
    with pytest.raises(UnknownQuantityError):
        suite.run(config, ["nope"])


def test_criteria_run_in_fixed_order(suite, config):
    report = suite.run(config, ["charfun-identity", "regular-tetrahedron"])
    names = [entry.name for entry in report.results]
    assert names[0] == "regular-dihedral-max-error"
    assert any(name.startswith("charfun-identity:") for name in names)


def test_regular_tetrahedron(suite, config):
    report = suite.run(config, ["regular-tetrahedron"])
    assert suite.passed(report)
    assert len(report.results) == 4


def test_charfun_identity(suite, config):
    report = suite.run(config, ["charfun-identity"])
    assert suite.passed(report)
    entries = entries_by_name(report)
    assert entries["charfun-identity:general"].value < 1e-13
    assert entries["min-radicand-modulus:pinned"].value > 0.5


def test_predicate_equivalences(suite, config):
    report = suite.run(config, ["predicate-equivalences"])
    assert suite.passed(report)
    assert len(report.results) == 3


def test_implications(suite, config):
    report = suite.run(config, ["implications"])
    entries = entries_by_name(report)
    assert entries["acute-implies-small-solid-angles"].value == 0
    assert entries["acute-implies-2-well-centered"].value == 0
    assert entries["witness-2-well-centered-not-acute"].passed
    assert entries["witness-acute-not-3-well-centered"].passed
    assert entries["witness-acute-not-3-well-centered"].value > 0
    assert all(entry.passed is not None for entry in report.results)


def test_reproducibility(suite, config):
    report = suite.run(config, ["reproducibility"])
    (entry,) = report.results
    assert entry.passed
    assert entry.value == 1.0


def test_passed_ignores_informational_entries():
    report = Report(
        command="validate",
        config={},
        results=[
            ReportEntry(name="info", value=3.0, method="search", n_or_evals=10),
            ReportEntry(name="ok", value=0.0, method="exhaustive", n_or_evals=10, passed=True),
        ],
    )
    assert ValidationSuite.passed(report)
    failing = report.model_copy(
        update={"results": report.results + [ReportEntry(name="bad", value=1.0, method="x", n_or_evals=0, passed=False)]}
    )
    assert not ValidationSuite.passed(failing)


def test_quick_scale_skips_the_miles_triple_integral(suite, config, monkeypatch):
    def fail(*args, **kwargs):
        raise AssertionError("miles_normalization should not run at quick scale")

    monkeypatch.setattr(densities, "miles_normalization", fail)
    report = suite.run(config, ["distributions"])
    names = [entry.name for entry in report.results]
    assert "miles-normalization" not in names
    assert any(name.startswith("dihedral-samples:") for name in names)
    assert SCALES["default"].miles_normalization
