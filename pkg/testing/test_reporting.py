"""
Tests for grid parsing, density tables and the report builder.
"""
import io
import json
import math

import numpy as np
import pandas as pd
import pytest

from src.models.config import Command, Report, ReportEntry, RunConfig
from src.services.reporting import (
    ReportBuilder,
    density_table,
    parse_axis,
    parse_grid,
    render,
)
from src.services.sampling import MonteCarloService
from src.utils.errors import DomainError, UnknownQuantityError


class TestGrids:
    def test_inclusive_axis(self):
        assert np.allclose(parse_axis("0:1:0.25"), [0.0, 0.25, 0.5, 0.75, 1.0])

    def test_symmetric_axis_hits_zero_without_sign(self):
        axis = parse_axis("-3:3:0.1")
        assert axis.size == 61
        zero = axis[30]
        assert zero == 0.0 and not np.signbit(zero)

    def test_crofton_axis_length(self):
        assert parse_axis("0:6.2831:0.01").size == 629

    @pytest.mark.parametrize("text", ["1:0:0.1", "a:b:c", "0:1", "0:1:0", "0:1:-0.1", "0:inf:1"])
    def test_bad_axes(self, text):
        with pytest.raises(DomainError):
            parse_axis(text)

    def test_two_axes(self):
        x, y = parse_grid("-1:1:0.5x0:2:1")
        assert x.size == 5 and y.size == 3

    def test_too_many_axes(self):
        with pytest.raises(DomainError):
            parse_grid("0:1:1x0:1:1x0:1:1")


class TestDensityTables:
    def test_crofton_table(self):
        table = density_table("crofton", "0:6.2831:0.01")
        assert list(table.columns) == ["x", "density", "cdf"]
        assert len(table) == 629
        assert (table["density"] >= 0.0).all()
        assert table["cdf"].is_monotonic_increasing
        assert table["cdf"].iloc[-1] == pytest.approx(1.0, abs=1e-3)

    def test_pinned_triple_convolution_table(self):
        table = density_table("conv3-pinned", "-3:3:0.1x-3:3:0.1")
        assert list(table.columns) == ["x", "y", "density"]
        assert len(table) == 61 * 61
        origin = table[(table["x"] == 0.0) & (table["y"] == 0.0)]
        assert origin["density"].iloc[0] == pytest.approx(1 / (2 * math.sqrt(3) * math.pi))

    def test_miller_table_is_nan_only_at_the_origin(self):
        table = density_table("miller-general", "-1:1:0.5x-1:1:0.5")
        missing = table[table["density"].isna()]
        assert len(missing) == 1
        assert missing["x"].iloc[0] == 0.0 and missing["y"].iloc[0] == 0.0

    def test_miles_marginal_domain(self):
        with pytest.raises(DomainError):
            density_table("miles-marginal", "0:1:0.5x0.5:1:0.5")

    def test_axis_count_must_match(self):
        with pytest.raises(DomainError):
            density_table("crofton", "0:1:0.5x0:1:0.5")
        with pytest.raises(DomainError):
            density_table("conv3-general", "0:1:0.5")

    def test_unknown_density(self):
        with pytest.raises(UnknownQuantityError):
            density_table("gaussian", "0:1:0.5")


class TestReports:
    def test_estimate_report(self):
        config = RunConfig(command=Command.ESTIMATE, name="acute-triangle", n=20_000, seed=1)
        report = ReportBuilder(MonteCarloService(threads=1)).estimate(config)
        assert report.command == "estimate"
        (entry,) = report.results
        assert entry.name == "acute-triangle"
        assert entry.target == 0.25
        assert entry.method == "monte-carlo"
        assert entry.ci_low <= entry.value <= entry.ci_high
        assert report.wall_time is None

    def test_json_does_not_depend_on_threads(self):
        config = RunConfig(command=Command.ESTIMATE, name="pinned-quadrant", n=10_000, seed=8)
        texts = [render(ReportBuilder(MonteCarloService(threads=t)).estimate(config), "json") for t in (1, 4)]
        assert texts[0] == texts[1]
        assert json.loads(texts[0])["config"]["seed"] == 8

    def test_dihedral_study(self):
        config = RunConfig(command=Command.ESTIMATE, name="dihedral-samples", n=50_000, seed=2)
        report = ReportBuilder(MonteCarloService(threads=2)).estimate(config)
        entries = {entry.name: entry for entry in report.results}
        ks = entries["dihedral-samples:ks-alpha-uniform"]
        assert ks.value < 1.5 * ks.uncertainty
        assert entries["dihedral-samples:corr-alpha-beta"].target == 0.0
        assert "dihedral-samples:chi2-alpha-beta-uniform" in entries

    def test_analytic_report(self):
        config = RunConfig(command=Command.ANALYTIC, name="projection-between")
        (entry,) = ReportBuilder().analytic(config).results
        assert entry.value == 0.5
        assert entry.method == "closed-form"

    def test_csv_rendering(self):
        report = Report(
            command="estimate",
            config={},
            results=[ReportEntry(name="x", value=0.5, method="monte-carlo", n_or_evals=100)],
        )
        frame = pd.read_csv(io.StringIO(render(report, "csv")))
        assert list(frame.columns) == list(ReportEntry.model_fields)
        assert frame["name"].iloc[0] == "x"

    def test_estimate_config_validation(self):
        with pytest.raises(ValueError):
            RunConfig(command=Command.ESTIMATE, name="gamma-cone", n=10)
