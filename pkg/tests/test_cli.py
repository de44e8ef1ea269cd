"""Tests for the command-line interface."""

import csv
import io
import json

import pytest
import yaml
from click.testing import CliRunner
from loguru import logger

from emptiness import __version__
from emptiness.main import EXIT_BUDGET, EXIT_CHECK_FAILURE, EXIT_USAGE, cli

HEADER = "# route=exact threads=1 units: efp dimensionless, wall_ms milliseconds"


@pytest.fixture
def runner(monkeypatch, tmp_path):
    monkeypatch.delenv("EMPTINESS_THREADS", raising=False)
    monkeypatch.chdir(tmp_path)
    try:
        runner = CliRunner(mix_stderr=False)
    except TypeError:
        runner = CliRunner()
    yield runner
    logger.remove()
    logger.add(lambda message: None, level="WARNING")


def invoke(runner, *args):
    return runner.invoke(cli, ["--quiet", *map(str, args)], catch_exceptions=False)


def parse_csv(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def footer(text):
    fits = [line for line in text.splitlines() if line.startswith("# fit: ")]
    assert len(fits) == 1
    return json.loads(fits[0][len("# fit: "):])


def write_config(tmp_path, data):
    path = tmp_path / "custom.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


TRACIAL = ["efp", "--route", "exact", "--d", 1, "--n", 4, "--delta", 0, "--beta", 0, "--l-min", 0, "--l-max", 2]


class TestEfp:
    def test_tracial_rows(self, runner):
        result = invoke(runner, *TRACIAL)
        assert result.exit_code == 0, result.stderr
        assert result.stdout.splitlines()[0] == HEADER
        rows = parse_csv(result.stdout)
        assert [float(row["efp"]) for row in rows] == [1.0, 0.5, 0.25]
        assert [row["L"] for row in rows] == ["0", "1", "2"]
        assert all(row["stderr"] == "" and row["wall_ms"] == "" for row in rows)
        assert all(row["route"] == "exact" and row["beta"] == "0.0" for row in rows)

    def test_output_is_reproducible(self, runner):
        first = invoke(runner, *TRACIAL).stdout
        second = invoke(runner, *TRACIAL).stdout
        assert first == second

    def test_timing_fills_wall_ms(self, runner):
        rows = parse_csv(invoke(runner, *TRACIAL, "--timing").stdout)
        assert all(float(row["wall_ms"]) >= 0 for row in rows)

    def test_json_format(self, runner):
        result = invoke(runner, *TRACIAL, "--format", "json")
        document = json.loads(result.stdout)
        assert document["route"] == "exact"
        assert document["threads"] == 1
        assert [row["efp"] for row in document["rows"]] == [1.0, 0.5, 0.25]
        assert document["rows"][0]["stderr"] is None

    def test_output_file(self, runner, tmp_path):
        target = tmp_path / "results" / "efp.csv"
        result = invoke(runner, *TRACIAL, "--output", target)
        assert result.exit_code == 0
        assert result.stdout == ""
        assert target.read_text().splitlines()[0] == HEADER

    def test_threads_recorded(self, runner):
        result = runner.invoke(cli, ["--quiet", "--threads", "2", *map(str, TRACIAL)])
        assert result.stdout.startswith("# route=exact threads=2 ")

    def test_threads_from_environment(self, runner, monkeypatch):
        monkeypatch.setenv("EMPTINESS_THREADS", "3")
        result = invoke(runner, *TRACIAL)
        assert result.stdout.startswith("# route=exact threads=3 ")

    def test_empty_l_range_is_usage_error(self, runner):
        result = invoke(runner, "efp", "--l-min", 3, "--l-max", 2)
        assert result.exit_code == EXIT_USAGE

    def test_kappa_needs_sixvertex_route(self, runner):
        result = invoke(runner, "efp", "--route", "exact", "--kappa", 0.0)
        assert result.exit_code == EXIT_USAGE

    def test_unknown_route_is_usage_error(self, runner):
        result = runner.invoke(cli, ["--quiet", "efp", "--route", "nope"])
        assert result.exit_code == EXIT_USAGE

    def test_budget_exit_code(self, runner, tmp_path):
        config = write_config(tmp_path, {"general": {"memory_budget_mb": 1}})
        result = runner.invoke(cli, [
            "--quiet", "-c", config, "efp", "--route", "exact", "--n", "10", "--beta", "1", "--l-max", "1",
        ])
        assert result.exit_code == EXIT_BUDGET
        assert "budget" in result.stderr

    def test_sixvertex_matches_exact_ground_state(self, runner):
        common = ["--n", 8, "--m2", 0, "--l-min", 1, "--l-max", 3]
        six = parse_csv(invoke(runner, "efp", "--route", "sixvertex", "--kappa", 0.0, *common).stdout)
        exact = parse_csv(invoke(runner, "efp", "--route", "exact", "--delta", 0.5, *common).stdout)
        for a, b in zip(six, exact):
            assert float(a["efp"]) == pytest.approx(float(b["efp"]), abs=1e-8)
            assert float(a["delta"]) == pytest.approx(0.5)
            assert a["beta"] == b["beta"] == ""

    @pytest.mark.slow
    def test_monte_carlo_matches_exact(self, runner):
        common = ["--n", 4, "--delta", 0.0, "--beta", 1.0, "--l-min", 1, "--l-max", 2]
        exact = parse_csv(invoke(runner, "efp", "--route", "exact", *common).stdout)
        mc = parse_csv(invoke(runner, "efp", "--route", "mc", "--samples", 100000, "--seed", 3, *common).stdout)
        for a, b in zip(mc, exact):
            assert abs(float(a["efp"]) - float(b["efp"])) <= 3 * float(a["stderr"])


class TestScan:
    def test_ground_state_scaling(self, runner):
        result = invoke(
            runner, "scan", "--route", "exact", "--n", 12, "--delta", 0.0, "--m2", 0, "--l-min", 1, "--l-max", 6
        )
        assert result.exit_code == 0, result.stderr
        assert len(parse_csv(result.stdout)) == 6
        fit = footer(result.stdout)
        assert fit["c"] > 0
        assert 1.5 <= fit["nu"] <= 2.5
        assert fit["decaying"]

    def test_no_fit_has_no_footer(self, runner):
        result = invoke(runner, "scan", *TRACIAL[1:], "--no-fit")
        assert "# fit:" not in result.stdout

    def test_beta_scan(self, runner):
        result = invoke(
            runner, "scan", "--route", "exact", "--n", 6, "--delta", -0.5, "--l-max", 2,
            "--beta-scan", "0,0.5,1,2",
        )
        assert result.exit_code == 0, result.stderr
        rows = parse_csv(result.stdout)
        assert [float(row["beta"]) for row in rows] == [0.0, 0.5, 1.0, 2.0]
        assert all(row["L"] == "2" for row in rows)
        fit = footer(result.stdout)
        assert fit["mode"] == "beta"
        assert fit["L"] == 2

    def test_bad_beta_list(self, runner):
        result = runner.invoke(cli, ["--quiet", "scan", "--beta-scan", "1,x"])
        assert result.exit_code == EXIT_USAGE

    def test_beta_scan_rejects_ground_state(self, runner):
        result = invoke(runner, "scan", "--m2", 0, "--beta-scan", "1,2")
        assert result.exit_code == EXIT_USAGE


SMALL_VERIFY = {"opc": {"fixtures": 25}, "bounds": {"rp_trials": 10, "holder_trials": 4}}


class TestVerify:
    @pytest.mark.parametrize("suite", [
        "bounds", "sutherland", "den", "holder", "rp", "opc", "sixvertex-structure",
        pytest.param("chessboard", marks=pytest.mark.slow),
    ])
    def test_suite_passes(self, runner, tmp_path, suite):
        config = write_config(tmp_path, SMALL_VERIFY)
        result = invoke(runner, "-c", config, "verify", suite)
        assert result.exit_code == 0, result.stderr
        summary = json.loads(result.stdout)
        assert summary["suite"] == suite
        assert summary["failures"] == 0
        assert summary["total"] == summary["suites"][suite]["total"] > 0

    @pytest.mark.slow
    def test_all_suites_pass_with_defaults(self, runner):
        result = invoke(runner, "verify", "all")
        assert result.exit_code == 0, result.stderr
        summary = json.loads(result.stdout)
        assert summary["failures"] == 0
        assert set(summary["suites"]) == {
            "holder", "chessboard", "rp", "den", "sutherland", "opc", "sixvertex-structure", "bounds",
        }

    def test_failure_exit_code(self, runner, tmp_path):
        config = write_config(tmp_path, {"bounds": {"slack": -1000.0}})
        result = runner.invoke(cli, ["--quiet", "-c", config, "verify", "den"])
        assert result.exit_code == EXIT_CHECK_FAILURE
        summary = json.loads(result.stdout)
        assert summary["failures"] == summary["total"]
        assert summary["failed_checks"][0]["name"] == "den"

    def test_unknown_suite(self, runner):
        result = runner.invoke(cli, ["--quiet", "verify", "nope"])
        assert result.exit_code == EXIT_USAGE


class TestOpcDemo:
    def test_renders_stages(self, runner):
        result = invoke(runner, "opc-demo", "--width", 4, "--height", 4, "--seed", 1)
        assert result.exit_code == 0, result.stderr
        assert result.stdout.startswith("# fixture 4x4 seed=1 ")
        assert "# flippable plaquettes:" in result.stdout
        assert "# highest configuration:" in result.stdout
        assert "blockade=ok" in result.stdout

    def test_reproducible(self, runner):
        args = ["opc-demo", "--width", 5, "--height", 3, "--seed", 9]
        assert invoke(runner, *args).stdout == invoke(runner, *args).stdout

    def test_aligned_rate(self, runner):
        result = invoke(runner, "opc-demo", "--seed", 2, "--aligned-samples", 5, "--l", 2)
        assert "# aligned runs: l=2 rho=4 m2=0 " in result.stdout


class TestGroup:
    def test_version(self, runner):
        result = runner.invoke(cli, ["--version"])
        assert __version__ in result.stdout

    def test_config_show(self, runner):
        result = invoke(runner, "config-show")
        data = yaml.safe_load(result.stdout)
        assert set(data) == {"general", "exact", "loops", "transfer", "opc", "bounds", "run"}

    def test_config_show_section(self, runner, tmp_path):
        config = write_config(tmp_path, {"run": {"n": 8}})
        result = runner.invoke(cli, ["--quiet", "-c", config, "config-show", "--section", "run"])
        data = yaml.safe_load(result.stdout)
        assert set(data) == {"run"}
        assert data["run"]["n"] == 8

    def test_config_show_unknown_section(self, runner):
        result = invoke(runner, "config-show", "--section", "nope")
        assert result.exit_code == EXIT_USAGE

    def test_banner_on_stderr_only(self, runner):
        result = runner.invoke(cli, [*map(str, TRACIAL)])
        assert result.stdout.splitlines()[0] == HEADER
