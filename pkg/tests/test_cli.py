"""Tests for the command-line front end."""

import pytest
import yaml

from pybmsbalance.cli import build_parser, main
from pybmsbalance.config import (
    EXIT_CONFIG_ERROR,
    EXIT_NUMERICAL_FAILURE,
    EXIT_SUCCESS,
    EXIT_VERIFICATION_FAILED,
)
from pybmsbalance.models import ScenarioConfig
from pybmsbalance.runner import build_system
from pybmsbalance.services import export_coefficients

LEAD = {
    "statistics": "fermi",
    "beta": 1.0,
    "mu": 2.0,
    "profile": {"kind": "lorentzian", "gamma": 1.0, "center": 2.0, "width": 1.5},
    "label": "lead",
}


@pytest.fixture
def config_file(tmp_path):
    """Write a scenario file and return its path."""

    def factory(**data):
        path = tmp_path / "scenario.yaml"
        path.write_text(yaml.safe_dump(data))
        return path

    return factory


@pytest.fixture
def electronic_scenario(config_file):
    """Scenario with three sites and one lead."""
    return config_file(
        model={"preset": "electronic", "params": {"N": 3, "eps": 1.0, "U": 1.0}},
        baths=[LEAD],
    )


class TestParser:
    """Test the argument parser."""

    def test_commands(self):
        """Test every pipeline has a subcommand."""
        parser = build_parser()

        for command in ("steady", "verify", "sweep", "fig1", "occupation-scan"):
            assert parser.parse_args([command]).command == command

    def test_inject_only_for_verify(self):
        """Test coefficient injection is a verify option."""
        parser = build_parser()

        args = parser.parse_args(["verify", "--inject-coefficients", "c.txt"])

        assert args.inject_coefficients.name == "c.txt"
        with pytest.raises(SystemExit):
            parser.parse_args(["steady", "--inject-coefficients", "c.txt"])

    def test_command_required(self):
        """Test a subcommand must be given."""
        with pytest.raises(SystemExit):
            main([])


class TestExitCodes:
    """Test the process exit codes."""

    def test_steady(self, electronic_scenario, tmp_path, capsys):
        """Test a successful run prints the written files."""
        out = tmp_path / "out"

        code = main(["steady", "--config", str(electronic_scenario), "--out", str(out)])

        assert code == EXIT_SUCCESS
        assert (out / "populations.csv").exists()
        assert str(out / "summary.txt") in capsys.readouterr().out

    def test_model_override(self, electronic_scenario, tmp_path):
        """Test --model replaces the scenario's model."""
        out = tmp_path / "out"

        code = main(
            [
                "steady",
                "--config",
                str(electronic_scenario),
                "--model",
                "electronic:N=5,eps=1,U=0.5",
                "--out",
                str(out),
            ]
        )

        assert code == EXIT_SUCCESS
        assert len((out / "populations.csv").read_text().splitlines()) == 7

    def test_missing_config(self, tmp_path, capsys):
        """Test an unreadable scenario file is a configuration error."""
        code = main(["steady", "--config", str(tmp_path / "missing.yaml")])

        assert code == EXIT_CONFIG_ERROR
        assert "configuration error" in capsys.readouterr().err

    def test_missing_baths(self, tmp_path):
        """Test a steady run without baths is a configuration error."""
        code = main(["steady", "--model", "electronic:N=2", "--out", str(tmp_path)])

        assert code == EXIT_CONFIG_ERROR

    def test_bad_model_string(self, electronic_scenario, tmp_path):
        """Test an unknown preset name is a configuration error."""
        code = main(
            ["steady", "--config", str(electronic_scenario), "--model", "quantum:N=1"]
        )

        assert code == EXIT_CONFIG_ERROR

    @pytest.mark.parametrize("table", [None, "0.0\n1.0\n", ""])
    def test_bad_rate_table(self, config_file, tmp_path, capsys, table):
        """Test a missing or malformed rate table is a configuration error."""
        rates = tmp_path / "rates.dat"
        if table is not None:
            rates.write_text(table)
        path = config_file(
            model={"preset": "electronic", "params": {"N": 2, "eps": 1.0}},
            baths=[{**LEAD, "profile": {"kind": "tabulated", "path": str(rates)}}],
        )

        code = main(["steady", "--config", str(path), "--out", str(tmp_path)])

        assert code == EXIT_CONFIG_ERROR
        assert "rate table" in capsys.readouterr().err

    def test_numerical_failure(self, config_file, tmp_path, capsys):
        """Test solver failures get their own exit code."""
        path = config_file(
            model={"preset": "oscillator", "params": {"Omega": 1.0, "N_cut": 70}},
            baths=[{**LEAD, "statistics": "bose", "mu": 0.0}],
            solver={"method": "nullspace"},
        )

        code = main(["steady", "--config", str(path), "--out", str(tmp_path)])

        assert code == EXIT_NUMERICAL_FAILURE
        assert "PreconditionError" in capsys.readouterr().err


class TestVerifyCommand:
    """Test the verify subcommand with injected coefficients."""

    @pytest.fixture
    def injected(self, electronic_scenario, tmp_path):
        """Coefficient file with one rate perturbed by 1e-3."""
        config = ScenarioConfig.from_yaml(electronic_scenario)
        coeff = build_system(config).coefficients_for(0)
        gamma = dict(coeff.gamma)
        gamma[(2, 1, 2, 1)] *= 1 + 1e-3
        path = tmp_path / "coeff.txt"
        export_coefficients(coeff.model_copy(update={"gamma": gamma}), path)
        return path

    def test_passes(self, electronic_scenario, tmp_path):
        """Test assembled coefficients pass."""
        code = main(
            ["verify", "--config", str(electronic_scenario), "--out", str(tmp_path)]
        )

        assert code == EXIT_SUCCESS
        assert "gibbs: PASS" in (tmp_path / "verify.txt").read_text()

    def test_injected_fails(self, electronic_scenario, injected, tmp_path, capsys):
        """Test a perturbed rate is detected."""
        code = main(
            [
                "verify",
                "--config",
                str(electronic_scenario),
                "--out",
                str(tmp_path / "out"),
                "--inject-coefficients",
                str(injected),
            ]
        )

        assert code == EXIT_VERIFICATION_FAILED
        assert "verification failed" in capsys.readouterr().err
        assert "FAIL" in (tmp_path / "out" / "verify.txt").read_text()

    def test_loose_tolerance(self, electronic_scenario, injected, tmp_path):
        """Test --tol above the perturbation lets the check pass."""
        code = main(
            [
                "verify",
                "--config",
                str(electronic_scenario),
                "--out",
                str(tmp_path / "out"),
                "--tol",
                "1e-2",
                "--inject-coefficients",
                str(injected),
            ]
        )

        assert code == EXIT_SUCCESS


class TestFig1Command:
    """Test the default scenario from the command line."""

    def test_byte_identical_reruns(self, tmp_path):
        """Test two runs write identical files."""
        first, second = tmp_path / "first", tmp_path / "second"

        assert main(["fig1", "--out", str(first)]) == EXIT_SUCCESS
        assert main(["fig1", "--out", str(second)]) == EXIT_SUCCESS

        names = sorted(p.name for p in first.iterdir())
        assert names == [
            "crossings.csv",
            "occupation.csv",
            "populations.csv",
            "summary.txt",
        ]
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes()
