"""Tests for CLI error messages, exit codes and UX."""

from click.testing import CliRunner
import pytest

from cli.main import cli


class TestCLIErrorMessages:
    """Test that the CLI maps failures to helpful messages and stable exit codes."""

    @pytest.fixture
    def runner(self):
        """Create Click CLI test runner."""
        return CliRunner()

    def test_solve_missing_scenario_argument(self, runner):
        """Test that a missing scenario path shows a usage error."""
        result = runner.invoke(cli, ["solve"])

        assert result.exit_code == 2
        assert "SCENARIO_PATH" in result.output or "Missing argument" in result.output

    def test_solve_missing_file(self, runner, tmp_path):
        """Test that an absent scenario is a configuration error."""
        result = runner.invoke(cli, ["solve", str(tmp_path / "absent.json")])

        assert result.exit_code == 2
        assert "cannot read scenario" in result.output

    def test_solve_malformed_json(self, runner, tmp_path):
        """Test that malformed JSON exits with code 2."""
        path = tmp_path / "broken.json"
        path.write_text('{"name": "broken", ')

        result = runner.invoke(cli, ["solve", str(path)])

        assert result.exit_code == 2
        assert "invalid scenario" in result.output

    def test_unknown_key_rejected(self, runner, tmp_path):
        """Test that unknown scenario keys are schema errors."""
        path = tmp_path / "extra.json"
        path.write_text(
            '{"name": "extra", "model": {"case": "game1d", "game": '
            '{"tracker_speed": 2, "planner_speed": 1}, "colour": "red"}, '
            '"offline": {"grid": {"lo": [-1], "hi": [1], "counts": [11]}, "t_off": 1}}'
        )

        result = runner.invoke(cli, ["solve", str(path)])

        assert result.exit_code == 2
        assert "colour" in result.output

    def test_plan_without_online_section(self, runner):
        """Test that planning a solver-only scenario is refused."""
        result = runner.invoke(cli, ["plan", "scenarios/game1d.json"])

        assert result.exit_code == 2
        assert "no online section" in result.output

    def test_export_requires_value_fn(self, runner, tmp_path):
        """Test that export names its required options."""
        result = runner.invoke(
            cli, ["export", "scenarios/sim1_case2.json", "--out-dir", str(tmp_path)]
        )

        assert result.exit_code == 2
        assert "--value-fn" in result.output

    def test_missing_value_function(self, runner, tmp_path):
        """Test that an absent value-function file is an I/O error."""
        result = runner.invoke(
            cli,
            [
                "simulate",
                "scenarios/sim1_case2.json",
                "--value-fn",
                str(tmp_path / "absent.wtvf"),
                "--out-dir",
                str(tmp_path / "runs"),
            ],
        )

        assert result.exit_code == 4
        assert "cannot read value function" in result.output

    def test_help_messages_exist(self, runner):
        """Test that all commands have help messages."""
        result = runner.invoke(cli, ["--help"])
        assert result.exit_code == 0
        for command in ("solve", "simulate", "plan", "self-check", "validate", "export"):
            assert command in result.output

        result = runner.invoke(cli, ["solve", "--help"])
        assert result.exit_code == 0
        assert "SCENARIO_PATH" in result.output
        assert "Example:" in result.output

        result = runner.invoke(cli, ["simulate", "--help"])
        assert result.exit_code == 0
        assert "--seed" in result.output
        assert "--disturbance-scale" in result.output
