"""Scenario validators and shared validation-result formatting.

Schema errors come from the pydantic models; the checks here add the
cross-field warnings a scenario author wants before spending a solve on it.
"""

from dataclasses import dataclass
from pathlib import Path

import ujson

from helpers.logger import logger
from wavetrack.core.config import config
from wavetrack.core.errors import ConfigurationError
from wavetrack.core.scenario import Scenario


@dataclass
class Violation:
    """A single validation finding with context.

    ``step`` is a planner timestep for plan checks and ``None`` for
    scenario-level findings.
    """

    step: int | None
    message: str
    error_type: str  # schema, geometry, timing, C1..C4
    severity: str = "error"  # error, warning

    def __str__(self) -> str:
        step_info = f"Step {self.step}: " if self.step is not None else ""
        return f"[{self.error_type.upper()}] {step_info}{self.message}"


class ScenarioValidator:
    """Runs schema and geometry checks over scenario files."""

    def validate_file(self, file_path: Path | str) -> list[Violation]:
        file_path = Path(file_path)
        logger.debug(f"🔍 Validating scenario file: {file_path}")

        if not file_path.exists():
            return [Violation(None, f"File not found: {file_path}", "structure")]

        try:
            scenario = Scenario.from_file(file_path)
        except ConfigurationError as e:
            return [Violation(None, str(e), "schema")]

        errors = self._validate_geometry(scenario) + self._validate_timing(scenario)

        if any(e.severity == "error" for e in errors):
            logger.warning(f"❌ Found {len(errors)} issue(s) in {file_path}")
        else:
            logger.success(f"✅ {file_path} passed all validation checks")
        return errors

    def validate_directory(self, dir_path: Path | str) -> dict[str, list[Violation]]:
        dir_path = Path(dir_path)
        results = {}
        scenario_files = sorted(dir_path.rglob("*.json"))
        if not scenario_files:
            logger.warning(f"⚠️ No scenario files found in {dir_path}")
            return results

        logger.info(f"🔍 Validating {len(scenario_files)} scenario files in {dir_path}")
        for scenario_file in scenario_files:
            results[str(scenario_file.relative_to(dir_path))] = self.validate_file(
                scenario_file
            )
        return results

    def _validate_geometry(self, scenario: Scenario) -> list[Violation]:
        online = scenario.online
        if online is None:
            return []
        errors = []
        region = scenario.model.region
        for i, rect in enumerate(online.obstacles):
            if not rect.intersects(region):
                errors.append(
                    Violation(
                        None,
                        f"Obstacle {i} lies entirely outside the region",
                        "geometry",
                        severity="warning",
                    )
                )
        for i, goal in enumerate(online.goals):
            if min(goal.width, goal.height) < 2 * online.resolution:
                errors.append(
                    Violation(
                        None,
                        f"Goal {i} is narrower than two planner cells and will "
                        "likely erode away",
                        "geometry",
                        severity="warning",
                    )
                )
            if any(goal.intersects(rect) for rect in online.obstacles):
                errors.append(
                    Violation(None, f"Goal {i} overlaps an obstacle", "geometry")
                )
        return errors

    def _validate_timing(self, scenario: Scenario) -> list[Violation]:
        online = scenario.online
        if online is None:
            return []
        errors = []
        period = config.control_period
        ratio = online.planner.sample_period / period
        if abs(ratio - round(ratio)) > 1e-9:
            errors.append(
                Violation(
                    None,
                    f"Planner sample period is not a multiple of the {period} s "
                    "control period",
                    "timing",
                    severity="warning",
                )
            )
        if scenario.offline.save_dt is not None and scenario.model.case != "game1d":
            save_ratio = online.planner.sample_period / scenario.offline.save_dt
            if save_ratio < 1 - 1e-9:
                errors.append(
                    Violation(
                        None,
                        "Value slices are stored more sparsely than the planner samples them",
                        "timing",
                        severity="warning",
                    )
                )
        return errors


def format_validation_results(
    results: dict[str, list[Violation]], output_format: str = "human"
) -> str:
    """Format validation results for display.

    Args:
        results: Mapping from a file or plan label to its findings
        output_format: "human", "json" or "github"
    """
    if output_format == "json":
        json_results = {
            label: [
                {
                    "step": error.step,
                    "message": error.message,
                    "error_type": error.error_type,
                    "severity": error.severity,
                }
                for error in errors
            ]
            for label, errors in results.items()
        }
        return ujson.dumps(json_results, indent=2)

    if output_format == "github":
        lines = []
        for label, errors in results.items():
            for error in errors:
                level = "error" if error.severity == "error" else "warning"
                lines.append(f"::{level} file={label}::{error}")
        return "\n".join(lines)

    lines = []
    total_errors = 0
    total_warnings = 0
    for label, errors in results.items():
        if errors:
            lines.append(f"\n📄 {label}:")
            for error in errors:
                icon = "❌" if error.severity == "error" else "⚠️"
                lines.append(f"  {icon} {error}")
                if error.severity == "error":
                    total_errors += 1
                else:
                    total_warnings += 1
        else:
            lines.append(f"\n✅ {label}: Valid")

    valid = len([errors for errors in results.values() if not errors])
    lines.append("\n📊 Summary:")
    lines.append(f"  Files: {valid}/{len(results)} valid")
    if total_errors:
        lines.append(f"  Errors: {total_errors}")
    if total_warnings:
        lines.append(f"  Warnings: {total_warnings}")
    return "\n".join(lines)


def has_errors(results: dict[str, list[Violation]]) -> bool:
    return any(e.severity == "error" for errors in results.values() for e in errors)
