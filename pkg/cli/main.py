"""Main CLI entry point for wavetrack commands.

Exit codes: 0 success (an infeasible simulation is a result, not an error),
1 failed check or plan, 2 invalid scenario, 3 non-finite solver or plant
state, 4 unreadable or unwritable artifact, 5 value function stale for the
scenario.
"""

import click

from cli.checks import self_check_cmd, validate_cmd
from cli.offline import export_cmd, solve_cmd
from cli.online import plan_cmd, simulate_cmd


@click.group()
@click.version_option(version="0.1.0", prog_name="wavetrack")
def cli():
    """wavetrack - safe replanning and tracking for AUVs in waves."""


cli.add_command(solve_cmd)
cli.add_command(export_cmd)
cli.add_command(simulate_cmd)
cli.add_command(plan_cmd)
cli.add_command(self_check_cmd)
cli.add_command(validate_cmd)


if __name__ == "__main__":
    cli()
