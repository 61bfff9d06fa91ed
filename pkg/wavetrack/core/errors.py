"""Exception hierarchy with stable CLI exit codes."""


class WavetrackError(Exception):
    """Base class for every error raised by the library."""

    exit_code = 1


class ConfigurationError(WavetrackError, ValueError):
    """Invalid scenario, precondition or dimension mismatch."""

    exit_code = 2


class SolverError(WavetrackError):
    """Non-finite values appeared during the HJI solve or plant integration."""

    exit_code = 3


class ArtifactError(WavetrackError, OSError):
    """A value-function file is missing, truncated or malformed."""

    exit_code = 4


class StaleArtifactError(WavetrackError):
    """The value-function metadata does not match the scenario's model section."""

    exit_code = 5


class PlanningInfeasibleError(WavetrackError):
    """No trajectory satisfies the planning constraints.

    ``blocked_step`` is the first timestep index with no admissible lattice node,
    or ``None`` when every step had admissible nodes but the hard goal could not
    be reached inside the horizon.
    """

    def __init__(
        self,
        message: str,
        blocked_step: int | None = None,
        blocked_time: float | None = None,
    ):
        super().__init__(message)
        self.blocked_step = blocked_step
        self.blocked_time = blocked_time


class ReinitializationError(WavetrackError):
    """No viable planner state exists in the sublevel set."""


class InvarianceError(WavetrackError):
    """A replan hypothesis failed after construction."""
