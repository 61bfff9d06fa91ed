"""Safe replanning and tracking for time-varying and periodic systems."""

__version__ = "0.1.0"
