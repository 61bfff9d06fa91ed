"""Spans and structured events for solves, simulations and replans.

Everything goes to Logfire with its full attributes and to the loguru console
with a short, indented summary. Telemetry only leaves the machine when a
token is configured and no test run is in progress.
"""

from contextlib import contextmanager
import sys
import time

import logfire as _logfire

from helpers.logger import logger
from wavetrack.core.config import config

__all__ = ["logfire", "should_send_to_logfire"]


def should_send_to_logfire() -> bool:
    """Determine if telemetry should be sent to Logfire based on environment.

    Rules:
    - Don't send when tests are running
    - Don't send if no token configured
    """
    if "pytest" in sys.modules:
        return False
    return bool(config.logfire_token)


class UnifiedLogger:
    """Logfire call shape with indented loguru console output.

    Spans record their wall time as ``elapsed_ms`` so slow solves and replans
    stand out in the trace view.
    """

    # Only these attributes are echoed to the console; logfire gets all of them
    important_keys = (
        "case",
        "operation",
        "replan",
        "level",
        "scenario",
        "error_type",
    )

    def __init__(self):
        self._span_depth = 0

    def _format_attributes(self, **kwargs) -> str:
        shown = [
            f"{k}={v}"
            for k, v in kwargs.items()
            if k in self.important_keys and v is not None
        ]
        return f" [{' | '.join(shown)}]" if shown else ""

    def _console(self, level: str, message: str, /, **kwargs):
        indent = "  " * self._span_depth
        getattr(logger, level)(f"{indent}{message}{self._format_attributes(**kwargs)}")

    def info(self, message: str, **kwargs):
        self._console("info", message, **kwargs)
        _logfire.info(message, **kwargs)

    def warning(self, message: str, **kwargs):
        self._console("warning", message, **kwargs)
        _logfire.warning(message, **kwargs)

    def error(self, message: str, **kwargs):
        self._console("error", message, **kwargs)
        _logfire.error(message, **kwargs)

    @contextmanager
    def span(self, name: str, **kwargs):
        """Logfire span with nested console output.

        Example output:
            ▶ 🚤 Simulation [scenario=sim1_case2 | operation=simulate]
              ▶ 🔁 Replan [replan=0 | operation=replan]
        """
        self._console("info", f"▶ {name}", **kwargs)
        self._span_depth += 1
        started = time.monotonic()

        with _logfire.span(name, **kwargs) as span:
            try:
                yield span
            finally:
                self._span_depth -= 1
                if hasattr(span, "set_attribute"):
                    span.set_attribute("elapsed_ms", (time.monotonic() - started) * 1000.0)


def _configure():
    if config.logfire_token:
        _logfire.configure(
            token=config.logfire_token,
            service_name="wavetrack",
            send_to_logfire=should_send_to_logfire(),
            scrubbing=False,
            console=False,
        )
        logger.debug("🔥 Logfire observability enabled")
    else:
        _logfire.configure(send_to_logfire=False, console=False)
        logger.debug("Logfire observability disabled (no token configured)")


logfire = UnifiedLogger()
_configure()
