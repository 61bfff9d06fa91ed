"""Configuration management via Pydantic settings."""

from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Config(BaseSettings):
    """Runtime configuration from init args, WAVETRACK_* environment variables and .env."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
        case_sensitive=False,
        env_ignore_empty=True,  # Ignore empty env vars
        env_prefix="WAVETRACK_",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,  # noqa: ARG003
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,  # noqa: ARG003
    ):
        """Environment wins over .env so WAVETRACK_THREADS can be set per process."""
        return (init_settings, env_settings, dotenv_settings)

    # Observability
    logfire_token: str = Field(
        default="", description="Logfire token for observability"
    )
    log_level: str = Field(default="INFO", description="Logging level")

    # Parallelism
    threads: int = Field(
        default=1,
        ge=1,
        description="Worker threads for constraint-set builds and batch simulation",
    )

    # Online loop timing
    control_period: float = Field(
        default=0.02, gt=0, description="Closed-loop control period in seconds"
    )
    disturbance_hold: float = Field(
        default=0.2, gt=0, description="Zero-order hold interval of d_nom in seconds"
    )

    # Envelope fitting density
    envelope_spatial_samples: int = Field(
        default=101, ge=2, description="Samples per spatial axis for wave envelope fits"
    )
    envelope_time_samples: int = Field(
        default=201, ge=2, description="Samples over one wave period for envelope fits"
    )

    # Paths
    artifacts_dir: Path = Field(
        default=Path("artifacts"), description="Default output root for CLI commands"
    )


# Global config instance
config = Config()
