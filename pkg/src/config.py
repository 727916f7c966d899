"""Configuration management for the parametric wave lab."""

import logging
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from rich.logging import RichHandler


class Settings(BaseSettings):
    """Application settings loaded from environment variables (prefix ``PWL_``)."""

    model_config = SettingsConfigDict(
        env_prefix="PWL_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Output
    out_dir: Path = Field(default=Path("./out"), description="Default output root")
    float_digits: int = Field(default=17, ge=6, le=17, description="Significant digits in CSV")

    # Execution
    jobs: int = Field(default=1, ge=1, description="Default sweep worker count")
    log_level: str = Field(default="INFO", description="Logging level")

    # Envelope integration tolerances
    envelope_rtol: float = Field(default=1e-10, ge=1e-12, le=1e-6)
    envelope_atol: float = Field(default=1e-12, gt=0.0)


def get_settings() -> Settings:
    """Get settings instance, falling back to defaults on a malformed environment."""
    try:
        return Settings()
    except Exception:
        return Settings.model_construct()


def configure_logging(level: str | None = None) -> None:
    """Route package logging through a rich handler."""
    logging.basicConfig(
        level=(level or settings.log_level).upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(rich_tracebacks=True, show_path=False)],
        force=True,
    )


settings = get_settings()
