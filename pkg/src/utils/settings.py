"""
Runtime settings read from the environment (and an optional .env file).
"""
import os

from dotenv import load_dotenv
from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load environment variables
load_dotenv()


class Settings(BaseSettings):
    """Environment-driven configuration shared by the services and the CLI."""

    model_config = SettingsConfigDict(env_prefix="GTET_", env_file=".env", extra="ignore")

    threads: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)
    debug_mode: bool = Field(
        default=False,
        validation_alias=AliasChoices("GTET_DEBUG_MODE", "DEBUG_MODE"),
    )
    default_seed: int = Field(default=1729, ge=0, lt=2**64)
    max_excluded_fraction: float = Field(default=1e-6, ge=0.0, lt=1.0)


def get_settings() -> Settings:
    """Build settings from the current environment (not cached: tests flip env vars)."""
    return Settings()
