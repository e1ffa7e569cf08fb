"""
Environment configuration and settings for the mcgroupoid toolkit.
"""
import os
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Logging configuration
    # stdout carries the JSON documents, so logs go to stderr and stay quiet by default.
    LOG_LEVEL: str = os.getenv("LOG_LEVEL", "WARNING")
    LOG_TO_FILE: bool = os.getenv("LOG_TO_FILE", "false").lower() == "true"
    LOG_FILE: str = os.getenv("LOG_FILE", "mcgroupoid.log")

    # Truncation applied when the command line gives none; unset keeps the file's value
    DEFAULT_TRUNCATION: Optional[int] = (
        int(os.getenv("DEFAULT_TRUNCATION")) if os.getenv("DEFAULT_TRUNCATION") else None
    )

    # Desk-scale guards
    MAX_ARITY_LIMIT: int = int(os.getenv("MAX_ARITY_LIMIT", "6"))
    ITERATION_SLACK: int = int(os.getenv("ITERATION_SLACK", "1"))

    # Document output
    JSON_INDENT: int = int(os.getenv("JSON_INDENT", "2"))
    SCHEMA_VERSION: int = 1

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=True, extra="ignore")


# Global settings instance
settings = Settings()
