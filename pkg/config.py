"""Configuration settings for R-Trans."""

from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    """Process settings loaded from environment variables."""

    # Dataset root fallback when --dataset-root is not given
    RTRANS_DATASET_ROOT: Optional[str] = None

    # Default output directory for runs
    RTRANS_OUTPUT_DIR: str = "runs"

    # Logging
    LOG_LEVEL: str = "INFO"

    # Environment
    ENVIRONMENT: str = "development"

    # Sentry Configuration
    SENTRY_DSN: Optional[str] = None
    VERSION: str = "0.1.0"

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"


settings = Settings()
