
from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List
from functools import lru_cache


class Settings(BaseSettings):
    # -------------------------------- Application ------------------------------- #
    APP_NAME: str = "GLMB TGS Toolkit"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    ENVIRONMENT: str = "development"

    # ------------------------------------ API ----------------------------------- #
    API_V1_PREFIX: str = "/api/v1"
    API_HOST: str = "0.0.0.0"
    API_PORT: int = 6710
    CORS_ORIGINS: List[str] = ["http://localhost:5173"]
    CORS_ALLOW_CREDENTIALS: bool = True
    CORS_ALLOW_METHODS: List[str] = ["*"]
    CORS_ALLOW_HEADERS: List[str] = ["*"]
    API_MAX_ITERATIONS: int = 200_000  # per request, larger sampler runs get 413
    API_MAX_SCANS: int = 500
    API_MAX_ENUMERATION: int = 100_000  # (M+2)^P bound for oracle checks, larger matrices get 422

    # ---------------------------------- LOGGING --------------------------------- #
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "json"
    LOG_FILE_PATH: str = "logs/glmb.log"  # empty string disables the file handler
    LOG_MAX_SIZE: int = 10_000_000
    LOG_BACKUP_COUNT: int = 10
    MAX_PARAM_LOG_SIZE: int = 2000  # max chars of sanitized params per action log

    # --------------------------------- SAMPLING --------------------------------- #
    DEFAULT_ITERATIONS: int = 5000
    DEFAULT_ALPHA: float = 0.5
    DEFAULT_BETA: float = 0.5
    ENUMERATION_LIMIT: int = 10_000_000
    MIN_COST_ENTRY: float = 1e-300  # floor for eta entries of far-away measurements

    # ---------------------------------- RUNTIME --------------------------------- #
    MAX_WORKERS: int = 1
    CSV_FLOAT_FORMAT: str = ".10g"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


settings = get_settings()
