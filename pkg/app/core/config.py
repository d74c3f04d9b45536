"""Application configuration and settings management."""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    # Application Settings
    app_name: str = "rabuild"
    app_version: str = "1.0.0"
    debug: bool = False

    # Finite group checks
    associativity_exhaustive_max: int = 64
    associativity_samples: int = 20000

    # Enumeration caps
    ball_cap: int = 1_000_000
    residue_cap: int = 10_000
    cox_word_cap: int = 20

    # Curvature checker caps
    link_degree_cap: int = 16
    link_cycle_cap: int = 12

    # Atlas checks
    atlas_invariance_radius: int = 2

    # Job defaults
    default_radius: int = 2
    random_seed: int = 0

    # Logging
    log_level: str = "INFO"

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore"
    )


# Global settings instance
settings = Settings()
