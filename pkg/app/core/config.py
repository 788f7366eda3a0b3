"""
Application configuration using Pydantic Settings.
Loads configuration from environment variables (prefix DLM_) and an optional .env file.
"""
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import field_validator


class Settings(BaseSettings):
    """Lab settings loaded from environment variables."""

    # App
    APP_NAME: str = "Dirichlet Moments Lab"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False

    # Parallelism (the --threads flag wins over DLM_THREADS)
    THREADS: int = 1

    # Cost caps
    MAX_GROUP_MODULUS: int = 10_000_000
    MAX_MOMENT_MODULUS: int = 10_000
    KLOOSTERMAN_MAX_TUPLES: int = 10_000_000
    MAX_COEFFICIENT_LENGTH: int = 1_000_000
    MAX_PRIME_LIMIT: int = 100_000_000
    PRIME_SEGMENT_SIZE: int = 1 << 22

    # Euler-Maclaurin evaluation of zeta and Hurwitz zeta
    EM_SHIFT: int = 30
    EM_BERNOULLI_TERMS: int = 12

    # Approximate functional equation and its weight quadrature
    AFE_CUTOFF_EPS: float = 1e-12
    AFE_MAX_TERMS: int = 5_000_000
    WEIGHT_ABSCISSA: float = 3.0
    WEIGHT_STEP: float = 0.02
    WEIGHT_HEIGHT: float = 10.0

    # Mollifier schedule
    MOLLIFIER_DELTA: float = 0.5
    SCHEDULE_MIN_MODULUS: int = 100

    # Shifts beyond this height are outside the desk-scale contract
    MAX_SHIFT: float = 50.0

    # Tolerance used by the check suites
    CHECK_TOLERANCE: float = 1e-6

    # AFE cross-method agreement: relative above AFE_RELATIVE_FLOOR, absolute below
    AFE_RELATIVE_TOLERANCE: float = 1e-6
    AFE_ABSOLUTE_TOLERANCE: float = 1e-10
    AFE_RELATIVE_FLOOR: float = 1e-8

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None

    model_config = SettingsConfigDict(
        env_prefix="DLM_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore"
    )

    @field_validator("THREADS")
    @classmethod
    def validate_threads(cls, v: int) -> int:
        """Thread count must be positive."""
        if v < 1:
            raise ValueError("THREADS must be >= 1")
        return v

    @field_validator("EM_SHIFT")
    @classmethod
    def validate_em_shift(cls, v: int) -> int:
        """Euler-Maclaurin shift N must be at least 10."""
        if v < 10:
            raise ValueError("EM_SHIFT must be >= 10")
        return v

    @field_validator("EM_BERNOULLI_TERMS")
    @classmethod
    def validate_bernoulli_terms(cls, v: int) -> int:
        """Number of Bernoulli correction terms must lie in [2, 30]."""
        if not 2 <= v <= 30:
            raise ValueError("EM_BERNOULLI_TERMS must be in [2, 30]")
        return v

    @field_validator("MOLLIFIER_DELTA")
    @classmethod
    def validate_delta(cls, v: float) -> float:
        """Schedule exponent delta must lie in (0, 1)."""
        if not 0.0 < v < 1.0:
            raise ValueError("MOLLIFIER_DELTA must be in (0, 1)")
        return v

    @field_validator(
        "WEIGHT_STEP", "WEIGHT_ABSCISSA", "AFE_CUTOFF_EPS", "CHECK_TOLERANCE",
        "AFE_RELATIVE_TOLERANCE", "AFE_ABSOLUTE_TOLERANCE", "AFE_RELATIVE_FLOOR"
    )
    @classmethod
    def validate_positive(cls, v: float) -> float:
        """Quadrature parameters and tolerances must be positive."""
        if v <= 0:
            raise ValueError("value must be positive")
        return v

    @field_validator("WEIGHT_HEIGHT")
    @classmethod
    def validate_height(cls, v: float) -> float:
        """Truncation height of the weight integral must be at least 8."""
        if v < 8:
            raise ValueError("WEIGHT_HEIGHT must be >= 8")
        return v


# Global settings instance
settings = Settings()
