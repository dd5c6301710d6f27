"""
Configuration settings for the interval-egraph CLI.

Manages environment variables and settings for:
- Saturation limits (iterations, e-nodes, wall-clock budget, rule backoff)
- Rule manifest selection
- Batch parallelism
- Logging configuration
"""

import logging
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic_settings import BaseSettings, SettingsConfigDict

from services.orchestration.saturation import RunConfig


class BoundsSettings(BaseSettings):
    """Settings for the bounds analyzer"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=True,
        extra="ignore",
    )

    # Saturation limits
    BOUNDS_MAX_ITERATIONS: int = 30
    BOUNDS_MAX_NODES: int = 50_000
    BOUNDS_TIME_BUDGET: float = 10.0  # seconds
    BOUNDS_MATCH_LIMIT: int = 1_000  # per rule per iteration before a ban
    BOUNDS_BAN_LENGTH: int = 5  # iterations, doubled on every further ban

    # Rule catalog override (manifest file)
    BOUNDS_RULES_PATH: Optional[Path] = None

    # Batch processing
    BOUNDS_BATCH_WORKERS: int = 4

    # Sampling oracle (points per variable) for --check
    BOUNDS_SAMPLE_POINTS: int = 64

    # Logging Configuration
    LOG_LEVEL: str = "WARNING"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    def run_config(self, **overrides: Any) -> RunConfig:
        """RunConfig from these settings; `None` overrides are ignored."""
        values: Dict[str, Any] = {
            "max_iterations": self.BOUNDS_MAX_ITERATIONS,
            "max_nodes": self.BOUNDS_MAX_NODES,
            "time_budget": self.BOUNDS_TIME_BUDGET,
            "match_limit": self.BOUNDS_MATCH_LIMIT,
            "ban_length": self.BOUNDS_BAN_LENGTH,
            "rules_path": self.BOUNDS_RULES_PATH,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(**values)

    def validate_configuration(self) -> dict:
        """Validate configuration and return status"""
        validation_results: Dict[str, Any] = {
            "valid": True,
            "warnings": [],
            "errors": [],
        }

        if self.BOUNDS_MAX_ITERATIONS < 0:
            validation_results["errors"].append("BOUNDS_MAX_ITERATIONS must be >= 0")
        for name in ("BOUNDS_MAX_NODES", "BOUNDS_MATCH_LIMIT", "BOUNDS_BAN_LENGTH", "BOUNDS_BATCH_WORKERS"):
            if getattr(self, name) <= 0:
                validation_results["errors"].append(f"{name} must be positive")
        if self.BOUNDS_TIME_BUDGET <= 0:
            validation_results["errors"].append("BOUNDS_TIME_BUDGET must be positive")
        if self.BOUNDS_SAMPLE_POINTS < 2:
            validation_results["errors"].append("BOUNDS_SAMPLE_POINTS must be at least 2")
        if self.LOG_LEVEL.upper() not in logging.getLevelNamesMapping():
            validation_results["errors"].append(f"Unknown LOG_LEVEL '{self.LOG_LEVEL}'")

        if self.BOUNDS_RULES_PATH is not None and not self.BOUNDS_RULES_PATH.exists():
            validation_results["errors"].append(f"BOUNDS_RULES_PATH {self.BOUNDS_RULES_PATH} does not exist")

        if self.BOUNDS_MAX_ITERATIONS == 0:
            validation_results["warnings"].append("BOUNDS_MAX_ITERATIONS is 0 - reports will equal the baseline")
        if self.BOUNDS_TIME_BUDGET > 300:
            validation_results["warnings"].append("BOUNDS_TIME_BUDGET above 5 minutes per analysis")

        validation_results["valid"] = not validation_results["errors"]
        return validation_results


# Global settings instance
settings = BoundsSettings()


def configure_logging(level: Optional[str] = None) -> None:
    """Configure root logging from settings (CLI entry points only)."""
    logging.basicConfig(
        level=getattr(logging, (level or settings.LOG_LEVEL).upper(), logging.WARNING),
        format=settings.LOG_FORMAT,
    )


def validate_and_log_config(config: Optional[BoundsSettings] = None) -> dict:
    """Validate configuration and log results"""
    config = config or settings
    logger = logging.getLogger(__name__)

    validation = config.validate_configuration()
    if not validation["valid"]:
        logger.error("Configuration validation failed")
        for error in validation["errors"]:
            logger.error(f"Configuration error: {error}")
    for warning in validation["warnings"]:
        logger.warning(f"Configuration warning: {warning}")

    logger.debug(
        f"Limits: {config.BOUNDS_MAX_ITERATIONS} iterations, {config.BOUNDS_MAX_NODES} nodes, "
        f"{config.BOUNDS_TIME_BUDGET}s"
    )
    return validation

