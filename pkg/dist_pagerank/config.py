"""Run parameters and process settings."""

import os
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

DEFAULT_DAMPING = 0.15


class SchemeParams(BaseModel):
    """Parameters shared by the randomized update schemes.

    The rescaled damping is not stored: it depends on the scheme and on the
    page count, see ``rescaled_damping_single`` and ``rescaled_damping_simul``.
    """

    model_config = ConfigDict(frozen=True)

    m: float = Field(default=DEFAULT_DAMPING, gt=0.0, lt=1.0)
    alpha: float = Field(default=1.0, gt=0.0, le=1.0)
    seed: int = Field(default=0, ge=0)
    steps: int = Field(default=1, ge=1)


class TerminationParams(BaseModel):
    """Stability test used to freeze pages."""

    model_config = ConfigDict(frozen=True)

    delta: float = Field(gt=0.0, lt=1.0)
    ns: int = Field(ge=1)


class Settings(BaseModel):
    """Process-level settings, read from the environment."""

    log_level: str = "INFO"
    workers: int = Field(default=1, ge=1)
    sample_every: int = Field(default=100, ge=1)
    reference_tol: float = Field(default=1e-12, gt=0.0)

    @classmethod
    def from_env(cls, dotenv_path: Optional[str] = None) -> "Settings":
        """Build settings from ``DIST_PAGERANK_*`` environment variables.

        Args:
            dotenv_path: Optional .env file; the default lookup is used when omitted

        Returns:
            Validated settings
        """
        load_dotenv(dotenv_path)
        values = {
            "log_level": os.getenv("DIST_PAGERANK_LOG_LEVEL"),
            "workers": os.getenv("DIST_PAGERANK_WORKERS"),
            "sample_every": os.getenv("DIST_PAGERANK_SAMPLE_EVERY"),
            "reference_tol": os.getenv("DIST_PAGERANK_REFERENCE_TOL"),
        }
        return cls(**{k: v for k, v in values.items() if v is not None})
