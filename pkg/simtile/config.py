"""
Configuration Module

Defaults for tolerances, sampling budgets and logging, plus the pydantic
models the command line fills from its flags.
"""

import os

from pydantic import BaseModel, Field

# Geometric predicates
DEFAULT_TOLERANCE = 1e-9
UNIT_TOLERANCE = 1e-12
ORTHOGONALITY_TOLERANCE = 1e-10
RANK_TOLERANCE = 1e-8

# Sampling
CHUNK_SIZE = 1 << 16
DEFAULT_SAMPLES = 1_000_000
DEFAULT_SEED = 0
DEFAULT_INTERIOR_SAMPLES = 2048

# Logging (optional environment overrides)
LOG_LEVEL = os.getenv("SIMTILE_LOG_LEVEL", "WARNING")
LOG_FORMAT = os.getenv("SIMTILE_LOG_FORMAT", "console")  # 'json' or 'console'


class Thresholds(BaseModel):
    """Acceptance thresholds for tiling validation."""

    volume_gap: float = Field(0.01, gt=0)
    overlap: float = Field(0.01, gt=0)


class SamplingSettings(BaseModel):
    """Monte Carlo settings shared by the sampling commands."""

    samples: int = Field(DEFAULT_SAMPLES, ge=1)
    seed: int = Field(DEFAULT_SEED, ge=0, lt=2**64)
    workers: int = Field(1, ge=1)
    chunk_size: int = Field(CHUNK_SIZE, ge=1)
    progress: bool = False
