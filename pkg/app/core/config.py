from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache

PROJECT_NAME = "Hard-Core Boundary Law Solver"

# Tolerances
RESIDUAL_TOL = 1e-12
ROOT_TOL = 1e-13
MEMBERSHIP_TOL = 1e-9
DEDUP_DISTANCE = 1e-8
SOLUTION_MERGE_DISTANCE = 1e-7
ACCEPT_RESIDUAL = 1e-10
TANGENCY_TOL = 1e-4
KESTEN_MARGIN = 1e-7

# Grids
SCAN_GRID = 4096
POLY_SCAN_GRID = 16384
ORACLE_RESOLUTION = 2000
ORACLE_CHUNK_ROWS = 256

# Reduced domains open at a pole stay this far from it
DOMAIN_EPS = 1e-12


class Settings(BaseSettings):
    """Runtime settings read from the environment."""
    # Size guard for exhaustive finite-volume enumeration
    HC_MAX_TREE_VERTICES: int = Field(25, ge=1)

    # Worker threads for parameter scans
    HC_THREADS: int = Field(4, ge=1)

    model_config = SettingsConfigDict(case_sensitive=True)


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()


# Initialize settings instance
settings = get_settings()
