from pydantic_settings import BaseSettings, SettingsConfigDict
from functools import lru_cache


class Settings(BaseSettings):
    log: str = "WARNING"
    redis_url: str | None = None
    cache_ttl: int = 86400

    # Solver defaults used when a call leaves the argument as None
    brd_tol: float = 1e-9
    brd_max_sweeps: int = 10000
    verify_tol: float = 1e-6
    deviation_grid: int = 1001
    lemke_pivot_factor: int = 50
    csv_precision: int = 10

    model_config = SettingsConfigDict(
        env_prefix="NETSEC_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore"
    )


@lru_cache
def get_settings() -> Settings:
    return Settings()
