from functools import lru_cache
from typing import Annotated, Any

from pydantic import field_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict


class OpfrConfig(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="OPFR_",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"
    log_format: str = "console"

    # Distances
    default_metric: str = "euclidean"
    distance_matrix_budget_bytes: int = 64 * 1024 * 1024

    # k-NN OPF
    k_max: int = 20

    # Protocol
    default_train_fraction: float = 0.25
    default_n_runs: int = 10
    default_top_r: Annotated[list[int], NoDecode] = [10, 15, 20]
    alpha: float = 0.05
    wilcoxon_exact_threshold: int = 12

    # Benchmark
    benchmark_repetitions: int = 10
    benchmark_warmup: bool = True

    @field_validator("default_top_r", mode="before")
    @classmethod
    def parse_top_r(cls, v: Any) -> list[int]:
        if isinstance(v, str):
            import json

            try:
                parsed = json.loads(v)
                if isinstance(parsed, list):
                    return [int(item) for item in parsed]
                else:
                    return [int(parsed)]
            except json.JSONDecodeError:
                return [int(item.strip()) for item in v.split(",") if item.strip()]
        elif isinstance(v, list):
            return [int(item) for item in v]
        else:
            return [int(v)]

    @field_validator("log_format")
    @classmethod
    def validate_log_format(cls, v: str) -> str:
        v = v.lower()
        if v not in {"console", "json"}:
            raise ValueError("log_format must be 'console' or 'json'")
        return v


@lru_cache
def get_config() -> OpfrConfig:
    return OpfrConfig()
