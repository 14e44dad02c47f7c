from typing import Any, Dict, Optional

from pydantic import validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """
    Simulator settings loaded from environment variables
    """
    # Runtime Settings
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"
    NUM_THREADS: int = 1

    # Capacity Settings
    MAX_QUBITS: int = 26
    MAX_DENSE_QUBITS: int = 12
    MAX_DIAGNOSTIC_NX: int = 10
    MAX_SECTOR_DIMENSION: int = 16384
    MAX_FOCK_DIMENSION: int = 20000

    # Artifact Settings
    OUTPUT_PATH: str = "./output"
    GOLDEN_DATA_PATH: str = "./data/golden"
    QPE_REFERENCE_PATH: str = "./config/qpe_reference.json"

    # SPSA Settings
    SPSA_A: float = 0.2
    SPSA_C: float = 0.1
    SPSA_ALPHA: float = 0.602
    SPSA_GAMMA: float = 0.101
    SPSA_BUDGET: int = 2000  # objective evaluations per restart
    SPSA_RESTARTS: int = 8

    @validator("NUM_THREADS", pre=True)
    def clamp_threads(cls, v: Optional[Any]) -> int:
        if v in (None, ""):
            return 1
        return max(1, int(v))

    @validator("MAX_DENSE_QUBITS")
    def dense_below_total(cls, v: int, values: Dict[str, Any]) -> int:
        total = values.get("MAX_QUBITS")
        if total is not None and v > total:
            return total
        return v

    @validator("LOG_LEVEL")
    def normalize_level(cls, v: str) -> str:
        return v.upper()

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = True


# Create global settings instance
settings = Settings()
