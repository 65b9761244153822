import math
from pathlib import Path

from dotenv import load_dotenv
from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Load .env from repo root (cwd-agnostic)
repo_root = Path(__file__).resolve().parents[2]
load_dotenv(repo_root / ".env")

class Settings(BaseSettings):
    default_alpha: float = Field(default=math.e, gt=1.0, alias="QSA_DEFAULT_ALPHA")
    enumeration_cap: int = Field(default=12, ge=3, le=12, alias="QSA_ENUMERATION_CAP")
    dense_max_n: int = Field(default=4, ge=3, le=5, alias="QSA_DENSE_MAX_N")  # 5 means 2^30 nominal qubit space
    tie_tolerance: float = Field(default=1e-12, alias="QSA_TIE_TOLERANCE")
    edge_gap_threshold: float = Field(default=1e-3, alias="QSA_EDGE_GAP_THRESHOLD")
    tour_gap_threshold: float = Field(default=1e-6, alias="QSA_TOUR_GAP_THRESHOLD")
    underflow_floor: float = Field(default=1e-300, alias="QSA_UNDERFLOW_FLOOR")
    shot_chunk: int = Field(default=65536, ge=1, alias="QSA_SHOT_CHUNK")
    parallel_min_n: int = Field(default=9, ge=3, alias="QSA_PARALLEL_MIN_N")
    threads: int = Field(default=-1, alias="QSA_THREADS")  # joblib n_jobs semantics
    default_k: float = Field(default=2.0, ge=0.0, alias="QSA_DEFAULT_K")
    log_level: str = Field(default="INFO", alias="QSA_LOG_LEVEL")

    model_config = SettingsConfigDict(
        env_file=".env",
        case_sensitive=True,
        populate_by_name=True,
        extra="ignore",
    )

settings = Settings()  # import this elsewhere
