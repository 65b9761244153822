from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel

from analysis.resources import CpReport, DegeneracyReport, ResourceEstimate


class CliConfig(BaseModel):
    command: Literal["demo", "analyze", "sample", "sweep", "compare"]
    instance: Optional[Path] = None
    random: Optional[int] = None
    example: bool = False
    seed: int = 0
    alpha: Optional[float] = None
    backend: Literal["dense", "tour", "auto"] = "auto"
    format: Literal["text", "structured"] = "text"
    threads: Optional[int] = None
    k: Optional[float] = None
    shots: int = 10000
    trials: int = 2000
    steps: int = 10000
    grid: Optional[str] = None
    seeds: int = 30
    schedule: str = "log:1"
    log: Optional[Path] = None
    verbosity: int = 0


class EdgeBias(BaseModel):
    edge: str
    distance: float
    q: float


class TourRow(BaseModel):
    tour: str
    bias_product: float
    distance: float
    probability: float


class CheckResult(BaseModel):
    name: str
    expected: float
    actual: float
    tolerance: float
    passed: bool


class DemoReport(BaseModel):
    alpha: float
    edges: List[EdgeBias]
    tours: List[TourRow]
    z: float
    solution_probability: float
    unbiased_probability: float
    resources: ResourceEstimate
    checks_skipped: bool
    checks: List[CheckResult]


class AnalyzeReport(BaseModel):
    n: int
    alpha: float
    top: List[TourRow]
    z: float
    z_lower: float
    z_upper: float
    log_z: float
    z_within_bounds: bool
    resources: ResourceEstimate
    cp: CpReport
    degeneracy: DegeneracyReport


class SampleRow(BaseModel):
    tour: str
    count: int
    frequency: float
    probability: float
    deviation: float


class SampleReport(BaseModel):
    n: int
    alpha: float
    backend: str
    shots: int
    seed: int
    success_prob: float
    rows: List[SampleRow]
    max_abs_deviation: float


class SweepRow(BaseModel):
    alpha: float
    z: float
    log_z: float
    p_optimal: float
    success_prob: float
    expected_repeats: Optional[float]
    m_bits: Optional[int]
    cp_satisfied: bool


class SweepReport(BaseModel):
    n: int
    k: float
    rows: List[SweepRow]
