"""
Run configuration and report schema shared by the CLI commands.
"""
from enum import Enum
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

MIN_TRIALS = 100


class Command(str, Enum):
    ESTIMATE = "estimate"
    ANALYTIC = "analytic"
    DENSITY = "density"
    VALIDATE = "validate"


class RunConfig(BaseModel):
    """Everything that determines a command's output (thread count deliberately excluded)."""

    model_config = ConfigDict(frozen=True)

    command: Command
    name: Optional[str] = None
    n: Optional[int] = None
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)
    abs_tol: Optional[float] = Field(default=None, gt=0.0)
    rel_tol: Optional[float] = Field(default=None, gt=0.0)
    output_format: Literal["json", "csv"] = "json"
    output_path: Optional[str] = None
    grid: Optional[str] = None
    scale: Optional[Literal["default", "quick"]] = None
    only: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_trials(self) -> "RunConfig":
        if self.command is Command.ESTIMATE:
            if self.name is None:
                raise ValueError("estimate needs an event name")
            if self.n is None or self.n < MIN_TRIALS:
                raise ValueError(f"n must be at least {MIN_TRIALS} for Monte Carlo commands")
        return self

    def report_fields(self) -> Dict[str, Any]:
        """Config as it appears in a report: no output path, no unset fields."""
        return self.model_dump(mode="json", exclude_none=True, exclude={"output_path"})


class ReportEntry(BaseModel):
    """One number in a report together with its uncertainty and provenance."""

    name: str
    value: Optional[float]
    uncertainty: Optional[float] = Field(default=None, ge=0.0)
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    method: str
    n_or_evals: int = Field(ge=0)
    seed: Optional[int] = None
    target: Optional[float] = None
    passed: Optional[bool] = None
    detail: Optional[str] = None


class Report(BaseModel):
    command: str
    config: Dict[str, Any]
    results: List[ReportEntry]
    wall_time: Optional[float] = None

    def to_json(self) -> str:
        return self.model_dump_json(indent=2, exclude_none=False) + "\n"
