"""
Report and job models for the bounds analyzer.

Reports are the JSON source of truth: interval endpoints are serialised as
17-significant-digit strings (lossless for 64-bit floats, "inf"/"-inf" for
unbounded ends) and the text renderer formats from the same values.
"""

from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from shared.models.interval import Interval

REPORT_SCHEMA = "interval-egraph/report@1"


class StopReason(str, Enum):
    """Why equality saturation stopped."""
    SATURATED = "saturated"
    ITER_LIMIT = "iter_limit"
    NODE_LIMIT = "node_limit"
    TIME_LIMIT = "time_limit"


class WitnessSide(str, Enum):
    LOWER = "lower"
    UPPER = "upper"


def format_endpoint(value: float) -> str:
    return format(value, ".17g")


class Bounds(BaseModel):
    """Serialisable form of an Interval."""
    model_config = ConfigDict(frozen=True)

    lo: float = Field(..., description="Lower endpoint (may be -inf)")
    hi: float = Field(..., description="Upper endpoint (may be +inf)")

    @field_serializer("lo", "hi")
    def _serialize_endpoint(self, value: float) -> str:
        return format_endpoint(value)

    @classmethod
    def of(cls, interval: Interval) -> "Bounds":
        return cls(lo=interval.lo, hi=interval.hi)

    def to_interval(self) -> Interval:
        return Interval(self.lo, self.hi)

    def __str__(self) -> str:
        return f"[{format_endpoint(self.lo)}, {format_endpoint(self.hi)}]"


class WitnessReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    expression: str = Field(..., description="Witness term as an s-expression")
    interval: Bounds = Field(..., description="Natural extension of the witness itself")
    attains: bool = Field(..., description="Whether the witness reaches the class bound on its side")


class RunStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: int = Field(..., ge=0)
    classes: int = Field(..., ge=0)
    nodes: int = Field(..., ge=0)
    applications: int = Field(0, ge=0, description="Rule applications that changed the graph")
    wall_time: float = Field(..., ge=0, description="Seconds spent in the analysis")


class Report(BaseModel):
    """Outcome of one analysis, laid out like a row of a bounds table."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    schema_id: str = Field(REPORT_SCHEMA, alias="schema")
    expression: str
    domains: Dict[str, Bounds] = Field(default_factory=dict)
    initial: Bounds
    improved: Bounds
    width_change: Optional[float] = Field(
        None,
        description="(improved width - initial width) / initial width; null when the initial width is 0 or infinite",
    )
    witness_lo: WitnessReport
    witness_hi: WitnessReport
    stop_reason: StopReason
    rules_version: int = Field(0, ge=0)
    stats: RunStats

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True)

    @classmethod
    def from_json(cls, text: Union[str, bytes]) -> "Report":
        return cls.model_validate_json(text)

    @property
    def width_change_percent(self) -> Optional[int]:
        if self.width_change is None:
            return None
        return round(self.width_change * 100)


def width_change(initial: Interval, improved: Interval) -> Optional[float]:
    """Relative width change; None when the initial width is zero or infinite."""
    before = initial.width()
    if before == 0 or before == float("inf"):
        return None
    return (improved.width() - before) / before


Endpoint = Union[int, float, str]


class JobSpec(BaseModel):
    """One line of a batch job file."""
    model_config = ConfigDict(extra="forbid")

    expr: str = Field(..., description="Expression in s-expression syntax")
    vars: Dict[str, Tuple[Endpoint, Endpoint]] = Field(
        default_factory=dict, description="Variable name -> [lo, hi]; rationals may be written 'p/q'"
    )
    config: Dict[str, Any] = Field(default_factory=dict, description="RunConfig overrides")
    name: Optional[str] = Field(None, description="Label used in the summary table")

    @field_validator("vars")
    @classmethod
    def _check_names(cls, value: Dict[str, Tuple[Endpoint, Endpoint]]) -> Dict[str, Tuple[Endpoint, Endpoint]]:
        for name in value:
            if not name or not (name[0].isalpha() or name[0] == "_"):
                raise ValueError(f"invalid variable name '{name}'")
        return value

    def domain_texts(self) -> List[str]:
        """Bindings in the `name=lo:hi` form accepted by parse_domain."""
        return [f"{name}={lo}:{hi}" for name, (lo, hi) in self.vars.items()]
