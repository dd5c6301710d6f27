"""
Domain value types: operators, intervals, expressions and reports.
"""

from .operators import OpKind
from .interval import TOP, Interval, extend, point, round_outward, top
from .expression import (
    DomainEnv,
    Expr,
    compile_concrete,
    eval_concrete,
    eval_precise,
    natural_extension,
    parse,
    parse_domain,
    sample_range,
    size,
    to_sexpr,
    variables,
)
from .reports import Bounds, JobSpec, Report, RunStats, StopReason, WitnessReport, WitnessSide

__all__ = [
    "TOP",
    "Bounds",
    "DomainEnv",
    "Expr",
    "Interval",
    "JobSpec",
    "OpKind",
    "Report",
    "RunStats",
    "StopReason",
    "WitnessReport",
    "WitnessSide",
    "compile_concrete",
    "eval_concrete",
    "eval_precise",
    "extend",
    "natural_extension",
    "parse",
    "parse_domain",
    "point",
    "round_outward",
    "sample_range",
    "size",
    "to_sexpr",
    "top",
    "variables",
]
