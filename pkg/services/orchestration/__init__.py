"""
Analysis orchestration.

Key Components:
- saturate: equality saturation loop with iteration, node and time limits
- WitnessExtractor: per-side witness terms for a class interval
- BoundsAnalyzer / analyze: the end-to-end pipeline producing a Report
"""

from .saturation import IterationRecord, RunConfig, SaturationResult, saturate
from .extraction import Witness, WitnessExtractor, extract_witness, extract_witnesses
from .analyzer import Analysis, BoundsAnalyzer, analyze

__all__ = [
    "Analysis",
    "BoundsAnalyzer",
    "IterationRecord",
    "RunConfig",
    "SaturationResult",
    "Witness",
    "WitnessExtractor",
    "analyze",
    "extract_witness",
    "extract_witnesses",
    "saturate",
]
