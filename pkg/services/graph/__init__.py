"""
E-graph service.

Key Components:
- EGraph: hashconsed e-nodes, union-find classes, deferred congruence rebuild
- IntervalAnalysis: per-class intervals maintained by make / meet / propagate
- to_dot: Graphviz export for debugging
"""

from .egraph import ClassId, EClass, EGraph, ENode, UnionFind
from .analysis import IntervalAnalysis, merge_data, propagate
from .dot import to_dot

__all__ = [
    "ClassId",
    "EClass",
    "EGraph",
    "ENode",
    "IntervalAnalysis",
    "UnionFind",
    "merge_data",
    "propagate",
    "to_dot",
]
