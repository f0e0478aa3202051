"""Exact separation over the unsplittable flow arc-set polyhedron."""

from .arcset import (ArcSetInstance, CutInequality, FracPoint, InstanceError, Provenance,
                     SeparationOutcome, Verdict, format_cut, load_instance, parse_cut)
from .separator import separate

__all__ = ["ArcSetInstance", "CutInequality", "FracPoint", "InstanceError", "Provenance",
           "SeparationOutcome", "Verdict", "format_cut", "load_instance", "parse_cut", "separate"]
