"""Cycle covers of random graphs sampled from step-graphons.

Graphon model and catalog, edge-cone geometry and regime classification,
seeded samplers, exact 2-factor detection, and the sweep harness.
"""

from .cone import EdgeCone, Regime, classify_regime, cone_membership, facet_hyperplanes
from .cyclecover import brute_force_two_factor, has_cycle_cover
from .experiments import SweepConfig, empirical_probability, linear_fit, rate_report, run_sweep
from .graphon import SampledGraph, StepGraphon, catalog, load_graphon, parse_graphon, skeleton_graph
from .stochastic import estimate_p_star, sample_graph

__all__ = [
    "EdgeCone", "Regime", "SampledGraph", "StepGraphon", "SweepConfig", "brute_force_two_factor",
    "catalog", "classify_regime", "cone_membership", "empirical_probability", "estimate_p_star",
    "facet_hyperplanes", "has_cycle_cover", "linear_fit", "load_graphon", "parse_graphon",
    "rate_report", "run_sweep", "sample_graph", "skeleton_graph",
]
