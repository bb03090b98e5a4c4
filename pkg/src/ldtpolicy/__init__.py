"""Minimal-depth linear decision tree policies for integer linear programs
over small explicit feasible sets."""

from .core import CostDomain, FeasibleSet, Sign
from .fan import NormalFan, build_fan
from .feasibility import FeasibilityOracle
from .instances import make_instance
from .policy import LdtPolicy
from .synth import SynthConfig, synthesize, synthesize_greedy

__all__ = ["CostDomain", "FeasibleSet", "Sign", "NormalFan", "build_fan",
           "FeasibilityOracle", "make_instance", "LdtPolicy", "SynthConfig",
           "synthesize", "synthesize_greedy"]
