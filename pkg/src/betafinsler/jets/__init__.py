"""Truncated Taylor jets in (x, y) and an independent finite-difference oracle."""
from .jet import Jet, lift, lift_x, reciprocal, sqrt, variables
from .kernels import BACKEND
from .space import JetSpace, jet_space

__all__ = ["BACKEND", "Jet", "JetSpace", "jet_space", "lift", "lift_x", "reciprocal",
           "sqrt", "variables"]
