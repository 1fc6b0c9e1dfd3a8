"""Energy landscape of the two-memory Hebbian Kuramoto model with second-order coupling.

Closed-form Jacobian spectra and Morse indices at binary and memory-compatible
ternary critical points, a cyclic-Jacobi numeric oracle, an RK4 gradient-flow
integrator, an exhaustive census of {0, pi/2, pi}^N and the saddle transition graph.
"""
from .dynamics import (IntegrationConfig, Outcome, integrate, retrieve, unstable_manifold,
                       unstable_manifolds)
from .errors import (BoundaryCase, ConfigError, LandscapeError, OracleDisagreement,
                     OutsideTheoremRange)
from .landscape import Census, TransitionGraph, census, shift_equivalence_scan, transition_graph
from .model import ModelConfig, energy, jacobian, velocity
from .patterns import BinaryPattern, MemoryPair, TernaryPoint, to_phase
from .spectra import (binary_spectrum_analytic, morse_index_binary, morse_index_ternary,
                      ternary_spectrum_analytic)

__version__ = "0.1.0"

__all__ = [
    "BinaryPattern", "BoundaryCase", "Census", "ConfigError", "IntegrationConfig",
    "LandscapeError", "MemoryPair", "ModelConfig", "OracleDisagreement", "Outcome",
    "OutsideTheoremRange", "TernaryPoint", "TransitionGraph", "binary_spectrum_analytic",
    "census", "energy", "integrate", "jacobian", "morse_index_binary", "morse_index_ternary",
    "retrieve", "shift_equivalence_scan", "ternary_spectrum_analytic", "to_phase",
    "transition_graph", "unstable_manifold", "unstable_manifolds", "velocity",
]
