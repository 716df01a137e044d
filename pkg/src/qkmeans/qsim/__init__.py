"""Minimal statevector simulator for swap-test circuits."""
from .circuit import (
    CSWAP,
    AmplitudeInit,
    Circuit,
    CircuitError,
    Gate,
    H,
    StateVector,
    U,
    X,
    u_matrix,
)
from .kernels import BACKEND
from .noise import (
    IDEAL,
    NoiseModel,
    invert_readout,
    ShotCounts,
    mitigate_readout,
    observed_prob1,
    sample,
    sample_each,
)
from .simulator import ResourceStats, dense_prob1, exact_prob1, resources, simulate

__all__ = [
    "AmplitudeInit", "BACKEND", "CSWAP", "Circuit", "CircuitError", "Gate", "H",
    "IDEAL", "NoiseModel", "ResourceStats", "ShotCounts", "StateVector", "U", "X",
    "dense_prob1", "exact_prob1", "invert_readout", "mitigate_readout", "observed_prob1", "resources",
    "sample", "sample_each", "simulate", "u_matrix",
]
