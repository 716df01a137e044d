"""Classical vector pairs to swap-test input states.

Two embeddings are supported:

``amplitude``
    psi = (|0>|a^> + |1>|b^>)/sqrt(2) over one index qubit plus
    ceil(log2 n) data qubits, and phi = (|a||0> - |b||1>)/sqrt(Z) on one
    qubit, with Z = |a|^2 + |b|^2.
``angle``
    Both vectors are scaled by 1/sqrt(Z), mapped to [0, pi] and written two
    components per qubit through U(theta, gamma).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EMBEDDINGS = ("amplitude", "angle")


class EmbeddingError(ValueError):
    pass


@dataclass(frozen=True)
class VectorPair:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(-1)
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if a.shape != b.shape:
            raise EmbeddingError(f"vector lengths differ: {a.size} vs {b.size}")
        if a.size == 0:
            raise EmbeddingError("empty vectors")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.a.size

    def padded(self, size: int) -> VectorPair:
        """Both vectors zero-padded to ``size`` components."""
        if size < self.dim:
            raise EmbeddingError(f"cannot pad {self.dim} components down to {size}")
        extra = size - self.dim
        return VectorPair(np.pad(self.a, (0, extra)), np.pad(self.b, (0, extra)))


@dataclass(frozen=True)
class NormalizedPair:
    a_n: np.ndarray
    b_n: np.ndarray
    Z: float


def _check_embedding(embedding: str) -> None:
    if embedding not in EMBEDDINGS:
        raise EmbeddingError(f"unknown embedding {embedding!r}; use one of {EMBEDDINGS}")


def normalize_pair(pair: VectorPair) -> NormalizedPair:
    Z = float(pair.a @ pair.a + pair.b @ pair.b)
    if Z <= 0.0:
        raise EmbeddingError("both vectors are zero (Z = 0)")
    root = math.sqrt(Z)
    return NormalizedPair(pair.a / root, pair.b / root, Z)


def angle_map(v) -> np.ndarray:
    """Map components in [-1, 1] to [0, pi]."""
    v = np.asarray(v, dtype=float)
    if np.any(np.abs(v) > 1.0 + 1e-9):
        raise EmbeddingError(f"angle_map input outside [-1, 1]: max |v| = {np.abs(v).max()}")
    return np.pi / 2 * (np.clip(v, -1.0, 1.0) + 1.0)


def padded_length(n: int) -> int:
    """Next power of two >= n (at least 2)."""
    return max(2, 1 << (n - 1).bit_length())


def _unit(v: np.ndarray) -> np.ndarray:
    scale = np.max(np.abs(v))
    if scale == 0.0:
        # zero vector: any ket works since phi gives it weight 0
        e = np.zeros_like(v)
        e[0] = 1.0
        return e
    v = v / scale  # keeps tiny vectors out of the subnormal range
    return v / np.linalg.norm(v)


def amplitude_pair_states(pair: VectorPair) -> tuple[np.ndarray, np.ndarray, float]:
    """Return (psi, phi, Z); psi has the index qubit as its leading bit."""
    Z = normalize_pair(pair).Z
    p = pair.padded(padded_length(pair.dim))
    psi = np.concatenate([_unit(p.a), _unit(p.b)]) / math.sqrt(2.0)
    phi = np.array([np.linalg.norm(p.a), -np.linalg.norm(p.b)]) / math.sqrt(Z)
    return psi, phi, Z


def angle_product_params(pair: VectorPair) -> tuple[list, list, float]:
    """(theta, gamma) per qubit for each vector, plus Z."""
    if pair.dim % 2:
        pair = pair.padded(pair.dim + 1)
    norm = normalize_pair(pair)
    a_angles = angle_map(norm.a_n)
    b_angles = angle_map(norm.b_n)
    params_a = [(float(a_angles[i]), float(a_angles[i + 1])) for i in range(0, pair.dim, 2)]
    params_b = [(float(b_angles[i]), float(b_angles[i + 1])) for i in range(0, pair.dim, 2)]
    return params_a, params_b, norm.Z


def angle_product_state(params) -> np.ndarray:
    """Dense product state prod_i U(theta_i, gamma_i)|0>."""
    state = np.ones(1, dtype=complex)
    for theta, gamma in params:
        qubit = np.array([np.cos(theta / 2), np.exp(1j * gamma) * np.sin(theta / 2)])
        state = np.kron(state, qubit)
    return state


def circuit_width(n: int, embedding: str) -> int:
    """Qubits used by the full swap-test circuit for ``n``-dimensional data.

    Amplitude: index qubit + ceil(log2 n) data qubits + phi qubit + ancilla.
    Angle: ceil(n/2) qubits per vector + ancilla.
    """
    _check_embedding(embedding)
    if n < 2:
        raise EmbeddingError(f"dimension must be >= 2, got {n}")
    if embedding == "amplitude":
        return (padded_length(n).bit_length() - 1) + 3
    return 2 * math.ceil(n / 2) + 1
