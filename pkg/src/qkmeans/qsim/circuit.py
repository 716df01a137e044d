"""Gates, circuits and statevectors."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

SINGLE_QUBIT_KINDS = ("H", "X", "U")
NORM_TOL = 1e-9


class CircuitError(ValueError):
    """Raised for malformed gates or circuits."""


@dataclass(frozen=True)
class Gate:
    """One operation. ``params`` holds (theta, gamma) for U and the
    amplitudes for AmplitudeInit; it is empty otherwise."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in ("H", "X", "U", "CSWAP", "INIT"):
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} acts on repeated qubits {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        if self.kind == "INIT":
            if len(self.params) != 1 << len(self.qubits):
                raise CircuitError(
                    f"AmplitudeInit on {len(self.qubits)} qubits needs "
                    f"{1 << len(self.qubits)} amplitudes, got {len(self.params)}"
                )
            norm = float(np.sqrt(sum(abs(a) ** 2 for a in self.params)))
            if abs(norm - 1.0) > NORM_TOL:
                raise CircuitError(f"AmplitudeInit amplitudes have norm {norm}, expected 1")

    @property
    def is_multi(self) -> bool:
        return len(self.qubits) > 1

    def matrix(self) -> np.ndarray:
        """2x2 unitary of a single-qubit gate."""
        if self.kind == "H":
            return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        if self.kind == "X":
            return np.array([[0, 1], [1, 0]], dtype=complex)
        if self.kind == "U":
            return u_matrix(*self.params)
        raise CircuitError(f"{self.kind} is not a single-qubit gate")

    def shifted(self, offset: int) -> Gate:
        return Gate(self.kind, tuple(q + offset for q in self.qubits), self.params)

    def remapped(self, mapping: dict[int, int]) -> Gate:
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.params)


def u_matrix(theta: float, gamma: float) -> np.ndarray:
    """Two-parameter rotation used by the dense angle embedding."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    phase = np.exp(1j * gamma)
    return np.array([[c, -s], [phase * s, phase * c]], dtype=complex)


def H(q: int) -> Gate:
    return Gate("H", (q,))


def X(q: int) -> Gate:
    return Gate("X", (q,))


def U(q: int, theta: float, gamma: float) -> Gate:
    return Gate("U", (q,), (float(theta), float(gamma)))


def CSWAP(control: int, target1: int, target2: int) -> Gate:
    return Gate("CSWAP", (control, target1, target2))


def AmplitudeInit(qubits: Sequence[int], amplitudes: Sequence[complex]) -> Gate:
    """Prepare ``amplitudes`` on fresh ``qubits``; ``qubits[0]`` is the most
    significant bit of the amplitude index."""
    return Gate("INIT", tuple(int(q) for q in qubits), tuple(complex(a) for a in amplitudes))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``width`` qubits, all starting in |0>.

    ``measured`` lists the ancilla qubits that are read out. Plain swap-test
    circuits measure exactly one; packed circuits measure one per block.
    ``tags`` carries one routing label per measured qubit.
    """

    width: int
    gates: tuple[Gate, ...]
    measured: tuple[int, ...]
    tags: tuple[Any, ...] = field(default=())

    def __post_init__(self):
        if isinstance(self.measured, (int, np.integer)):
            object.__setattr__(self, "measured", (int(self.measured),))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measured", tuple(self.measured))
        if not self.tags:
            object.__setattr__(self, "tags", (None,) * len(self.measured))
        else:
            object.__setattr__(self, "tags", tuple(self.tags))
        self.validate()

    def validate(self):
        if self.width < 1:
            raise CircuitError("circuit width must be at least 1")
        if not self.measured:
            raise CircuitError("circuit must measure at least one qubit")
        if len(set(self.measured)) != len(self.measured):
            raise CircuitError(f"measured qubits repeat: {self.measured}")
        if len(self.tags) != len(self.measured):
            raise CircuitError("need exactly one tag per measured qubit")
        for q in self.measured:
            if not 0 <= q < self.width:
                raise CircuitError(f"measured qubit {q} outside width {self.width}")
        touched = set()
        for gate in self.gates:
            for q in gate.qubits:
                if q >= self.width:
                    raise CircuitError(
                        f"{gate.kind} on qubit {q} outside width {self.width}"
                    )
            if gate.kind == "INIT" and touched.intersection(gate.qubits):
                raise CircuitError(
                    f"AmplitudeInit on qubits {sorted(touched.intersection(gate.qubits))} "
                    "that earlier gates already touched"
                )
            touched.update(gate.qubits)

    @property
    def tag(self):
        return self.tags[0]


@dataclass
class StateVector:
    amplitudes: np.ndarray
    width: int

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __len__(self):
        return len(self.amplitudes)
