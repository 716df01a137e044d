"""Shot sampling under a simple analytic noise channel, and readout mitigation.

Only the measured ancilla marginal is ever needed, so noise acts directly on
that probability instead of on a density matrix:

* gate noise mixes the marginal toward 1/2 with total weight
  ``1 - (1 - lambda1)**n1 * (1 - lambda2)**n_cswap``, counting only gates in
  the ancilla's connected component;
* readout flips 0->1 with ``p01`` and 1->0 with ``p10``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circuit import SINGLE_QUBIT_KINDS, Circuit
from .simulator import component_of, exact_prob1


@dataclass(frozen=True)
class NoiseModel:
    p01: float = 0.0
    p10: float = 0.0
    lambda1: float = 0.0
    lambda2: float = 0.0

    def __post_init__(self):
        for name in ("p01", "p10", "lambda1", "lambda2"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"noise parameter {name}={value} outside [0, 1]")

    @property
    def is_ideal(self) -> bool:
        return self.p01 == self.p10 == self.lambda1 == self.lambda2 == 0.0


IDEAL = NoiseModel()


@dataclass(frozen=True)
class ShotCounts:
    zeros: int
    ones: int
    shots: int

    def __post_init__(self):
        if self.zeros + self.ones != self.shots:
            raise ValueError("zeros + ones must equal shots")

    @property
    def p1(self) -> float:
        return self.ones / self.shots

    @property
    def p0(self) -> float:
        return self.zeros / self.shots


def depolarizing_weight(circuit: Circuit, qubit: int, noise: NoiseModel) -> float:
    """Total mixing weight for the measured ``qubit``."""
    if noise.lambda1 == 0.0 and noise.lambda2 == 0.0:
        return 0.0
    comp = set(component_of(circuit, qubit))
    n1 = n2 = 0
    for gate in circuit.gates:
        if not comp.issuperset(gate.qubits):
            continue
        if gate.kind in SINGLE_QUBIT_KINDS:
            n1 += 1
        elif gate.kind == "CSWAP":
            n2 += 1
    return 1.0 - (1.0 - noise.lambda1) ** n1 * (1.0 - noise.lambda2) ** n2


def noisy_prob1(p1: float, weight: float, noise: NoiseModel) -> float:
    """Apply gate mixing then readout flips to an exact marginal."""
    mixed = (1.0 - weight) * p1 + weight / 2.0
    return mixed * (1.0 - noise.p10) + (1.0 - mixed) * noise.p01


def observed_prob1(circuit: Circuit, noise: NoiseModel = IDEAL, qubit: int | None = None,
                   p1: float | None = None) -> float:
    """Probability that one shot reads 1 on ``qubit`` under ``noise``."""
    anc = circuit.measured[0] if qubit is None else qubit
    if p1 is None:
        p1 = exact_prob1(circuit, anc)
    return noisy_prob1(p1, depolarizing_weight(circuit, anc, noise), noise)


def sample_each(circuit: Circuit, shots: int, noise: NoiseModel = IDEAL,
                rng: np.random.Generator | int = 0, exact=None) -> list[ShotCounts]:
    """One :class:`ShotCounts` per measured qubit, in ``circuit.measured`` order.

    ``exact`` optionally supplies precomputed noiseless marginals.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    out = []
    for i, anc in enumerate(circuit.measured):
        p1 = None if exact is None else exact[i]
        q = observed_prob1(circuit, noise, anc, p1)
        ones = int(rng.binomial(shots, min(1.0, max(0.0, q))))
        out.append(ShotCounts(shots - ones, ones, shots))
    return out


def sample(circuit: Circuit, shots: int, noise: NoiseModel = IDEAL, seed: int = 0) -> ShotCounts:
    """Sample the first measured qubit ``shots`` times; reproducible per seed."""
    return sample_each(circuit, shots, noise, np.random.default_rng(seed))[0]


def invert_readout(observed_p1: float, p01: float, p10: float) -> float:
    """Undo readout flips on a Pr(1) value (unclamped)."""
    if p01 + p10 >= 1.0:
        raise ValueError(f"singular readout calibration: p01 + p10 = {p01 + p10} >= 1")
    return (observed_p1 - p01) / (1.0 - p01 - p10)


def mitigate_readout(counts: ShotCounts, p01: float, p10: float) -> float:
    """Corrected Pr(1) from raw counts, clamped to [0, 1]."""
    return min(1.0, max(0.0, invert_readout(counts.ones / counts.shots, p01, p10)))
