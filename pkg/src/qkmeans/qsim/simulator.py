"""Exact statevector evaluation and resource counting."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .circuit import Circuit, CircuitError, Gate, StateVector


def _run(gates, width: int) -> np.ndarray:
    state = np.zeros(1 << width, dtype=np.complex128)
    state[0] = 1.0
    for gate in gates:
        state = _apply(state, width, gate)
    return state


def _apply(state: np.ndarray, width: int, gate: Gate) -> np.ndarray:
    if gate.kind == "CSWAP":
        return kernels.apply_cswap(state, width, *gate.qubits)
    if gate.kind == "INIT":
        amps = np.asarray(gate.params, dtype=np.complex128)
        return kernels.apply_init(state, width, np.asarray(gate.qubits), amps)
    m = gate.matrix()
    return kernels.apply_1q(state, width, gate.qubits[0], m[0, 0], m[0, 1], m[1, 0], m[1, 1])


def simulate(circuit: Circuit) -> StateVector:
    """Final state of ``circuit`` started from |0...0>."""
    return StateVector(_run(circuit.gates, circuit.width), circuit.width)


class _Components:
    """Union-find over qubits joined by multi-qubit gates."""

    def __init__(self, width: int):
        self.parent = list(range(width))

    def find(self, q: int) -> int:
        while self.parent[q] != q:
            self.parent[q] = self.parent[self.parent[q]]
            q = self.parent[q]
        return q

    def union(self, qubits) -> None:
        root = self.find(qubits[0])
        for q in qubits[1:]:
            self.parent[self.find(q)] = root

    def members(self, q: int, width: int) -> list[int]:
        root = self.find(q)
        return [p for p in range(width) if self.find(p) == root]


def component_of(circuit: Circuit, qubit: int, gates=None) -> list[int]:
    """Qubits connected to ``qubit`` through multi-qubit gates."""
    comps = _Components(circuit.width)
    for gate in circuit.gates if gates is None else gates:
        if gate.is_multi:
            comps.union(gate.qubits)
    return comps.members(qubit, circuit.width)


def _restricted(gates, qubits: list[int]):
    """Gates acting inside ``qubits``, relabelled to 0..len-1."""
    mapping = {q: i for i, q in enumerate(qubits)}
    inside = set(qubits)
    return [g.remapped(mapping) for g in gates if inside.issuperset(g.qubits)], mapping


def _swap_test_layout(circuit: Circuit, anc: int):
    """Locate the H / CSWAP* / H pattern on ``anc``.

    Returns (index of first H, list of swapped pairs) or None when the
    circuit around ``anc`` is not a plain swap test.
    """
    touching = [i for i, g in enumerate(circuit.gates) if anc in g.qubits]
    if len(touching) < 2:
        return None
    first, last = touching[0], touching[-1]
    gates = circuit.gates
    if gates[first] != Gate("H", (anc,)) or gates[last] != Gate("H", (anc,)):
        return None
    pairs = []
    for g in gates[first + 1:last]:
        if g.kind != "CSWAP" or g.qubits[0] != anc:
            return None
        pairs.append(g.qubits[1:])
    if not pairs:
        return None
    return first, pairs


def _swap_test_prob1(circuit: Circuit, anc: int, first: int, pairs) -> float:
    prep = circuit.gates[:first]
    comps = _Components(circuit.width)
    for gate in prep:
        if gate.is_multi:
            comps.union(gate.qubits)
    # swapped pairs fuse the prep components they connect
    for a, b in pairs:
        comps.union((a, b))
    roots = {}
    for a, b in pairs:
        roots.setdefault(comps.find(a), None)
    overlap = 1.0 + 0j
    for root in roots:
        qubits = [q for q in range(circuit.width) if comps.find(q) == root]
        sub, mapping = _restricted(prep, qubits)
        state = _run(sub, len(qubits))
        perm = list(range(len(qubits)))
        for a, b in pairs:
            if comps.find(a) == root:
                i, j = mapping[a], mapping[b]
                perm[i], perm[j] = perm[j], perm[i]
        overlap *= kernels.swap_overlap(state, len(qubits), np.asarray(perm))
    return 0.5 - 0.5 * overlap.real


def exact_prob1(circuit: Circuit, qubit: int | None = None) -> float:
    """Exact probability of reading 1 on a measured qubit.

    Swap tests are evaluated as 1/2 - Re<chi|S|chi>/2 on the prepared
    registers, so only the qubits the swaps touch are ever simulated.
    Anything else falls back to a dense run of the qubit's component.
    """
    anc = circuit.measured[0] if qubit is None else qubit
    if not 0 <= anc < circuit.width:
        raise CircuitError(f"qubit {anc} outside width {circuit.width}")
    layout = _swap_test_layout(circuit, anc)
    if layout is not None:
        p1 = _swap_test_prob1(circuit, anc, *layout)
    else:
        qubits = component_of(circuit, anc)
        sub, mapping = _restricted(circuit.gates, qubits)
        state = _run(sub, len(qubits))
        p1 = kernels.prob_one(state, len(qubits), mapping[anc])
    return min(1.0, max(0.0, p1))


def dense_prob1(circuit: Circuit, qubit: int | None = None) -> float:
    """Marginal from the full statevector; reference for :func:`exact_prob1`."""
    anc = circuit.measured[0] if qubit is None else qubit
    state = _run(circuit.gates, circuit.width)
    return kernels.prob_one(state, circuit.width, anc)


@dataclass(frozen=True)
class ResourceStats:
    width: int
    depth: int
    nonlocal_gates: int


def resources(circuit: Circuit) -> ResourceStats:
    """Width, greedy-layered depth and multi-qubit gate count."""
    free = [0] * circuit.width
    depth = 0
    nonlocal_gates = 0
    for gate in circuit.gates:
        layer = max(free[q] for q in gate.qubits) + 1
        for q in gate.qubits:
            free[q] = layer
        depth = max(depth, layer)
        if gate.is_multi:
            nonlocal_gates += 1
    return ResourceStats(circuit.width, depth, nonlocal_gates)
