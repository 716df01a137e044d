"""Swap-test distance estimation.

Amplitude embedding recovers ``|a - b|^2 = 4 Z (Pr(0) - 1/2)``; angle
embedding uses ``d = sqrt(Z Pr(1))``. The subspace estimator splits both
vectors into equal blocks, estimates each block independently with its own
Z, and sums the block distances. Small block circuits can be packed side by
side into one wide circuit.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, replace

import numpy as np

from .backend import BackendProfile, CircuitTooWide, submit_batch, submit_parallel
from .embed import (
    EMBEDDINGS,
    EmbeddingError,
    VectorPair,
    amplitude_pair_states,
    angle_product_params,
    padded_length,
)
from .qsim import (
    CSWAP,
    AmplitudeInit,
    Circuit,
    H,
    NoiseModel,
    U,
    exact_prob1,
    mitigate_readout,
)

MODES = ("analytic", "sampled")


@dataclass(frozen=True)
class DistanceEstimate:
    distance: float
    sq_distance: float
    p0: float
    p1: float
    Z: float
    shots: int
    repetitions: int


@dataclass(frozen=True)
class EstimatorConfig:
    """How distances are estimated.

    ``block_size`` is ``"full"`` for the whole-vector estimator or an even
    block length for the subspace estimator. ``noise`` overrides the
    backend profile's noise model when set. ``workers`` selects the
    one-request-per-circuit submission path.
    """

    embedding: str = "amplitude"
    mode: str = "analytic"
    shots: int = 8192
    repetitions: int = 1
    block_size: int | str = "full"
    noise: NoiseModel | None = None
    mitigate: bool = False
    pack: bool = True
    workers: int | None = None

    def __post_init__(self):
        if self.embedding not in EMBEDDINGS:
            raise ValueError(f"unknown embedding {self.embedding!r}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.mode == "sampled" and self.shots < 1:
            raise ValueError("shots must be >= 1 in sampled mode")
        if self.block_size != "full":
            if not isinstance(self.block_size, (int, np.integer)) or self.block_size < 2 \
                    or self.block_size % 2:
                raise ValueError(f"block_size must be 'full' or an even int >= 2, "
                                 f"got {self.block_size!r}")
        if self.workers is not None and self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def is_subspace(self) -> bool:
        return self.block_size != "full"


def build_swap_test(pair: VectorPair, embedding: str, tag=None) -> Circuit:
    """Embed ``pair`` and append the swap test on a trailing ancilla."""
    if embedding == "amplitude":
        psi, phi, _ = amplitude_pair_states(pair)
        m = padded_length(pair.dim).bit_length() - 1
        index, phi_q, anc = m, m + 1, m + 2
        # the index qubit sits last in the psi register and is the one swapped
        gates = [
            AmplitudeInit([index, *range(m)], psi),
            AmplitudeInit([phi_q], phi),
            H(anc),
            CSWAP(anc, index, phi_q),
            H(anc),
        ]
        return Circuit(m + 3, gates, anc, (tag,))
    if embedding == "angle":
        params_a, params_b, _ = angle_product_params(pair)
        m = len(params_a)
        anc = 2 * m
        gates = [U(i, *p) for i, p in enumerate(params_a)]
        gates += [U(m + i, *p) for i, p in enumerate(params_b)]
        gates.append(H(anc))
        gates += [CSWAP(anc, m - 1 - i, 2 * m - 1 - i) for i in range(m)]
        gates.append(H(anc))
        return Circuit(2 * m + 1, gates, anc, (tag,))
    raise EmbeddingError(f"unknown embedding {embedding!r}")


def amp_sq_distance(p0: float, Z: float) -> float:
    return max(0.0, 4.0 * Z * (p0 - 0.5))


def angle_distance(p1: float, Z: float) -> float:
    return math.sqrt(max(0.0, Z * p1))


def recover(embedding: str, p1: float, Z: float) -> tuple[float, float]:
    """(distance, sq_distance) from an ancilla Pr(1)."""
    if embedding == "amplitude":
        sq = amp_sq_distance(1.0 - p1, Z)
        return math.sqrt(sq), sq
    d = angle_distance(p1, Z)
    return d, d * d


def pack_blocks(block_circuits, profile: BackendProfile) -> list[Circuit]:
    """Place consecutive circuits on disjoint qubit ranges of wider circuits.

    Each packed circuit keeps every block's ancilla measured and its tag, in
    block order, so results route back per block.
    """
    packed, group, used = [], [], 0
    for i, c in enumerate(block_circuits):
        if c.width > profile.qubits:
            raise CircuitTooWide(
                f"block {i} uses {c.width} qubits, exceeds qubits={profile.qubits} "
                f"on {profile.name!r}"
            )
        if used + c.width > profile.qubits:
            packed.append(_concat(group))
            group, used = [], 0
        group.append(c)
        used += c.width
    if group:
        packed.append(_concat(group))
    return packed


def _concat(circuits: list[Circuit]) -> Circuit:
    if len(circuits) == 1:
        return circuits[0]
    gates, measured, tags, offset = [], [], [], 0
    for c in circuits:
        gates += [g.shifted(offset) for g in c.gates]
        measured += [q + offset for q in c.measured]
        tags += list(c.tags)
        offset += c.width
    return Circuit(offset, gates, measured, tags)


def job_seed(seed: int, *keys: int) -> int:
    """Independent 63-bit seed derived from ``seed`` and integer keys."""
    state = np.random.SeedSequence(entropy=seed, spawn_key=tuple(keys)).generate_state(2)
    return int((int(state[0]) << 31) ^ int(state[1]))


def _blocks(pair: VectorPair, block_size):
    if block_size == "full":
        return [pair]
    n = -(-pair.dim // block_size) * block_size
    p = pair.padded(n)
    return [VectorPair(p.a[i:i + block_size], p.b[i:i + block_size])
            for i in range(0, n, block_size)]


def _execute(units, cfg: EstimatorConfig, profile: BackendProfile | None, seed: int):
    """Map each unit tag to its observed (or exact) Pr(1)."""
    circuits = [c for _, c in units]
    if cfg.is_subspace and cfg.pack and profile is not None:
        circuits = pack_blocks(circuits, profile)
    elif profile is not None:
        for i, c in enumerate(circuits):
            profile.check_width(c, i)
    p1 = {}
    if cfg.mode == "analytic":
        for c in circuits:
            for tag, q in zip(c.tags, c.measured):
                p1[tag] = exact_prob1(c, q)
        return p1
    if profile is None:
        raise ValueError("sampled mode needs a backend profile")
    noise = cfg.noise if cfg.noise is not None else profile.noise
    batch = profile.max_circuits_per_job
    for b, start in enumerate(range(0, len(circuits), batch)):
        chunk = circuits[start:start + batch]
        s = job_seed(seed, b)
        if cfg.workers:
            result = submit_parallel(chunk, cfg.shots, profile, cfg.workers, s, noise)
        else:
            result = submit_batch(chunk, cfg.shots, profile, s, noise)
        for c, records in zip(chunk, result.counts):
            for tag, counts in zip(c.tags, records):
                if cfg.mitigate:
                    p1[tag] = mitigate_readout(counts, noise.p01, noise.p10)
                else:
                    p1[tag] = counts.p1
    return p1


def estimate_many(pairs, cfg: EstimatorConfig, profile: BackendProfile | None = None,
                  seed: int = 0) -> list[DistanceEstimate]:
    """Estimate every pair in one pass; sampled circuits share as few jobs as
    the profile allows.

    Repetitions are averaged per block before blocks are summed: squared
    distances for amplitude embedding, plain distances for angle embedding.
    """
    pairs = list(pairs)
    reps = cfg.repetitions if cfg.mode == "sampled" else 1
    units = []
    block_z = {}
    for i, pair in enumerate(pairs):
        for j, block in enumerate(_blocks(pair, cfg.block_size)):
            Z = float(block.a @ block.a + block.b @ block.b)
            if Z == 0.0:
                if not cfg.is_subspace:
                    raise EmbeddingError(f"pair {i}: both vectors are zero (Z = 0)")
                continue
            block_z[i, j] = Z
            circuit = build_swap_test(block, cfg.embedding)
            for r in range(reps):
                units.append(((i, j, r), replace(circuit, tags=((i, j, r),))))
    p1 = _execute(units, cfg, profile, seed)

    per_block = defaultdict(list)
    for (i, j, r), value in sorted(p1.items()):
        per_block[i, j].append(value)
    shots = cfg.shots if cfg.mode == "sampled" else 0
    out = []
    for i, pair in enumerate(pairs):
        total_d, total_sq, total_z, p1s = 0.0, 0.0, 0.0, []
        for j in range(len(_blocks(pair, cfg.block_size))):
            if (i, j) not in block_z:
                continue
            Z = block_z[i, j]
            values = per_block[i, j]
            recovered = [recover(cfg.embedding, v, Z) for v in values]
            if cfg.embedding == "amplitude":
                sq = float(np.mean([s for _, s in recovered]))
                d = math.sqrt(sq)
            else:
                d = float(np.mean([dd for dd, _ in recovered]))
                sq = d * d
            total_d += d
            total_sq = sq
            total_z += Z
            p1s.append(float(np.mean(values)))
        if cfg.is_subspace:
            total_sq = total_d * total_d
        mean_p1 = float(np.mean(p1s)) if p1s else 0.0
        out.append(DistanceEstimate(total_d, total_sq, 1.0 - mean_p1, mean_p1,
                                    total_z, shots, reps))
    return out


def estimate(pair: VectorPair, cfg: EstimatorConfig, profile: BackendProfile | None = None,
             seed: int = 0) -> DistanceEstimate:
    """Whole-vector estimate of one pair (``cfg.block_size`` is ignored)."""
    return estimate_many([pair], replace(cfg, block_size="full"), profile, seed)[0]


def subspace_distance(pair: VectorPair, cfg: EstimatorConfig,
                      profile: BackendProfile | None = None, seed: int = 0) -> DistanceEstimate:
    """Sum of independent block estimates; blocks default to 2 components."""
    if not cfg.is_subspace:
        cfg = replace(cfg, block_size=2)
    return estimate_many([pair], cfg, profile, seed)[0]


def distance_matrix(points, centroids, cfg: EstimatorConfig,
                    profile: BackendProfile | None = None, seed: int = 0) -> np.ndarray:
    """Point-by-centroid matrix of the quantity used for assignment.

    Squared distances for whole-vector amplitude estimates, plain distances
    otherwise; both order candidates the same way.
    """
    points = np.asarray(points, dtype=float)
    centroids = np.asarray(centroids, dtype=float)
    pairs = [VectorPair(p, c) for p in points for c in centroids]
    estimates = estimate_many(pairs, cfg, profile, seed)
    use_sq = cfg.embedding == "amplitude" and not cfg.is_subspace
    values = [e.sq_distance if use_sq else e.distance for e in estimates]
    return np.array(values, dtype=float).reshape(len(points), len(centroids))


__all__ = [
    "DistanceEstimate", "EstimatorConfig", "amp_sq_distance", "angle_distance",
    "build_swap_test", "distance_matrix", "estimate", "estimate_many", "job_seed",
    "pack_blocks", "recover", "subspace_distance",
]
