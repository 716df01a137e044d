"""Emulated cloud execution: device profiles, batched and per-circuit jobs.

Every circuit draws its shots from a generator seeded by (job seed, circuit
index), so the batched path and the multi-worker path return identical
counts whatever the number of workers.
"""
from __future__ import annotations

import configparser
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .qsim import Circuit, NoiseModel, ShotCounts, exact_prob1, sample_each


class BackendError(RuntimeError):
    """A job violated a device limit."""


class TooManyCircuits(BackendError):
    pass


class TooManyShots(BackendError):
    pass


class CircuitTooWide(BackendError):
    pass


@dataclass(frozen=True)
class BackendProfile:
    name: str
    qubits: int
    max_shots: int
    max_circuits_per_job: int
    noise: NoiseModel = field(default_factory=NoiseModel)
    queue_delay: float = 0.0

    def __post_init__(self):
        if self.qubits < 3:
            raise ValueError(f"profile {self.name!r}: qubits must be >= 3")
        if self.max_shots < 1 or self.max_circuits_per_job < 1:
            raise ValueError(f"profile {self.name!r}: limits must be >= 1")

    def check_shots(self, shots: int) -> None:
        if shots < 1:
            raise ValueError(f"shots must be >= 1, got {shots}")
        if shots > self.max_shots:
            raise TooManyShots(
                f"{shots} shots exceeds max_shots={self.max_shots} on {self.name!r}"
            )

    def check_width(self, circuit: Circuit, index: int = 0) -> None:
        if circuit.width > self.qubits:
            raise CircuitTooWide(
                f"circuit {index} uses {circuit.width} qubits, "
                f"exceeds qubits={self.qubits} on {self.name!r}"
            )

    def check_count(self, n: int) -> None:
        if n > self.max_circuits_per_job:
            raise TooManyCircuits(
                f"{n} circuits exceeds max_circuits_per_job="
                f"{self.max_circuits_per_job} on {self.name!r}"
            )


@dataclass
class JobResult:
    """``counts[i][j]`` is the record for measured qubit ``j`` of circuit ``i``."""

    counts: list[list[ShotCounts]]
    shots: int
    profile: str
    wall_time: float
    queue_delay: float = 0.0
    tags: list = field(default_factory=list)

    def __len__(self):
        return len(self.counts)

    def single(self) -> list[ShotCounts]:
        """First record of every circuit; for jobs of single-ancilla circuits."""
        return [c[0] for c in self.counts]


def circuit_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


class _ExactCache:
    def __init__(self):
        self._store = {}

    def __call__(self, circuit: Circuit) -> list[float]:
        try:
            return self._store[circuit]
        except KeyError:
            value = [exact_prob1(circuit, q) for q in circuit.measured]
            self._store[circuit] = value
            return value


def _run_one(circuit, index, shots, noise, seed, cache) -> list[ShotCounts]:
    return sample_each(circuit, shots, noise, circuit_rng(seed, index), exact=cache(circuit))


def submit_batch(circuits, shots: int, profile: BackendProfile, seed: int = 0,
                 noise: NoiseModel | None = None, sleep: bool = False) -> JobResult:
    """Run all ``circuits`` as one job; results come back in submission order."""
    circuits = list(circuits)
    profile.check_count(len(circuits))
    profile.check_shots(shots)
    for i, c in enumerate(circuits):
        profile.check_width(c, i)
    noise = profile.noise if noise is None else noise
    start = time.perf_counter()
    if sleep and profile.queue_delay:
        time.sleep(profile.queue_delay)
    cache = _ExactCache()
    counts = [_run_one(c, i, shots, noise, seed, cache) for i, c in enumerate(circuits)]
    return JobResult(counts, shots, profile.name, time.perf_counter() - start,
                     profile.queue_delay, [c.tags for c in circuits])


def submit_parallel(circuits, shots: int, profile: BackendProfile, workers: int = 4,
                    seed: int = 0, noise: NoiseModel | None = None,
                    sleep: bool = False) -> JobResult:
    """One request per circuit from a pool of ``workers``; results re-sorted by index."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    circuits = list(circuits)
    profile.check_shots(shots)
    for i, c in enumerate(circuits):
        profile.check_width(c, i)
    noise = profile.noise if noise is None else noise
    cache = _ExactCache()

    def request(index):
        if sleep and profile.queue_delay:
            time.sleep(profile.queue_delay)
        return index, _run_one(circuits[index], index, shots, noise, seed, cache)

    start = time.perf_counter()
    if workers == 1:
        done = [request(i) for i in range(len(circuits))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(request, range(len(circuits))))
    done.sort(key=lambda item: item[0])
    return JobResult([r for _, r in done], shots, profile.name,
                     time.perf_counter() - start, profile.queue_delay,
                     [c.tags for c in circuits])


def builtin_profiles() -> list[BackendProfile]:
    """Emulated devices.

    ``ideal`` is noiseless and effectively unlimited. ``cap8192`` is a
    27-qubit device capped at 8192 shots; ``seven-qubit`` allows 32000 shots
    but only 7 qubits. Both noisy profiles accept 900 circuits per job.
    """
    return [
        BackendProfile("ideal", 32, 10**9, 10**6, NoiseModel()),
        BackendProfile("cap8192", 27, 8192, 900,
                       NoiseModel(p01=0.02, p10=0.04, lambda1=0.001, lambda2=0.02),
                       queue_delay=5.0),
        BackendProfile("seven-qubit", 7, 32000, 900,
                       NoiseModel(p01=0.015, p10=0.03, lambda1=0.0005, lambda2=0.01),
                       queue_delay=2.0),
    ]


def load_profiles(path) -> list[BackendProfile]:
    """Read profiles from an INI file, one section per profile.

    Keys: qubits, max_shots, max_circuits_per_job, p01, p10, lambda1,
    lambda2, queue_delay. The section name is the profile name unless a
    ``name`` key overrides it.
    """
    parser = configparser.ConfigParser()
    text = Path(path).read_text(encoding="utf-8")
    parser.read_string(text, source=str(path))
    profiles = []
    for section in parser.sections():
        s = parser[section]
        try:
            noise = NoiseModel(
                p01=s.getfloat("p01", 0.0),
                p10=s.getfloat("p10", 0.0),
                lambda1=s.getfloat("lambda1", 0.0),
                lambda2=s.getfloat("lambda2", 0.0),
            )
            profiles.append(BackendProfile(
                name=s.get("name", section),
                qubits=s.getint("qubits"),
                max_shots=s.getint("max_shots"),
                max_circuits_per_job=s.getint("max_circuits_per_job"),
                noise=noise,
                queue_delay=s.getfloat("queue_delay", 0.0),
            ))
        except (TypeError, ValueError) as exc:
            raise ValueError(f"{path}: profile [{section}]: {exc}") from exc
    return profiles


def get_profile(name: str, config=None) -> BackendProfile:
    """Look up ``name`` in ``config`` (if given) then among the built-ins."""
    candidates = (load_profiles(config) if config else []) + builtin_profiles()
    for p in candidates:
        if p.name == name:
            return p
    known = ", ".join(p.name for p in candidates)
    raise KeyError(f"unknown backend profile {name!r}; known: {known}")
