"""
Monte Carlo model of the faster-than-light protocol built on the shared
state: Alice encodes a bit in her basis choice, Bob runs a detector on each
of his N qubits and decodes by majority vote on outcome 0.

Sizing N
--------
If the decision margin (outcome-0 frequency minus 1/2 under the true bit)
is ``t``, a majority decoder errs with probability at most
``exp(-2 N t**2)`` (Hoeffding).  For a super-quantum detector the
margin is at least ``p * epsilon``, so ``N >= ln(1/delta) / (2 (p eps)**2)``
keeps the per-session error below ``delta``.

Randomness
----------
Every session draws from its own PCG64 stream seeded with
``SeedSequence([seed, session_index, bit])``.  Results therefore do not
depend on the order in which sessions are executed.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Union

import numpy as np

from .bloch_core import STATE_LABELS, CanonicalGeometry, canonical_geometry, overlap
from .discrimination import (
    Detector,
    ProjectiveDetector,
    SuperQuantumDetector,
    TwoOutcomePovm,
    optimal_detector,
    outcome0_probability,
)
from .errors import InsufficientData, InvalidDetector, OutOfDomain
from .steering import OrthonormalBasis, build_psi, primed_basis, steer

OPTIMAL = "optimal"
DEFAULT_Z_THRESHOLD = 5.0
MIN_NOSIG_ROUNDS = 100

DetectorChoice = Union[str, ProjectiveDetector, TwoOutcomePovm, SuperQuantumDetector]


@dataclass(frozen=True)
class ProtocolConfig:
    theta: float
    detector: DetectorChoice = OPTIMAL
    rounds: int = 1000
    sessions: int = 1
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.theta < math.pi / 2):
            raise OutOfDomain(f"theta must lie strictly inside (0, pi/2), got {self.theta!r}")
        if self.rounds < 1 or self.sessions < 1:
            raise ValueError("rounds and sessions must both be at least 1")
        if isinstance(self.detector, str) and self.detector != OPTIMAL:
            raise InvalidDetector(f"unknown detector name {self.detector!r}")
        if isinstance(self.detector, SuperQuantumDetector):
            if abs(self.detector.geometry.theta - self.theta) > 1e-12:
                raise InvalidDetector("super-quantum detector was built for a different theta")

    @property
    def geometry(self) -> CanonicalGeometry:
        return canonical_geometry(self.theta)

    def resolve_detector(self) -> Detector:
        if isinstance(self.detector, str):
            return optimal_detector(self.geometry)
        return self.detector


@dataclass(frozen=True)
class SessionRecord:
    bit_sent: int
    n0: int
    n1: int
    bob_guess: int
    tie_broken: bool


@dataclass(frozen=True)
class NoSignalReport:
    freq0_bit0: float
    freq0_bit1: float
    gap: float
    z_statistic: float
    verdict: str
    rounds: int
    threshold: float


class Decision(NamedTuple):
    bit: int
    tie_broken: bool


class Branch(NamedTuple):
    prob: float
    label: str
    p0: float


def alice_basis_for_bit(bit: int, g: CanonicalGeometry) -> OrthonormalBasis:
    if bit == 0:
        return OrthonormalBasis.computational()
    if bit == 1:
        return primed_basis(g)
    raise ValueError(f"bit must be 0 or 1, got {bit!r}")


def _label_of(state, g: CanonicalGeometry) -> str:
    for label in STATE_LABELS:
        if overlap(state, g.state(label)) > 1.0 - 1e-9:
            return label
    raise ValueError("steered state is not one of the geometry states")


def branch_table(bit: int, g: CanonicalGeometry, detector: Detector) -> tuple[Branch, ...]:
    """Bob's steered branches for ``bit`` with the detector's outcome-0 probability.

    The branches come from actually steering the shared state in Alice's
    basis; each collapsed Bob state is matched to its geometry label so that
    label-driven (super-quantum) detectors can respond to it.
    """
    ens = steer(build_psi(g), alice_basis_for_bit(bit, g))
    branches = []
    for w, q in ens.parts:
        label = _label_of(q, g)
        branches.append(Branch(w, label, outcome0_probability(detector, q, label)))
    return tuple(branches)


@lru_cache(maxsize=256)
def _cached_table(bit: int, theta: float, detector) -> tuple[Branch, ...]:
    return branch_table(bit, canonical_geometry(theta), detector)


def _table(bit: int, g: CanonicalGeometry, detector: Detector) -> tuple[Branch, ...]:
    try:
        return _cached_table(bit, g.theta, detector)
    except TypeError:  # unhashable detector
        return branch_table(bit, g, detector)


def sample_outcomes(
    bit: int, g: CanonicalGeometry, detector: Detector, n: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw ``n`` rounds; returns an int array of outcomes (0 or 1)."""
    first, second = _table(bit, g, detector)
    in_first = rng.random(n) < first.prob
    p0 = np.where(in_first, first.p0, second.p0)
    return (rng.random(n) >= p0).astype(np.int8)


def run_round(bit: int, g: CanonicalGeometry, detector: Detector, rng: np.random.Generator) -> int:
    return int(sample_outcomes(bit, g, detector, 1, rng)[0])


def bob_decide(n0: int, n: int, rng: np.random.Generator) -> Decision:
    if not (0 <= n0 <= n):
        raise ValueError(f"need 0 <= n0 <= N, got n0={n0}, N={n}")
    if 2 * n0 > n:
        return Decision(0, False)
    if 2 * n0 < n:
        return Decision(1, False)
    return Decision(int(rng.integers(2)), True)


def session_rng(seed: int, session: int, bit: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, session, bit])))


def run_session(config: ProtocolConfig, bit: int, session: int = 0) -> SessionRecord:
    g = config.geometry
    rng = session_rng(config.seed, session, bit)
    outcomes = sample_outcomes(bit, g, config.resolve_detector(), config.rounds, rng)
    n1 = int(outcomes.sum())
    n0 = config.rounds - n1
    guess, tie = bob_decide(n0, config.rounds, rng)
    return SessionRecord(bit, n0, n1, guess, tie)


def run_sessions(config: ProtocolConfig, workers: int = 1) -> list[SessionRecord]:
    """All ``config.sessions`` sessions, bits alternating 0, 1, 0, ..."""
    jobs = [(i % 2, i) for i in range(config.sessions)]
    if workers <= 1:
        return [run_session(config, bit, i) for bit, i in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: run_session(config, *job), jobs))


def estimate_bob_error(config: ProtocolConfig, workers: int = 1) -> float:
    records = run_sessions(config, workers)
    wrong = sum(r.bob_guess != r.bit_sent for r in records)
    return wrong / len(records)


def analytic_marginals(detector: Detector, g: CanonicalGeometry) -> tuple[float, float]:
    """Exact P(outcome 0 | bit) for bit 0 and bit 1."""
    return tuple(
        math.fsum(b.prob * b.p0 for b in branch_table(bit, g, detector)) for bit in (0, 1)
    )


def signal_branch_success(detector: Detector, g: CanonicalGeometry, bit: int) -> float:
    """Probability of the correct outcome contributed by the alpha/beta branch alone.

    This is a lower bound on Bob's per-round success whatever the detector
    does on delta and -delta.
    """
    for b in branch_table(bit, g, detector):
        if b.label in ("alpha", "beta"):
            return b.prob * (b.p0 if bit == 0 else 1.0 - b.p0)
    raise AssertionError("no signal branch")


def two_proportion_z(freq_a: float, freq_b: float, n: int) -> float:
    pooled = 0.5 * (freq_a + freq_b)
    var = pooled * (1.0 - pooled) * (2.0 / n)
    gap = freq_a - freq_b
    if var == 0.0:
        return 0.0 if gap == 0.0 else math.copysign(math.inf, gap)
    return gap / math.sqrt(var)


def no_signal_test(config: ProtocolConfig, threshold: float = DEFAULT_Z_THRESHOLD) -> NoSignalReport:
    """One N-round batch per bit value, compared with a pooled two-proportion z test."""
    n = config.rounds
    if n < MIN_NOSIG_ROUNDS:
        raise InsufficientData(f"need at least {MIN_NOSIG_ROUNDS} rounds per bit, got {n}")
    g = config.geometry
    detector = config.resolve_detector()
    freqs = []
    for bit in (0, 1):
        outcomes = sample_outcomes(bit, g, detector, n, session_rng(config.seed, 0, bit))
        freqs.append(float(n - outcomes.sum()) / n)
    z = two_proportion_z(freqs[0], freqs[1], n)
    verdict = "signal" if abs(z) > threshold else "no_signal"
    return NoSignalReport(freqs[0], freqs[1], freqs[0] - freqs[1], z, verdict, n, threshold)
