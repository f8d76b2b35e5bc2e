"""
Two-level state algebra: amplitudes, Bloch vectors, density operators and
the coplanar five-state geometry used throughout the package.

Conventions
-----------
* A pure state is stored with a canonical global phase: the first amplitude
  whose modulus exceeds ``PHASE_EPS`` is real and non-negative.  Two
  ``PureQubit`` objects describe the same ray iff their fields agree.
* The canonical frame puts every state of the geometry in the x-z plane with
  the bisector along +z, so all amplitudes are real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import BadDistribution, InvalidState, NotPure, OutOfDomain, ZeroVector

ALGEBRA_TOL = 1e-12
INPUT_TOL = 1e-9
PHASE_EPS = 1e-12

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SIGMA_X, SIGMA_Y, SIGMA_Z])


def _canonical_phase(vec: np.ndarray) -> np.ndarray:
    for amp in vec:
        if abs(amp) > PHASE_EPS:
            return vec * (abs(amp) / amp)
    return vec


@dataclass(frozen=True)
class PureQubit:
    """Normalized pure qubit ``a0|0> + a1|1>`` in canonical phase."""

    a0: complex
    a1: complex

    def __post_init__(self):
        norm2 = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm2 - 1.0) > ALGEBRA_TOL:
            raise InvalidState(f"amplitudes not normalized (|a|^2 = {norm2!r})")
        lead = self.a0 if abs(self.a0) > PHASE_EPS else self.a1
        if abs(complex(lead).imag) > ALGEBRA_TOL or complex(lead).real < -ALGEBRA_TOL:
            raise InvalidState("amplitudes are not in canonical phase")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=complex)

    def projector(self) -> np.ndarray:
        v = self.vector
        return np.outer(v, v.conj())

    @property
    def bloch(self) -> "BlochVector":
        return bloch_from_pure(self)

    def orthogonal(self) -> "PureQubit":
        """The unique (up to phase) state orthogonal to this one."""
        return pure_from_amplitudes(-np.conj(self.a1), np.conj(self.a0))


@dataclass(frozen=True)
class BlochVector:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if self.norm > 1.0 + ALGEBRA_TOL:
            raise InvalidState(f"Bloch vector outside the unit ball (norm {self.norm!r})")

    @classmethod
    def from_array(cls, arr: Sequence[float]) -> "BlochVector":
        x, y, z = (float(c) for c in arr)
        return cls(x, y, z)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @property
    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    @property
    def is_pure(self) -> bool:
        return abs(self.norm - 1.0) < ALGEBRA_TOL

    def __neg__(self) -> "BlochVector":
        return BlochVector(-self.x, -self.y, -self.z)

    def dot(self, other: "BlochVector") -> float:
        return float(self.array @ other.array)

    def angle_to(self, other: "BlochVector") -> float:
        c = self.dot(other) / (self.norm * other.norm)
        return math.acos(min(1.0, max(-1.0, c)))


class DensityOperator:
    """Immutable 2x2 density matrix (Hermitian, unit trace, PSD)."""

    __slots__ = ("_m",)

    def __init__(self, matrix):
        m = np.array(matrix, dtype=complex).reshape(2, 2)
        if np.max(np.abs(m - m.conj().T)) > ALGEBRA_TOL:
            raise InvalidState("density operator is not Hermitian")
        if abs(np.trace(m) - 1.0) > ALGEBRA_TOL:
            raise InvalidState(f"density operator trace {np.trace(m).real!r} != 1")
        if np.min(np.linalg.eigvalsh(m)) < -ALGEBRA_TOL:
            raise InvalidState("density operator has a negative eigenvalue")
        m.setflags(write=False)
        self._m = m

    @classmethod
    def from_bloch(cls, v: BlochVector) -> "DensityOperator":
        return cls(0.5 * (IDENTITY + np.einsum("i,ijk->jk", v.array, PAULI)))

    @classmethod
    def from_pure(cls, q: PureQubit) -> "DensityOperator":
        return cls(q.projector())

    @property
    def matrix(self) -> np.ndarray:
        return self._m

    @property
    def bloch(self) -> BlochVector:
        r = np.real(np.einsum("ij,kji->k", self._m, PAULI))
        return BlochVector.from_array(r)

    def __repr__(self) -> str:
        return f"DensityOperator({self._m.tolist()!r})"


@dataclass(frozen=True)
class CanonicalGeometry:
    """States alpha, beta, gamma, delta, -delta for one half-angle theta.

    ``alpha`` and ``beta`` have Bloch vectors 2*theta apart; ``gamma``
    bisects them; ``delta`` is orthogonal to ``gamma`` on the far side of
    ``beta``; ``p = 1/(1 + sin theta)`` is the weight of the signal branch.
    """

    theta: float
    alpha: PureQubit
    beta: PureQubit
    gamma: PureQubit
    delta: PureQubit
    minus_delta: PureQubit
    p: float
    _bloch: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        derived = {name: bloch_from_pure(getattr(self, name)) for name in STATE_LABELS + ("gamma",)}
        if self._bloch is None:
            object.__setattr__(self, "_bloch", derived)
        for name, v in derived.items():
            if np.max(np.abs(v.array - self._bloch[name].array)) > ALGEBRA_TOL:
                raise InvalidState(f"cached Bloch vector of {name} disagrees with its amplitudes")
        self._check()

    def bloch(self, label: str) -> BlochVector:
        return self._bloch[label]

    def state(self, label: str) -> PureQubit:
        return getattr(self, label)

    @property
    def overlap(self) -> float:
        return overlap(self.alpha, self.beta)

    def _check(self) -> None:
        ra, rb, rg, rd = (self._bloch[k].array for k in ("alpha", "beta", "gamma", "delta"))
        s = ra + rb
        c = rg @ s / (s @ s)
        if c <= 0 or np.max(np.abs(rg - c * s)) > ALGEBRA_TOL:
            raise InvalidState("gamma does not bisect alpha and beta")
        if abs(self._bloch["alpha"].angle_to(self._bloch["beta"]) - 2 * self.theta) > ALGEBRA_TOL:
            raise InvalidState("alpha/beta angle is not 2*theta")
        if abs(rd @ rg) > ALGEBRA_TOL:
            raise InvalidState("delta is not orthogonal to gamma")
        if np.max(np.abs(self._bloch["minus_delta"].array + rd)) > ALGEBRA_TOL:
            raise InvalidState("minus_delta is not antipodal to delta")
        if abs(self.p * (1 + math.sin(self.theta)) - 1) > ALGEBRA_TOL:
            raise InvalidState("p != 1/(1 + sin theta)")


# Bob-side states that occur in the two decompositions.
STATE_LABELS = ("alpha", "beta", "delta", "minus_delta")


def pure_from_amplitudes(a0: complex, a1: complex) -> PureQubit:
    v = np.array([a0, a1], dtype=complex)
    norm = float(np.linalg.norm(v))
    if norm * norm <= 1e-24:
        raise ZeroVector("both amplitudes vanish")
    v = _canonical_phase(v / norm)
    lead = 0 if abs(v[0]) > PHASE_EPS else 1
    v[lead] = abs(v[lead])
    return PureQubit(complex(v[0]), complex(v[1]))


def bloch_from_pure(q: PureQubit) -> BlochVector:
    cross = np.conj(q.a0) * q.a1
    x = 2.0 * cross.real
    y = 2.0 * cross.imag
    z = abs(q.a0) ** 2 - abs(q.a1) ** 2
    # renormalize to absorb rounding in the amplitudes
    n = math.sqrt(x * x + y * y + z * z)
    return BlochVector(x / n, y / n, z / n)


def pure_from_bloch(v: BlochVector) -> PureQubit:
    n = v.norm
    if abs(n - 1.0) >= INPUT_TOL:
        raise NotPure(f"Bloch vector norm {n!r} is not 1")
    x, y, z = v.x / n, v.y / n, v.z / n
    # pick the better-conditioned hemisphere
    if z >= 0:
        a0 = math.sqrt((1 + z) / 2)
        a1 = complex(x, y) / (2 * a0)
    else:
        a1 = math.sqrt((1 - z) / 2)
        a0 = complex(x, -y) / (2 * a1)
    return pure_from_amplitudes(a0, a1)


def overlap(q1: PureQubit, q2: PureQubit) -> float:
    """Squared inner product ``|<q1|q2>|^2``."""
    amp = np.vdot(q1.vector, q2.vector)
    return float(min(1.0, abs(amp) ** 2))


def _check_distribution(probs: Sequence[float]) -> None:
    if not probs:
        raise BadDistribution("empty mixture")
    if any(not math.isfinite(w) or w < 0 for w in probs):
        raise BadDistribution("negative or non-finite probability")
    if abs(math.fsum(probs) - 1.0) > ALGEBRA_TOL:
        raise BadDistribution(f"probabilities sum to {math.fsum(probs)!r}")


def mixture_matrix(parts: Iterable[tuple[float, PureQubit]]) -> np.ndarray:
    """Unvalidated ``sum_i p_i |psi_i><psi_i|``."""
    rho = np.zeros((2, 2), dtype=complex)
    for w, q in parts:
        rho += w * q.projector()
    return rho


def density_from_mixture(parts: Sequence[tuple[float, PureQubit]]) -> DensityOperator:
    parts = list(parts)
    _check_distribution([float(w) for w, _ in parts])
    return DensityOperator(mixture_matrix(parts))


def canonical_geometry(theta: float) -> CanonicalGeometry:
    theta = float(theta)
    if not (0.0 < theta < math.pi / 2):
        raise OutOfDomain(f"theta must lie strictly inside (0, pi/2), got {theta!r}")
    s, c = math.sin(theta), math.cos(theta)
    delta = BlochVector(-1.0, 0.0, 0.0)
    vectors = {
        "alpha": BlochVector(s, 0.0, c),
        "beta": BlochVector(-s, 0.0, c),
        "gamma": BlochVector(0.0, 0.0, 1.0),
        "delta": delta,
        "minus_delta": -delta,
    }
    states = {name: pure_from_bloch(v) for name, v in vectors.items()}
    return CanonicalGeometry(theta=theta, p=1.0 / (1.0 + s), _bloch=vectors, **states)
