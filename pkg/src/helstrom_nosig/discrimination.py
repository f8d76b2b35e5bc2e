"""
Minimum-error discrimination of the two signal states alpha and beta.

Detectors come in three flavours:

* ``ProjectiveDetector`` - outcome 0 is the projector onto the Bloch axis.
* ``TwoOutcomePovm``     - an arbitrary effect ``e0``; outcome 1 is ``1 - e0``.
* ``SuperQuantumDetector`` - a behavioural response table that beats the
  Helstrom bound by ``epsilon``.  No quantum measurement realizes it.

Error probabilities are always for equal priors on alpha and beta, with
outcome 0 meaning "alpha".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .bloch_core import (
    ALGEBRA_TOL,
    IDENTITY,
    PAULI,
    STATE_LABELS,
    BlochVector,
    CanonicalGeometry,
    DensityOperator,
    PureQubit,
)
from .errors import InvalidDetector, InvalidState, OutOfDomain, UnknownLabel


def helstrom_bound(overlap: float) -> float:
    """Minimum error probability for two equiprobable pure states.

    ``overlap`` is ``|<alpha|beta>|^2``; the result lies in ``[0, 1/2]``.
    """
    overlap = float(overlap)
    if not (0.0 <= overlap <= 1.0):
        raise OutOfDomain(f"overlap must lie in [0, 1], got {overlap!r}")
    return 0.5 * (1.0 - math.sqrt(1.0 - overlap))


def pe_min(g: CanonicalGeometry) -> float:
    return helstrom_bound(g.overlap)


def _effect_from_bloch(offset: float, bias: np.ndarray) -> np.ndarray:
    return offset * IDENTITY + np.einsum("i,ijk->jk", bias, PAULI)


@dataclass(frozen=True)
class ProjectiveDetector:
    axis: BlochVector

    def __post_init__(self):
        if abs(self.axis.norm - 1.0) >= ALGEBRA_TOL:
            raise InvalidDetector("projective detector axis must be a unit vector")

    @property
    def e0(self) -> np.ndarray:
        return _effect_from_bloch(0.5, 0.5 * self.axis.array)

    def as_povm(self) -> "TwoOutcomePovm":
        return TwoOutcomePovm(self.e0)


class TwoOutcomePovm:
    """Two-outcome qubit measurement given by its outcome-0 effect."""

    __slots__ = ("_e0",)

    def __init__(self, e0):
        e0 = np.array(e0, dtype=complex).reshape(2, 2)
        if np.max(np.abs(e0 - e0.conj().T)) > ALGEBRA_TOL:
            raise InvalidDetector("effect is not Hermitian")
        ev = np.linalg.eigvalsh(e0)
        if ev[0] < -ALGEBRA_TOL or ev[-1] > 1.0 + ALGEBRA_TOL:
            raise InvalidDetector(f"effect eigenvalues {ev.tolist()} outside [0, 1]")
        e0.setflags(write=False)
        self._e0 = e0

    @classmethod
    def from_weights(cls, t: float, s: float, direction: BlochVector) -> "TwoOutcomePovm":
        """``e0 = t P(n) + s P(-n)`` with ``t, s`` in [0, 1]."""
        n = direction.array / direction.norm
        return cls(_effect_from_bloch(0.5 * (t + s), 0.5 * (t - s) * n))

    @property
    def e0(self) -> np.ndarray:
        return self._e0

    @property
    def offset(self) -> float:
        return float(np.trace(self._e0).real / 2)

    @property
    def bias(self) -> np.ndarray:
        return np.real(np.einsum("ij,kji->k", self._e0, PAULI)) / 2

    def __repr__(self) -> str:
        return f"TwoOutcomePovm({self._e0.tolist()!r})"


@dataclass(frozen=True)
class SuperQuantumDetector:
    """Hypothetical device with error ``pe_min - epsilon`` on alpha/beta.

    ``q_other`` is its outcome-0 probability on delta and -delta, which the
    argument leaves unconstrained.
    """

    epsilon: float
    geometry: CanonicalGeometry
    q_other: float = 0.5

    def __post_init__(self):
        bound = pe_min(self.geometry)
        if not (0.0 < self.epsilon <= bound + ALGEBRA_TOL):
            raise InvalidDetector(
                f"epsilon must lie in (0, {bound:.17g}], got {self.epsilon!r}"
            )
        if not (0.0 <= self.q_other <= 1.0):
            raise InvalidDetector(f"q_other must lie in [0, 1], got {self.q_other!r}")

    @property
    def error(self) -> float:
        return pe_min(self.geometry) - self.epsilon

    def table(self) -> dict[str, float]:
        return {
            "alpha": 1.0 - self.error,
            "beta": self.error,
            "delta": self.q_other,
            "minus_delta": self.q_other,
        }


PhysicalDetector = Union[ProjectiveDetector, TwoOutcomePovm]
Detector = Union[ProjectiveDetector, TwoOutcomePovm, SuperQuantumDetector]


def _effect(d: PhysicalDetector) -> np.ndarray:
    if isinstance(d, (ProjectiveDetector, TwoOutcomePovm)):
        return d.e0
    raise InvalidDetector(f"not a physical detector: {d!r}")


def povm_outcome_probability(e0: PhysicalDetector, state: DensityOperator) -> float:
    """Born-rule probability of outcome 0."""
    if not isinstance(state, DensityOperator):
        raise InvalidState(f"expected a DensityOperator, got {type(state).__name__}")
    prob = float(np.trace(_effect(e0) @ state.matrix).real)
    if prob < -ALGEBRA_TOL or prob > 1.0 + ALGEBRA_TOL:
        raise InvalidDetector(f"outcome probability {prob!r} outside [0, 1]")
    return min(1.0, max(0.0, prob))


def behavioral_response(d: SuperQuantumDetector, label: str) -> float:
    try:
        return d.table()[label]
    except KeyError:
        raise UnknownLabel(f"unknown state label {label!r}; expected one of {STATE_LABELS}") from None


def outcome0_probability(d: Detector, state: PureQubit, label: str | None = None) -> float:
    """Outcome-0 probability of any detector on a geometry state.

    Super-quantum detectors only know geometry labels, so ``label`` is
    required for them; physical detectors use the Born rule on ``state``.
    """
    if isinstance(d, SuperQuantumDetector):
        if label is None:
            raise UnknownLabel("super-quantum detectors respond to labels, not states")
        return behavioral_response(d, label)
    return povm_outcome_probability(d, DensityOperator.from_pure(state))


def detector_error(d: PhysicalDetector | SuperQuantumDetector, g: CanonicalGeometry) -> float:
    """Equal-prior error probability ``(P(1|alpha) + P(0|beta)) / 2``."""
    p0_alpha = outcome0_probability(d, g.alpha, "alpha")
    p0_beta = outcome0_probability(d, g.beta, "beta")
    return 0.5 * (1.0 - p0_alpha) + 0.5 * p0_beta


def optimal_detector(g: CanonicalGeometry) -> ProjectiveDetector:
    diff = g.bloch("alpha").array - g.bloch("beta").array
    return ProjectiveDetector(BlochVector.from_array(diff / np.linalg.norm(diff)))


class OracleResult(NamedTuple):
    min_error: float
    argmin_axis: BlochVector


def _batch_errors(effects: np.ndarray, g: CanonicalGeometry) -> np.ndarray:
    rho_a = g.alpha.projector()
    rho_b = g.beta.projector()
    p0_a = np.einsum("nij,ji->n", effects, rho_a).real
    p0_b = np.einsum("nij,ji->n", effects, rho_b).real
    return 0.5 * (1.0 - p0_a) + 0.5 * p0_b


def oracle_min_error(
    g: CanonicalGeometry,
    grid_points: int = 10_000,
    povm_samples: int = 10_000,
    seed: int = 0,
) -> OracleResult:
    """Brute-force search for the least detector error.

    Scans ``grid_points`` projective axes evenly spaced around the circle
    in the alpha-beta plane (with a seeded random rotation of the whole
    grid) and ``povm_samples`` random two-outcome POVMs.  Error rates are
    computed by the Born rule on the signal projectors and never consult
    the closed-form bound.
    """
    if grid_points < 1000:
        raise ValueError("grid_points must be at least 1000")
    rng = np.random.default_rng(seed)

    # plane spanned by alpha and beta, orthonormalized
    ra, rb = g.bloch("alpha").array, g.bloch("beta").array
    u = ra + rb
    u /= np.linalg.norm(u)
    w = ra - rb
    w /= np.linalg.norm(w)
    phi = 2.0 * np.pi * (np.arange(grid_points) + rng.random()) / grid_points
    axes = np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * w
    offsets = np.full(grid_points, 0.5)
    biases = 0.5 * axes

    if povm_samples > 0:
        n = rng.normal(size=(povm_samples, 3))
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        t = rng.random(povm_samples)
        s = rng.random(povm_samples)
        offsets = np.concatenate([offsets, 0.5 * (t + s)])
        biases = np.concatenate([biases, 0.5 * (t - s)[:, None] * n])
        axes = np.concatenate([axes, np.where(t >= s, 1.0, -1.0)[:, None] * n])

    effects = offsets[:, None, None] * IDENTITY + np.einsum("ni,ijk->njk", biases, PAULI)
    errors = _batch_errors(effects, g)
    k = int(np.argmin(errors))
    axis = axes[k] / np.linalg.norm(axes[k])
    return OracleResult(float(errors[k]), BlochVector.from_array(axis))


def random_povm(rng: np.random.Generator) -> TwoOutcomePovm:
    n = rng.normal(size=3)
    return TwoOutcomePovm.from_weights(rng.random(), rng.random(), BlochVector.from_array(n / np.linalg.norm(n)))


def random_projective(rng: np.random.Generator) -> ProjectiveDetector:
    n = rng.normal(size=3)
    return ProjectiveDetector(BlochVector.from_array(n / np.linalg.norm(n)))
