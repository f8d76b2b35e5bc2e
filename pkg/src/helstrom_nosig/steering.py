"""
The two-qubit state shared by Alice and Bob, Bob's reduced state, and the
decompositions Alice can steer it into by choosing her measurement basis.

Amplitudes are indexed ``c[a, b]`` with Alice first.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bloch_core import (
    ALGEBRA_TOL,
    CanonicalGeometry,
    DensityOperator,
    PureQubit,
    _check_distribution,
    mixture_matrix,
    pure_from_amplitudes,
)
from .errors import DegenerateBranch, InvalidState, SingularSystem

BRANCH_EPS = 1e-12
# beyond this the Eq. (2) solve is treated as singular
MAX_CONDITION = 1e8


@dataclass(frozen=True)
class BipartiteState:
    c00: complex
    c01: complex
    c10: complex
    c11: complex

    def __post_init__(self):
        norm2 = float(np.sum(np.abs(self.matrix) ** 2))
        if abs(norm2 - 1.0) > ALGEBRA_TOL:
            raise InvalidState(f"bipartite state not normalized (|c|^2 = {norm2!r})")

    @classmethod
    def from_matrix(cls, m) -> "BipartiteState":
        m = np.asarray(m, dtype=complex).reshape(2, 2)
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @classmethod
    def product(cls, alice: PureQubit, bob: PureQubit) -> "BipartiteState":
        return cls.from_matrix(np.outer(alice.vector, bob.vector))

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.c00, self.c01], [self.c10, self.c11]], dtype=complex)


@dataclass(frozen=True)
class OrthonormalBasis:
    first: PureQubit
    second: PureQubit

    def __post_init__(self):
        if abs(np.vdot(self.first.vector, self.second.vector)) >= ALGEBRA_TOL:
            raise InvalidState("basis vectors are not orthogonal")

    @classmethod
    def computational(cls) -> "OrthonormalBasis":
        return cls(PureQubit(1, 0), PureQubit(0, 1))

    @classmethod
    def completing(cls, first: PureQubit) -> "OrthonormalBasis":
        return cls(first, first.orthogonal())

    def __iter__(self):
        yield self.first
        yield self.second


@dataclass(frozen=True)
class Decomposition:
    """Weighted pure states; ``degenerate[i]`` marks a zero-weight placeholder."""

    parts: tuple[tuple[float, PureQubit], ...]
    degenerate: tuple[bool, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple((float(w), q) for w, q in self.parts))
        if not self.degenerate:
            object.__setattr__(self, "degenerate", (False,) * len(self.parts))
        _check_distribution([w for w, _ in self.parts])

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(w for w, _ in self.parts)

    @property
    def states(self) -> tuple[PureQubit, ...]:
        return tuple(q for _, q in self.parts)

    def matrix(self) -> np.ndarray:
        return mixture_matrix(self.parts)


def build_psi(g: CanonicalGeometry) -> BipartiteState:
    """``sqrt(p)|0>|alpha> + sqrt(1-p)|1>|delta>``."""
    m = np.stack([math.sqrt(g.p) * g.alpha.vector, math.sqrt(1.0 - g.p) * g.delta.vector])
    return BipartiteState.from_matrix(m)


def reduced_state_bob(psi: BipartiteState) -> DensityOperator:
    m = psi.matrix
    return DensityOperator(m.T @ m.conj())


def steer(psi: BipartiteState, basis: OrthonormalBasis) -> Decomposition:
    """Bob's ensemble after Alice measures ``basis`` on her half of ``psi``."""
    m = psi.matrix
    parts, flags = [], []
    for e in basis:
        bob = e.vector.conj() @ m
        weight = float(np.vdot(bob, bob).real)
        if math.sqrt(weight) < BRANCH_EPS:
            warnings.warn("steering branch has zero weight", DegenerateBranch, stacklevel=2)
            parts.append((0.0, PureQubit(1, 0)))
            flags.append(True)
        else:
            parts.append((weight, pure_from_amplitudes(*bob)))
            flags.append(False)
    # renormalize the rounding drift so the distribution check is exact
    total = math.fsum(w for w, _ in parts)
    parts = [(w / total, q) for w, q in parts]
    return Decomposition(tuple(parts), tuple(flags))


def _primed_system(g: CanonicalGeometry) -> np.ndarray:
    return np.stack([g.beta.vector, g.minus_delta.vector])


def primed_system_condition(g: CanonicalGeometry) -> float:
    """Condition number of the beta / -delta matrix solved by ``primed_basis``."""
    return float(np.linalg.cond(_primed_system(g)))


def primed_basis(g: CanonicalGeometry) -> OrthonormalBasis:
    """Solve ``psi = sqrt(p)|0'>|beta> + sqrt(1-p)|1'>|-delta>`` for Alice's basis.

    Writing the amplitude matrix as ``M = U diag(sqrt p, sqrt(1-p)) B`` with
    the rows of ``B`` being beta and -delta, each row of ``M`` gives one 2x2
    linear system for the corresponding row of ``U``.
    """
    bob = _primed_system(g)
    if np.linalg.cond(bob) > MAX_CONDITION:
        raise SingularSystem("beta and -delta are numerically dependent")
    m = build_psi(g).matrix
    ud = np.linalg.solve(bob.T, m.T).T
    first = ud[:, 0] / math.sqrt(g.p)
    second = ud[:, 1] / math.sqrt(1.0 - g.p)
    return OrthonormalBasis(pure_from_amplitudes(*first), pure_from_amplitudes(*second))


def reconstruct(basis: OrthonormalBasis, weights: Sequence[float], bob_states: Sequence[PureQubit]) -> BipartiteState:
    """``sum_i sqrt(w_i) |basis_i> |bob_i>`` (no normalization check)."""
    m = sum(
        math.sqrt(w) * np.outer(a.vector, b.vector)
        for w, a, b in zip(weights, basis, bob_states)
    )
    return BipartiteState.from_matrix(m)


def reconstruction_residual(g: CanonicalGeometry, basis: OrthonormalBasis) -> float:
    """Max amplitude difference between ``build_psi(g)`` and the primed form."""
    rebuilt = reconstruct(basis, (g.p, 1.0 - g.p), (g.beta, g.minus_delta))
    return float(np.max(np.abs(rebuilt.matrix - build_psi(g).matrix)))


def decomposition_residual(rho: DensityOperator, d: Decomposition) -> float:
    return float(np.max(np.abs(rho.matrix - d.matrix())))


def paper_decompositions(g: CanonicalGeometry) -> tuple[Decomposition, Decomposition]:
    """The alpha/delta and beta/-delta ensembles of Bob's reduced state."""
    q = 1.0 - g.p
    return (
        Decomposition(((g.p, g.alpha), (q, g.delta))),
        Decomposition(((g.p, g.beta), (q, g.minus_delta))),
    )
