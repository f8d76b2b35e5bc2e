import math

import numpy as np
import pytest

from helstrom_nosig.bloch_core import (
    BlochVector,
    DensityOperator,
    PureQubit,
    canonical_geometry,
)
from helstrom_nosig.discrimination import (
    ProjectiveDetector,
    SuperQuantumDetector,
    TwoOutcomePovm,
    behavioral_response,
    detector_error,
    helstrom_bound,
    optimal_detector,
    oracle_min_error,
    pe_min,
    povm_outcome_probability,
    random_povm,
)
from helstrom_nosig.errors import InvalidDetector, InvalidState, OutOfDomain, UnknownLabel

from conftest import PI4, PI6, THETA_GRID

X_PLUS = BlochVector(1, 0, 0)
X_MINUS = BlochVector(-1, 0, 0)


def projective_grid_min(theta, points=200_000):
    """Independent check: minimise the projective error in closed form
    1/2 + (r_beta - r_alpha).n / 4 over a dense circle of axes."""
    ra = np.array([math.sin(theta), 0, math.cos(theta)])
    rb = np.array([-math.sin(theta), 0, math.cos(theta)])
    phi = np.linspace(0, 2 * np.pi, points, endpoint=False)
    n = np.stack([np.cos(phi), np.zeros_like(phi), np.sin(phi)], axis=1)
    return float(np.min(0.5 + n @ (rb - ra) / 4))


class TestHelstromBound:
    def test_endpoints(self):
        assert helstrom_bound(0.0) == 0.0
        assert helstrom_bound(1.0) == 0.5

    def test_pi_over_6_matches_brute_force(self):
        brute = projective_grid_min(PI6)
        assert brute == pytest.approx(0.25, abs=1e-9)
        assert helstrom_bound(0.75) == pytest.approx(brute, abs=1e-9)

    @pytest.mark.parametrize("bad", [-0.01, 1.01, float("nan")])
    def test_domain(self, bad):
        with pytest.raises(OutOfDomain):
            helstrom_bound(bad)

    def test_monotone(self):
        xs = np.linspace(0, 1, 501)
        ys = [helstrom_bound(x) for x in xs]
        assert all(b >= a for a, b in zip(ys, ys[1:]))
        assert 0 <= min(ys) and max(ys) <= 0.5


class TestOptimalDetector:
    def test_pi_over_6(self):
        g = canonical_geometry(PI6)
        d = optimal_detector(g)
        np.testing.assert_allclose(d.axis.array, [1, 0, 0], atol=1e-15)
        assert detector_error(d, g) == pytest.approx(0.25, abs=1e-12)

    def test_pi_over_4(self):
        g = canonical_geometry(PI4)
        assert detector_error(optimal_detector(g), g) == pytest.approx(0.14645, abs=1e-5)
        assert detector_error(optimal_detector(g), g) == pytest.approx((1 - math.sin(PI4)) / 2, abs=1e-12)

    @pytest.mark.parametrize("theta", THETA_GRID)
    def test_closed_form_on_grid(self, theta):
        g = canonical_geometry(theta)
        d = optimal_detector(g)
        assert abs(detector_error(d, g) - helstrom_bound(math.cos(theta) ** 2)) < 1e-12
        assert abs(d.axis.dot(g.bloch("gamma"))) < 1e-12
        assert abs(g.p * (1 - pe_min(g)) - 0.5) < 1e-12


class TestDetectorError:
    def test_bisector_axis_is_uninformative(self):
        g = canonical_geometry(PI6)
        assert detector_error(ProjectiveDetector(g.bloch("gamma")), g) == pytest.approx(0.5, abs=1e-12)

    def test_label_swapped_optimum(self):
        g = canonical_geometry(PI6)
        ra, rb = g.bloch("alpha").array, g.bloch("beta").array
        expected = 0.5 + (rb - ra) @ X_MINUS.array / 4
        assert expected == pytest.approx(0.75, abs=1e-12)
        assert detector_error(ProjectiveDetector(X_MINUS), g) == pytest.approx(expected, abs=1e-12)

    def test_label_swap_duality(self, rng):
        g = canonical_geometry(0.7)
        for _ in range(100):
            n = rng.normal(size=3)
            n /= np.linalg.norm(n)
            e = detector_error(ProjectiveDetector(BlochVector.from_array(n)), g)
            e_neg = detector_error(ProjectiveDetector(BlochVector.from_array(-n)), g)
            assert abs(e + e_neg - 1) < 1e-12

    @pytest.mark.parametrize("theta", [0.1, 0.5, 0.9, 1.3])
    def test_random_povms_never_beat_bound(self, theta):
        g = canonical_geometry(theta)
        rng = np.random.default_rng(int(theta * 1000))
        bound = pe_min(g)
        worst = min(detector_error(random_povm(rng), g) for _ in range(2000))
        assert worst >= bound - 1e-12


class TestPovm:
    def test_unbiased_effect(self, rng):
        e = TwoOutcomePovm(np.eye(2) / 2)
        for _ in range(5):
            v = rng.normal(size=3)
            rho = DensityOperator.from_bloch(BlochVector.from_array(v / np.linalg.norm(v) * rng.random()))
            assert povm_outcome_probability(e, rho) == pytest.approx(0.5, abs=1e-15)

    def test_basis_projector(self):
        e = TwoOutcomePovm(np.diag([1, 0]))
        assert povm_outcome_probability(e, DensityOperator.from_pure(PureQubit(1, 0))) == 1.0

    def test_weighted_effect_on_delta(self):
        e = TwoOutcomePovm.from_weights(0.3, 0.1, X_PLUS)
        delta = canonical_geometry(PI6).delta
        # trace(e0 |delta><delta|) with |delta> = (1, -1)/sqrt(2)
        p_plus = 0.5 * np.array([[1, 1], [1, 1]])
        p_minus = 0.5 * np.array([[1, -1], [-1, 1]])
        direct = np.trace((0.3 * p_plus + 0.1 * p_minus) @ delta.projector()).real
        assert direct == pytest.approx(0.1, abs=1e-15)
        assert povm_outcome_probability(e, DensityOperator.from_pure(delta)) == pytest.approx(direct, abs=1e-15)

    def test_projective_is_povm(self):
        d = ProjectiveDetector(X_PLUS)
        np.testing.assert_allclose(d.as_povm().e0, 0.5 * np.array([[1, 1], [1, 1]]))

    @pytest.mark.parametrize("e0", [np.diag([1.2, 0]), np.diag([-0.1, 0.5]), np.array([[0.5, 0.1], [0.2, 0.5]])])
    def test_invalid_effects(self, e0):
        with pytest.raises(InvalidDetector):
            TwoOutcomePovm(e0)

    def test_invalid_state(self):
        with pytest.raises(InvalidState):
            povm_outcome_probability(TwoOutcomePovm(np.eye(2) / 2), np.eye(2) / 2)

    def test_non_unit_axis(self):
        with pytest.raises(InvalidDetector):
            ProjectiveDetector(BlochVector(0.5, 0, 0))


class TestOracle:
    def test_pi_over_6(self):
        res = oracle_min_error(canonical_geometry(PI6), 10_000, 10_000, seed=1)
        assert abs(res.min_error - 0.25) < 1e-6
        assert res.min_error >= helstrom_bound(0.75) - 1e-12
        np.testing.assert_allclose(res.argmin_axis.array, [1, 0, 0], atol=2e-3)

    def test_pi_over_4(self):
        res = oracle_min_error(canonical_geometry(PI4), 10_000, 0, seed=2)
        assert abs(res.min_error - 0.14645) < 1e-5
        assert abs(res.min_error - (1 - math.sin(PI4)) / 2) < 1e-6

    def test_deterministic(self):
        g = canonical_geometry(0.4)
        assert oracle_min_error(g, 2000, 500, seed=9) == oracle_min_error(g, 2000, 500, seed=9)

    def test_grid_minimum(self):
        with pytest.raises(ValueError):
            oracle_min_error(canonical_geometry(0.4), 999)

    @pytest.mark.parametrize("theta", [round(0.1 * k, 1) for k in range(1, 16)])
    def test_never_beats_bound(self, theta):
        g = canonical_geometry(theta)
        res = oracle_min_error(g, 10_000, 10_000, seed=3)
        assert res.min_error >= pe_min(g) - 1e-12
        assert res.min_error - pe_min(g) < 1e-6


class TestSuperQuantum:
    def test_table(self):
        g = canonical_geometry(PI6)
        d = SuperQuantumDetector(0.05, g)
        # 1 - (P_E^m - eps) with P_E^m = 0.25
        assert behavioral_response(d, "alpha") == pytest.approx(0.8, abs=1e-12)
        assert behavioral_response(d, "beta") == pytest.approx(0.2, abs=1e-12)
        assert behavioral_response(d, "delta") == 0.5
        assert behavioral_response(d, "minus_delta") == 0.5
        assert detector_error(d, g) == pytest.approx(0.2, abs=1e-12)

    def test_unknown_label(self):
        d = SuperQuantumDetector(0.05, canonical_geometry(PI6))
        with pytest.raises(UnknownLabel):
            behavioral_response(d, "gamma")

    @pytest.mark.parametrize("eps,q", [(0.0, 0.5), (0.3, 0.5), (-0.1, 0.5), (0.05, 1.5)])
    def test_invalid(self, eps, q):
        with pytest.raises(InvalidDetector):
            SuperQuantumDetector(eps, canonical_geometry(PI6), q)

    def test_epsilon_equal_to_bound_allowed(self):
        g = canonical_geometry(PI6)
        d = SuperQuantumDetector(pe_min(g), g)
        assert d.error == 0.0
