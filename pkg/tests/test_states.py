import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oscpair.model import OscillatorPair, build_hamiltonian, diagonalizer_params, diagonalizing_symplectic
from oscpair.numerics import OMEGA, mat_exp
from oscpair.states import (
    ThermalSpec,
    check_physical,
    covariance_blocks,
    log_negativity,
    nu_minus_pt,
    purity,
    seralian,
    symplectic_eigenvalues,
    thermal_covariance,
)


def tmsv_covariance(r):
    """Two-mode squeezed vacuum covariance, written out by hand.

    Diagonal blocks (cosh 2r)/2 * I, off-diagonal (sinh 2r)/2 * diag(1,-1)
    in the mode-wise (x1, p1, x2, p2) ordering. Serves as the oracle for
    the entanglement formulas: its PT symplectic eigenvalue is exp(-2r)/2.
    """
    ch = 0.5 * math.cosh(2.0 * r)
    sh = 0.5 * math.sinh(2.0 * r)
    return np.array(
        [
            [ch, 0.0, sh, 0.0],
            [0.0, ch, 0.0, -sh],
            [sh, 0.0, ch, 0.0],
            [0.0, -sh, 0.0, ch],
        ]
    )


def random_symplectic(rng):
    gen = rng.normal(size=(4, 4), scale=0.4)
    sym = 0.5 * (gen + gen.T)
    return mat_exp(OMEGA @ sym)


class TestThermalSpec:
    def test_rejects_negative_occupation(self):
        with pytest.raises(ValueError):
            ThermalSpec(-0.1, 0.0)

    def test_from_delta(self):
        spec = ThermalSpec.from_delta(math.log(2.0), math.log(2.0))
        assert spec.eta1 == pytest.approx(1.0, rel=1e-15)
        assert spec.eta2 == pytest.approx(1.0, rel=1e-15)

    def test_from_delta_large_gap_is_nearly_pure(self):
        spec = ThermalSpec.from_delta(50.0, 50.0)
        assert spec.eta1 == pytest.approx(0.0, abs=1e-20)


class TestThermalCovariance:
    def test_vacuum(self):
        assert_allclose(thermal_covariance(ThermalSpec(0.0, 0.0)), 0.5 * np.eye(4))

    def test_mixed_pair(self):
        got = thermal_covariance(ThermalSpec(0.0, 1.0))
        assert_allclose(got, np.diag([0.5, 0.5, 1.5, 1.5]))

    def test_is_physical(self):
        check = check_physical(thermal_covariance(ThermalSpec(2.0, 0.3)))
        assert check.is_physical
        assert check.nu_min == pytest.approx(0.8)
        assert check.nu_max == pytest.approx(2.5)


class TestCovarianceBlocks:
    def test_splits_blocks(self):
        sigma = tmsv_covariance(0.5)
        s1, s2, gamma = covariance_blocks(sigma)
        assert_allclose(s1, sigma[:2, :2])
        assert_allclose(s2, sigma[2:, 2:])
        assert_allclose(gamma, sigma[:2, 2:])


class TestSeralian:
    def test_vacuum(self):
        assert seralian(0.5 * np.eye(4)) == pytest.approx(0.5)

    def test_thermal(self):
        assert seralian(thermal_covariance(ThermalSpec(0.0, 1.0))) == pytest.approx(2.5)

    def test_tmsv(self):
        for r in (0.3, 1.0, 2.0):
            want = 0.5 * math.cosh(2 * r) ** 2 + 0.5 * math.sinh(2 * r) ** 2
            assert seralian(tmsv_covariance(r)) == pytest.approx(want, rel=1e-13)

    def test_matches_numpy_determinant_route(self):
        rng = np.random.default_rng(40)
        for _ in range(50):
            s = random_symplectic(rng)
            sigma = s @ thermal_covariance(ThermalSpec(0.7, 0.2)) @ s.T
            s1, s2, gamma = covariance_blocks(sigma)
            want = np.linalg.det(s1) + np.linalg.det(s2) - 2.0 * np.linalg.det(gamma)
            assert seralian(sigma) == pytest.approx(want, rel=1e-12)


class TestNuMinusPt:
    def test_vacuum(self):
        assert nu_minus_pt(0.5 * np.eye(4)) == pytest.approx(0.5, abs=1e-15)

    def test_thermal_product(self):
        # The lowest PT eigenvalue of a product state is the purer mode's.
        got = nu_minus_pt(thermal_covariance(ThermalSpec(0.0, 1.0)))
        assert got == pytest.approx(0.5, abs=1e-14)

    def test_tmsv(self):
        for r in (0.25, 1.0, 1.8):
            assert nu_minus_pt(tmsv_covariance(r)) == pytest.approx(
                0.5 * math.exp(-2.0 * r), rel=1e-12
            )


class TestLogNegativity:
    def test_product_states_are_separable(self):
        for spec in (ThermalSpec(0.0, 0.0), ThermalSpec(0.0, 1.0), ThermalSpec(3.0, 0.5)):
            assert log_negativity(thermal_covariance(spec)) == 0.0

    def test_tmsv_r1(self):
        assert log_negativity(tmsv_covariance(1.0)) == pytest.approx(2.0, rel=1e-12)

    def test_tmsv_general(self):
        for r in (0.1, 0.7, 1.5):
            assert log_negativity(tmsv_covariance(r)) == pytest.approx(2.0 * r, rel=1e-11)

    def test_never_negative_over_random_states(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            s = random_symplectic(rng)
            sigma = s @ thermal_covariance(ThermalSpec(0.4, 1.1)) @ s.T
            assert log_negativity(sigma) >= 0.0


class TestPurity:
    def test_vacuum(self):
        assert purity(0.5 * np.eye(4)) == pytest.approx(1.0, rel=1e-14)

    def test_thermal_products(self):
        # Two-mode purity is the product of single-mode purities 1/(2 eta + 1).
        assert purity(thermal_covariance(ThermalSpec(0.0, 1.0))) == pytest.approx(1.0 / 3.0)
        assert purity(thermal_covariance(ThermalSpec(1.0, 1.0))) == pytest.approx(1.0 / 9.0)

    def test_tmsv_is_pure(self):
        assert purity(tmsv_covariance(1.3)) == pytest.approx(1.0, rel=1e-10)

    def test_invariant_under_symplectic_congruence(self):
        rng = np.random.default_rng(42)
        sigma0 = thermal_covariance(ThermalSpec(0.5, 2.0))
        want = purity(sigma0)
        for _ in range(50):
            s = random_symplectic(rng)
            assert purity(s @ sigma0 @ s.T) == pytest.approx(want, rel=1e-10)


class TestSymplecticEigenvalues:
    def test_thermal(self):
        lo, hi = symplectic_eigenvalues(thermal_covariance(ThermalSpec(0.25, 1.5)))
        assert lo == pytest.approx(0.75, rel=1e-13)
        assert hi == pytest.approx(2.0, rel=1e-13)

    def test_invariant_under_congruence(self):
        rng = np.random.default_rng(43)
        sigma = thermal_covariance(ThermalSpec(0.25, 1.5))
        s = random_symplectic(rng)
        lo, hi = symplectic_eigenvalues(s @ sigma @ s.T)
        assert lo == pytest.approx(0.75, rel=1e-10)
        assert hi == pytest.approx(2.0, rel=1e-10)


class TestCheckPhysical:
    def test_vacuum_passes(self):
        assert check_physical(0.5 * np.eye(4)).is_physical

    def test_below_vacuum_fails(self):
        check = check_physical(0.25 * np.eye(4))
        assert not check.is_physical
        assert check.nu_min == pytest.approx(0.25)

    def test_unitary_orbit_stays_physical(self):
        osc = OscillatorPair(5.0, 1.0, 2.0)
        s = diagonalizing_symplectic(diagonalizer_params(osc), osc)
        sigma = s @ thermal_covariance(ThermalSpec(0.0, 1.0)) @ s.T
        assert check_physical(sigma).is_physical

    def test_rejects_asymmetric_input(self):
        bad = 0.5 * np.eye(4)
        bad[0, 1] = 1e-3
        with pytest.raises(ValueError, match="symmetric"):
            check_physical(bad)


class TestSeralianOrdersUnitaryOrbits:
    def test_seralian_orders_states_like_log_negativity(self):
        # On a fixed-determinant orbit the PT eigenvalue is strictly
        # decreasing in Delta, so E_N is strictly increasing in it and
        # sorting by Delta sorts by E_N wherever the state is entangled.
        osc = OscillatorPair(1.0, 1.0, 0.9)
        h = build_hamiltonian(osc)
        sigma0 = thermal_covariance(ThermalSpec(0.0, 1.0))
        pts = []
        for t in np.linspace(0.0, 6.0, 80):
            s = mat_exp(OMEGA @ h.mode_wise * t)
            sigma = s @ sigma0 @ s.T
            en = log_negativity(sigma)
            if en > 1e-9:
                pts.append((seralian(sigma), en, nu_minus_pt(sigma)))
        assert len(pts) > 20
        pts.sort()
        ens = [p[1] for p in pts]
        nus = [p[2] for p in pts]
        assert all(a <= b + 1e-12 for a, b in zip(ens, ens[1:]))
        assert all(a >= b - 1e-12 for a, b in zip(nus, nus[1:]))
