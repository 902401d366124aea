import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import eval_hermite

from conftest import phase_aligned_l2
from lctur import symplectic as sp
from lctur.errors import AliasingWarning, DimensionError, NotPure
from lctur.grid import GridSpec, density_moments, l2_distance
from lctur.lct import fourier_nd, lct_apply_fast
from lctur.states import (
    GaussianState,
    cat_wavefunction,
    correlated_gaussian,
    fock_wavefunction,
    gaussian_measurement_entropy,
    gaussian_wavefunction,
    hermite_functions,
    marginal_covariance,
    squeezed,
    vacuum,
)

HALF_LN_PI_E = 0.5 * math.log(math.pi * math.e)


class TestFactories:
    def test_vacuum(self):
        v = vacuum(1)
        np.testing.assert_array_equal(v.gamma, np.diag([0.5, 0.5]))
        np.testing.assert_array_equal(v.mean, [0.0, 0.0])
        assert v.is_pure() and v.is_admissible()

    def test_squeezed(self):
        s = 0.8
        g = squeezed(1, s).gamma
        np.testing.assert_allclose(g, np.diag([math.exp(-2 * s) / 2, math.exp(2 * s) / 2]), rtol=1e-15)
        assert np.linalg.det(g) == pytest.approx(0.25, rel=1e-14)

    @pytest.mark.parametrize("seed", range(20))
    def test_correlated_admissible_and_pure(self, seed):
        state = correlated_gaussian(2, seed)
        assert state.is_admissible()
        assert state.is_pure()

    def test_inadmissible(self):
        assert not GaussianState(np.zeros(2), np.diag([0.1, 0.1])).is_admissible()

    def test_round_trip(self):
        state = correlated_gaussian(2, 4)
        d = state.to_dict()
        assert d["N"] == 2 and len(d["gamma"]) == 16
        back = GaussianState.from_dict(d)
        np.testing.assert_array_equal(back.gamma, state.gamma)
        np.testing.assert_array_equal(back.mean, state.mean)


class TestMarginals:
    def test_vacuum_identity(self):
        np.testing.assert_allclose(marginal_covariance(vacuum(1), sp.identity(1), 1), [[0.5]])

    @pytest.mark.parametrize("theta", np.linspace(-3, 3, 13))
    def test_vacuum_rotation(self, theta):
        assert marginal_covariance(vacuum(1), sp.rotation(theta), 1)[0, 0] == pytest.approx(0.5, abs=1e-15)

    def test_squeezed_quarter_turn(self):
        s = 0.6
        assert marginal_covariance(squeezed(1, s), sp.rotation(np.pi / 2), 1)[0, 0] == pytest.approx(math.exp(2 * s) / 2, rel=1e-14)

    def test_dimension_errors(self):
        with pytest.raises(DimensionError):
            marginal_covariance(vacuum(2), sp.identity(1))
        with pytest.raises(DimensionError):
            marginal_covariance(vacuum(2), sp.identity(2), 3)

    def test_vacuum_entropy(self):
        h = gaussian_measurement_entropy(vacuum(1), sp.identity(1), 1)
        assert h == pytest.approx(1.0723649429247, abs=1e-12)

    def test_birula_sum(self):
        total = sum(gaussian_measurement_entropy(vacuum(1), S, 1) for S in (sp.identity(1), sp.fourier_form(1)))
        assert total == pytest.approx(math.log(math.pi * math.e), abs=1e-14)

    @pytest.mark.parametrize("s", [0.1, 0.5, 1.3])
    def test_squeezing_shifts_entropy(self, s):
        h0 = gaussian_measurement_entropy(vacuum(1), sp.identity(1))
        assert gaussian_measurement_entropy(squeezed(1, s), sp.identity(1)) - h0 == pytest.approx(-s, abs=1e-13)

    @given(st.floats(-10, 10, allow_nan=False), st.integers(1, 3))
    @settings(max_examples=50, deadline=None)
    def test_rotation_invariance(self, theta, N):
        h = gaussian_measurement_entropy(vacuum(N), sp.rotation(theta, N))
        assert h == pytest.approx(N * HALF_LN_PI_E, abs=1e-12)

    @given(st.integers(1, 3), st.integers(0, 2**31 - 1), st.integers(0, 2**31 - 1))
    @settings(max_examples=50, deadline=None)
    def test_purity_preservation(self, N, s1, s2):
        state = correlated_gaussian(N, s1)
        out = state.transformed(sp.random_symplectic(N, s2))
        assert abs(np.linalg.det(out.gamma) - np.linalg.det(state.gamma)) <= 1e-10


class TestGaussianWavefunction:
    def test_vacuum_closed_form(self, grid256):
        wf = gaussian_wavefunction(vacuum(1), grid256)
        x = grid256.axis(0)
        np.testing.assert_allclose(wf.amplitudes, np.pi**-0.25 * np.exp(-0.5 * x**2), atol=1e-15)

    def test_squeezed_variance(self):
        grid = GridSpec.symmetric(512, 12.0)
        s = 0.5
        mean, cov = density_moments(gaussian_wavefunction(squeezed(1, s), grid).density(), grid)
        assert cov[0, 0] == pytest.approx(math.exp(-2 * s) / 2, abs=1e-6)
        assert abs(mean[0]) <= 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_chirped_state_moments(self, seed):
        # position moments from the density, momentum moments from its Fourier transform
        grid = GridSpec.symmetric(512, 12.0)
        state = correlated_gaussian(1, seed)
        wf = gaussian_wavefunction(state, grid)
        mx, cx = density_moments(wf.density(), grid)
        ft = fourier_nd(wf)
        mp, cp = density_moments(ft.density(), ft.grid)
        assert abs(state.gamma[0, 1]) > 1e-3 or seed == 0
        np.testing.assert_allclose([mx[0], mp[0]], state.mean, atol=1e-6)
        np.testing.assert_allclose([cx[0, 0], cp[0, 0]], np.diag(state.gamma), atol=1e-6)

    def test_xp_correlation(self):
        # Re <x p> = <{x, p}>/2, with p = -i d/dx by finite differences
        grid = GridSpec.symmetric(1024, 12.0)
        state = correlated_gaussian(1, 3)
        wf = gaussian_wavefunction(state, grid)
        x, dx = grid.axis(0), grid.spacing[0]
        psi = wf.amplitudes
        dpsi = np.gradient(psi, dx)
        sym = np.sum(np.conj(psi) * x * (-1j) * dpsi).real * dx
        cov_xp = sym - state.mean[0] * state.mean[1]
        assert cov_xp == pytest.approx(state.gamma[0, 1], abs=1e-4)

    def test_mixed_state_rejected(self, grid256):
        with pytest.raises(NotPure):
            gaussian_wavefunction(GaussianState(np.zeros(2), np.eye(2)), grid256)

    def test_dimension_mismatch(self, grid256):
        with pytest.raises(DimensionError):
            gaussian_wavefunction(vacuum(2), grid256)

    @pytest.mark.parametrize("seed", range(4))
    def test_covariance_propagation_two_modes(self, seed):
        grid = GridSpec.symmetric(128, 10.0, n=2)
        state = correlated_gaussian(2, seed)
        S = sp.fourier_form(2) @ sp.chirp([[0.3, 0.2], [0.2, -0.4]]) @ sp.squeezer([0.2, -0.1])
        out = lct_apply_fast(gaussian_wavefunction(state, grid), S)
        _, cov = density_moments(out.density(), out.grid)
        np.testing.assert_allclose(cov, marginal_covariance(state, S), atol=1e-4)

    @pytest.mark.parametrize("seed", range(4))
    def test_covariance_propagation_one_mode(self, seed):
        grid = GridSpec.symmetric(512, 12.0)
        state = correlated_gaussian(1, seed)
        S = sp.random_symplectic(1, seed + 30, squeeze=0.3, shear=0.3)
        out = lct_apply_fast(gaussian_wavefunction(state, grid), S)
        _, cov = density_moments(out.density(), out.grid)
        assert cov[0, 0] == pytest.approx(marginal_covariance(state, S)[0, 0], abs=1e-4)


class TestFock:
    def test_hermite_functions_match_scipy(self):
        x = np.linspace(-6, 6, 101)
        psi = hermite_functions(10, x)
        for k in range(11):
            ref = eval_hermite(k, x) * np.exp(-(x**2) / 2) / math.sqrt(2.0**k * math.factorial(k) * math.sqrt(math.pi))
            np.testing.assert_allclose(psi[k], ref, atol=1e-12)

    def test_high_order_is_finite_and_normalized(self):
        x = np.linspace(-15, 15, 4001)
        psi = hermite_functions(40, x)
        assert np.all(np.isfinite(psi))
        assert np.sum(psi[40] ** 2) * (x[1] - x[0]) == pytest.approx(1.0, abs=1e-10)

    def test_ground_state_is_vacuum(self, grid256):
        x = grid256.axis(0)
        np.testing.assert_allclose(fock_wavefunction(0, grid256).amplitudes, np.pi**-0.25 * np.exp(-0.5 * x**2), atol=1e-15)

    def test_first_excited(self, grid256):
        wf = fock_wavefunction(1, grid256)
        x = grid256.axis(0)
        np.testing.assert_allclose(wf.amplitudes, -wf.amplitudes[::-1], atol=1e-15)
        np.testing.assert_allclose(wf.density(), 2 * x**2 * np.exp(-(x**2)) / math.sqrt(math.pi), atol=1e-15)
        odd = GridSpec.symmetric(255, 12.0)
        assert fock_wavefunction(1, odd).amplitudes[127] == 0
        assert wf.norm() == pytest.approx(1.0, abs=1e-12)

    def test_fock_is_fourier_eigenfunction(self, grid256):
        # F |k> = (-i)^k |k>
        for k in range(5):
            wf = fock_wavefunction(k, grid256)
            out = fourier_nd(wf)
            expected = (-1j) ** k * hermite_functions(k, out.grid.axis(0))[-1]
            assert l2_distance(out.amplitudes, expected, out.grid) <= 1e-8

    def test_product_on_two_axes(self):
        g = GridSpec.symmetric(64, 8.0, n=2)
        wf = fock_wavefunction((1, 2), g)
        X, Y = g.mesh()
        expected = hermite_functions(1, X)[-1] * hermite_functions(2, Y)[-1]
        np.testing.assert_allclose(wf.amplitudes, expected, atol=1e-15)

    def test_under_resolved_warns(self):
        with pytest.warns(AliasingWarning):
            fock_wavefunction(3, GridSpec.symmetric(64, 2.0))

    def test_negative_index(self, grid256):
        with pytest.raises(ValueError):
            fock_wavefunction(-1, grid256)


class TestCat:
    def test_zero_amplitude_is_vacuum(self, grid256):
        x = grid256.axis(0)
        np.testing.assert_allclose(cat_wavefunction(0.0, grid256).amplitudes, np.pi**-0.25 * np.exp(-0.5 * x**2), atol=1e-15)

    @pytest.mark.parametrize("alpha", [0.3, 1.0, 2.0, 1.5j, 1 + 1j])
    def test_normalized_and_even(self, grid256, alpha):
        wf = cat_wavefunction(alpha, grid256)
        assert wf.norm() == pytest.approx(1.0, abs=1e-10)
        np.testing.assert_allclose(wf.density(), wf.density()[::-1], atol=1e-14)

    def test_large_amplitude_is_two_peaks(self, grid256):
        wf = cat_wavefunction(3.0, grid256)
        x = grid256.axis(0)
        peaks = x[np.argsort(wf.density())[-2:]]
        np.testing.assert_allclose(np.sort(np.abs(peaks)), [3 * math.sqrt(2)] * 2, atol=grid256.spacing[0])

    def test_coherent_limit_phase_free(self, grid256):
        # far-separated cat equals the equal superposition of two coherent states
        from lctur.states import coherent_amplitudes

        x = grid256.axis(0)
        wf = cat_wavefunction(4.0, grid256)
        ref = (coherent_amplitudes(4.0, x) + coherent_amplitudes(-4.0, x)) / math.sqrt(2)
        assert phase_aligned_l2(wf.amplitudes, ref, grid256) <= 1e-12
