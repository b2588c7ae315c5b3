"""
Tests for the correlated channel model and the observation draw
"""
import numpy as np
import pytest

from mpdetect.channel import (CorrelationSpec, complex_normal, correlate_rx, exp_correlation, make_observation,
                              matrix_sqrt, noise_power, sample_channel, trial_rng)
from mpdetect.exceptions import ChannelError


class TestExpCorrelation:

    def test_zero_rho_is_identity(self):
        assert np.array_equal(exp_correlation(CorrelationSpec(rho=0.0, n=5)), np.eye(5))

    def test_entries(self):
        R = exp_correlation(CorrelationSpec(rho=0.8, n=4))
        assert R[0, 2] == pytest.approx(0.64)
        assert R[3, 0] == pytest.approx(0.8 ** 3)
        assert np.allclose(np.diag(R), 1.0)

    @pytest.mark.parametrize("rho", [0.5, 0.9, 0.99])
    def test_positive_definite(self, rho):
        assert np.linalg.eigvalsh(exp_correlation(CorrelationSpec(rho=rho, n=64)))[0] > 0

    @pytest.mark.parametrize("rho,n", [(1.0, 4), (-0.1, 4), (0.5, 0)])
    def test_invalid(self, rho, n):
        with pytest.raises(ChannelError):
            exp_correlation(CorrelationSpec(rho=rho, n=n))


class TestMatrixSqrt:

    def test_diagonal(self):
        assert np.allclose(matrix_sqrt(np.diag([4.0, 1.0])), np.diag([2.0, 1.0]))

    def test_random_hermitian(self, rng):
        X = complex_normal(rng, (8, 8))
        R = X @ X.conj().T + 8 * np.eye(8)
        B = matrix_sqrt(R)
        assert np.allclose(B @ B.conj().T, R, atol=1e-10)
        assert np.allclose(B, B.conj().T, atol=1e-12)

    @pytest.mark.parametrize("R", [
        np.ones((2, 3)),
        np.array([[1.0, 2.0], [0.0, 1.0]]),
        np.diag([1.0, -1.0]),
        np.diag([1.0, 0.0]),
    ])
    def test_rejects_invalid(self, R):
        with pytest.raises(ChannelError):
            matrix_sqrt(R)


class TestSampleChannel:

    def test_shape_and_ratio(self, rng):
        ch = sample_channel(4, 8, 0.3, rng)
        assert ch.A.shape == (8, 4)
        assert ch.xi == 2.0

    def test_iid_power(self, rng):
        power = np.mean([np.mean(np.abs(sample_channel(16, 16, 0.0, rng).A) ** 2) for _ in range(400)])
        assert power == pytest.approx(1.0, abs=0.02)

    def test_circular(self, rng):
        entries = np.concatenate([sample_channel(16, 16, 0.0, rng).A.ravel() for _ in range(800)])
        assert abs(np.mean(entries ** 2)) < 0.02

    def test_receive_covariance(self, rng):
        M, N, rho = 16, 4, 0.8
        acc = np.zeros((N, N), dtype=np.complex128)
        draws = 10_000
        for _ in range(draws):
            A = sample_channel(M, N, rho, rng).A
            acc += A @ A.conj().T / M
        R = exp_correlation(CorrelationSpec(rho=rho, n=N))
        assert np.allclose(acc / draws, R, atol=0.02)

    def test_uncorrelated_rows_are_exchangeable(self, rng):
        M, N, draws = 8, 6, 2000
        A = np.stack([sample_channel(M, N, 0.0, rng).A for _ in range(draws)])
        assert np.all(np.abs(A.mean(axis=(0, 2))) < 0.05)
        row_power = np.mean(np.abs(A) ** 2, axis=(0, 2))
        assert np.allclose(row_power, 1.0, atol=0.05)
        C = np.einsum('dim,djm->ij', A, A.conj()) / (draws * M)
        perm = rng.permutation(N)
        assert np.allclose(C, C[np.ix_(perm, perm)], atol=0.05)

    def test_correlate_rx_identity_at_zero(self, rng):
        G = complex_normal(rng, (6, 3))
        assert correlate_rx(G, 0.0) is G

    def test_same_trial_same_channel(self):
        first = sample_channel(3, 5, 0.5, trial_rng(7, 3)).A
        again = sample_channel(3, 5, 0.5, trial_rng(7, 3)).A
        other = sample_channel(3, 5, 0.5, trial_rng(7, 4)).A
        assert np.array_equal(first, again)
        assert not np.allclose(first, other)

    @pytest.mark.parametrize("M,N,rho", [(0, 4, 0.0), (4, 0, 0.0), (4, 4, 1.0)])
    def test_invalid(self, rng, M, N, rho):
        with pytest.raises(ChannelError):
            sample_channel(M, N, rho, rng)

    def test_negative_seed(self):
        with pytest.raises(ChannelError):
            trial_rng(-1, 0)


class TestObservation:

    def test_noise_power(self):
        assert noise_power(1.0, 0.0) == pytest.approx(1.0)
        assert noise_power(1.0, 10.0) == pytest.approx(0.1)
        assert noise_power(2.0, -3.0) == pytest.approx(2.0 * 10 ** 0.3)

    def test_noiseless(self, qam16, rng):
        A = complex_normal(rng, (6, 4))
        obs, _ = make_observation(A, qam16, 4, 10.0, rng, noiseless=True)
        assert np.array_equal(obs.y, A @ obs.x_true)
        assert np.array_equal(qam16.points[obs.tx_indices], obs.x_true)

    def test_noise_variance(self, qam4, rng):
        A = np.zeros((10 ** 6, 1), dtype=np.complex128)
        obs, N0 = make_observation(A, qam4, 1, 3.0, rng)
        assert np.mean(np.abs(obs.y) ** 2) == pytest.approx(N0, rel=0.01)

    def test_unit_noise_is_scaled(self, qam4, rng):
        A = complex_normal(rng, (3, 2))
        unit = complex_normal(rng, 3)
        obs, N0 = make_observation(A, qam4, 2, 6.0, rng, unit_noise=unit)
        assert np.allclose(obs.w, np.sqrt(N0) * unit)

    def test_column_mismatch(self, qam4, rng):
        with pytest.raises(ChannelError):
            make_observation(np.ones((3, 2)), qam4, 3, 0.0, rng)

    def test_complex_normal_moments(self, rng):
        z = complex_normal(rng, 10 ** 6, variance=2.0)
        assert np.var(z.real) == pytest.approx(1.0, rel=0.02)
        assert np.var(z.imag) == pytest.approx(1.0, rel=0.02)
