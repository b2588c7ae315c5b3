"""
Tests for the Bayes and annealed discrete denoisers
"""
import numpy as np
import pytest

from mpdetect.constellation import make_qam
from mpdetect.denoiser import (AnnealSchedule, annealed_denoise, bayes_denoise, beta_at, denoiser_curve)
from mpdetect.exceptions import DenoiserError


def wirtinger_derivative(cons, y, v, h):
    """Central-difference estimate of d eta / d y."""
    def eta(z):
        return bayes_denoise(cons, z, v).mean
    d_re = (eta(y + h) - eta(y - h)) / (2 * h)
    d_im = (eta(y + 1j * h) - eta(y - 1j * h)) / (2 * h)
    return 0.5 * (d_re - 1j * d_im)


class TestBayesDenoise:

    @pytest.mark.parametrize("Q", [4, 16, 64])
    def test_variance_is_scaled_derivative(self, Q, rng):
        cons = make_qam(Q)
        bound = cons.max_amplitude + 0.5
        for _ in range(200):
            y = rng.uniform(-bound, bound) + 1j * rng.uniform(-bound, bound)
            v = rng.uniform(0.05, 2.0)
            res = bayes_denoise(cons, y, v)
            derivative = wirtinger_derivative(cons, y, v, 1e-5 * np.sqrt(v))
            assert abs(v * derivative - res.var) <= 1e-5 * cons.energy

    def test_qam4_closed_form(self, qam4, rng):
        c = qam4.scale
        y = rng.normal(size=50) + 1j * rng.normal(size=50)
        v = 0.7
        res = bayes_denoise(qam4, y, v)
        expected = c * np.tanh(2 * c * y.real / v) + 1j * c * np.tanh(2 * c * y.imag / v)
        assert np.allclose(res.mean, expected, atol=1e-12)
        assert np.allclose(res.var, 2 * c ** 2 - np.abs(expected) ** 2, atol=1e-12)

    def test_weights_are_a_distribution(self, qam16, rng):
        res = bayes_denoise(qam16, rng.normal(size=(3, 7)) + 0j, 0.3)
        assert res.weights.shape == (3, 7, 16)
        assert np.allclose(res.weights.sum(axis=-1), 1.0)
        assert np.all(res.var >= 0)

    @pytest.mark.parametrize("Q", [4, 16, 64])
    def test_mean_stays_in_convex_hull(self, Q, rng):
        cons = make_qam(Q)
        y = 10 * (rng.normal(size=500) + 1j * rng.normal(size=500))
        res = bayes_denoise(cons, y, rng.uniform(1e-3, 5, size=500))
        assert np.all(np.abs(res.mean.real) <= cons.max_amplitude + 1e-12)
        assert np.all(np.abs(res.mean.imag) <= cons.max_amplitude + 1e-12)

    def test_infinite_variance_gives_prior(self, qam16):
        res = bayes_denoise(qam16, 0.4 - 0.1j, np.inf)
        assert abs(res.mean) == pytest.approx(0.0, abs=1e-12)
        assert res.var == pytest.approx(qam16.energy)

    def test_vanishing_variance_picks_nearest_point(self, qam16):
        target = qam16.points[5]
        res = bayes_denoise(qam16, target + 0.1 * qam16.scale, 1e-200)
        assert res.mean == pytest.approx(target, abs=1e-15)
        assert res.var == pytest.approx(0.0, abs=1e-15)
        assert int(res.hard_indices()) == 5

    @pytest.mark.parametrize("v", [0.0, -1.0, np.nan])
    def test_invalid_variance(self, qam4, v):
        with pytest.raises(DenoiserError):
            bayes_denoise(qam4, 0.1 + 0.1j, v)

    def test_nan_input(self, qam4):
        with pytest.raises(DenoiserError):
            bayes_denoise(qam4, np.nan + 0j, 1.0)


class TestAnnealedDenoise:

    def test_equals_bayes_at_inverse_temperature(self, qam16, rng):
        y = rng.normal(size=20) + 1j * rng.normal(size=20)
        beta = 3.7
        annealed = annealed_denoise(qam16, y, beta)
        plain = bayes_denoise(qam16, y, 1.0 / beta)
        assert np.array_equal(annealed.mean, plain.mean)
        assert np.array_equal(annealed.var, plain.var)

    def test_cold_start_returns_prior(self, qam16):
        res = annealed_denoise(qam16, 0.9 + 0.3j, 1e-12)
        assert abs(res.mean) == pytest.approx(0.0, abs=1e-9)
        assert res.var == pytest.approx(qam16.energy, rel=1e-6)

    def test_sharpens_with_beta(self, qam4):
        c = qam4.scale
        y = 0.3 * c - 0.2j * c
        magnitudes = [abs(annealed_denoise(qam4, y, b / qam4.c_sq).mean) for b in np.linspace(0.05, 10, 40)]
        assert np.all(np.diff(magnitudes) >= 0)

    def test_hot_curve_is_near_hard_decision(self, qam4):
        c = qam4.scale
        re_y = np.concatenate([np.linspace(1.5 * c, 2 * c, 20), -np.linspace(1.5 * c, 2 * c, 20)])
        curve = denoiser_curve(qam4, 5.0, re_y)
        assert np.all(np.abs(curve - np.sign(re_y) * c) < 0.05 * c)

    @pytest.mark.parametrize("Q", [16, 64])
    def test_curve_is_monotone(self, Q):
        cons = make_qam(Q)
        re_y = np.linspace(-cons.max_amplitude - 1, cons.max_amplitude + 1, 301)
        for c_sq_beta in (0.2, 1.0, 5.0):
            assert np.all(np.diff(denoiser_curve(cons, c_sq_beta, re_y)) >= -1e-12)

    def test_invalid_beta(self, qam4):
        with pytest.raises(DenoiserError):
            annealed_denoise(qam4, 0.0, 0.0)


class TestAnnealSchedule:

    def test_end_points(self, qam16):
        sched = AnnealSchedule.for_constellation(qam16, T=10)
        assert beta_at(sched, 10) == pytest.approx(3.0 / qam16.c_sq)
        assert beta_at(sched, 5) == pytest.approx(3.0 / (4 * qam16.c_sq))

    def test_strictly_increasing(self, qam4):
        sched = AnnealSchedule.for_constellation(qam4, T=25)
        betas = [beta_at(sched, t) for t in range(1, 26)]
        assert np.all(np.diff(betas) > 0)

    @pytest.mark.parametrize("t", [0, 11])
    def test_out_of_range(self, qam4, t):
        sched = AnnealSchedule.for_constellation(qam4, T=10)
        with pytest.raises(DenoiserError):
            beta_at(sched, t)

    @pytest.mark.parametrize("kwargs", [
        {'d1': 0.0, 'd2': 2.0, 'T': 5, 'c_sq': 0.1},
        {'d1': 3.0, 'd2': -1.0, 'T': 5, 'c_sq': 0.1},
        {'d1': 3.0, 'd2': 2.0, 'T': 0, 'c_sq': 0.1},
    ])
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(DenoiserError):
            AnnealSchedule(**kwargs)
