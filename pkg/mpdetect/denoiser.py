"""
Bayes-optimal discrete denoiser and its annealed variant.

Both treat the input as a virtual AWGN observation ``y = x + n`` with
``n ~ CN(0, v)`` and return the posterior mean and variance of ``x`` under
the constellation prior. The annealed denoiser replaces ``v`` by an inverse
temperature ``1 / beta`` that follows a fixed schedule over the iterations.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import softmax

from .constellation import Constellation
from .exceptions import DenoiserError

logger = logging.getLogger('mpdetect.denoiser')

DEFAULT_D1 = 3.0
DEFAULT_D2 = 2.0


@dataclass(frozen=True)
class DenoiseResult:
    """Posterior moments of a denoise call.

    Attributes:
        mean: Posterior mean (soft replica), same shape as the input.
        var: Posterior variance, nonnegative.
        weights: Posterior probabilities of every point, shape (..., Q).
    """
    mean: np.ndarray
    var: np.ndarray
    weights: np.ndarray

    def hard_indices(self) -> np.ndarray:
        """Index of the most probable point (lowest index on ties)."""
        return np.argmax(self.weights, axis=-1)


@dataclass(frozen=True)
class AnnealSchedule:
    """Inverse-temperature schedule beta(t) = (d1 / c^2) (t / T)^d2."""
    d1: float
    d2: float
    T: int
    c_sq: float

    def __post_init__(self):
        if not (self.d1 > 0 and self.d2 > 0 and self.c_sq > 0):
            raise DenoiserError(
                f"Schedule parameters must be positive (d1={self.d1}, d2={self.d2}, c^2={self.c_sq})"
            )
        if int(self.T) != self.T or self.T < 1:
            raise DenoiserError(f"Schedule length T must be a positive integer, got {self.T}")

    @classmethod
    def for_constellation(cls, cons: Constellation, T: int,
                          d1: float = DEFAULT_D1, d2: float = DEFAULT_D2) -> 'AnnealSchedule':
        return cls(d1=d1, d2=d2, T=T, c_sq=cons.c_sq)


def _posterior(cons: Constellation, y, v) -> DenoiseResult:
    y = np.asarray(y, dtype=np.complex128)
    v = np.asarray(v, dtype=np.float64)
    if np.any(np.isnan(y)) or np.any(np.isnan(v)):
        raise DenoiserError("Denoiser input contains NaN")
    if np.any(np.isinf(y)):
        raise DenoiserError("Denoiser input must be finite")
    if np.any(v <= 0):
        raise DenoiserError("Denoiser variance must be positive")

    distance = np.abs(y[..., None] - cons.points) ** 2
    # v = inf leaves only the prior
    alpha = cons.log_probs - distance / v[..., None]
    # softmax subtracts the per-row maximum before exponentiating
    weights = softmax(alpha, axis=-1)

    mean = weights @ cons.points
    second = weights @ (np.abs(cons.points) ** 2)
    var = np.maximum(second - np.abs(mean) ** 2, 0.0)
    return DenoiseResult(mean=mean, var=var, weights=weights)


def bayes_denoise(cons: Constellation, y, v) -> DenoiseResult:
    """Posterior mean and variance of a constellation symbol seen in AWGN.

    Args:
        cons: Prior constellation.
        y: Observation(s), complex scalar or array.
        v: Noise variance(s), broadcastable against ``y``; must be positive.
            ``np.inf`` yields the prior moments.

    Returns:
        DenoiseResult with ``mean = sum_q chi_q zeta(alpha_q)`` and
        ``var = sum_q |chi_q|^2 zeta(alpha_q) - |mean|^2`` where
        ``alpha_q = ln P[chi_q] - |y - chi_q|^2 / v``.

    Raises:
        DenoiserError: If ``v <= 0`` or an input is NaN.
    """
    return _posterior(cons, y, v)


def annealed_denoise(cons: Constellation, y, beta) -> DenoiseResult:
    """Denoiser driven by an inverse temperature instead of a variance.

    Identical to ``bayes_denoise(cons, y, 1 / beta)``.

    Raises:
        DenoiserError: If ``beta <= 0``.
    """
    beta = np.asarray(beta, dtype=np.float64)
    if np.any(np.isnan(beta)) or np.any(beta <= 0):
        raise DenoiserError("Inverse temperature beta must be positive")
    return _posterior(cons, y, 1.0 / beta)


def beta_at(sched: AnnealSchedule, t: int) -> float:
    """Inverse temperature at iteration ``t`` (1-based).

    Raises:
        DenoiserError: If ``t`` is outside ``1..T``.
    """
    if not 1 <= t <= sched.T:
        raise DenoiserError(f"Iteration {t} outside schedule range 1..{sched.T}")
    return (sched.d1 / sched.c_sq) * (t / sched.T) ** sched.d2


def denoiser_curve(cons: Constellation, c_sq_beta: float, re_y: np.ndarray) -> np.ndarray:
    """Real part of the annealed denoiser output along the real axis.

    Args:
        cons: Prior constellation.
        c_sq_beta: Normalised inverse temperature ``c^2 * beta``.
        re_y: Real input values.

    Returns:
        Re[eta_beta(re_y; 1/beta)] for each input.
    """
    beta = c_sq_beta / cons.c_sq
    return annealed_denoise(cons, np.asarray(re_y, dtype=np.float64) + 0j, beta).mean.real
