"""
Linear baselines: LMMSE filtering, diagonal LMMSE-EP and the matched-filter bound.
"""
import logging
from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve

from ..constellation import Constellation, demap_hard, symbols_to_bits
from ..denoiser import bayes_denoise
from ..channel import complex_normal
from ..exceptions import DetectorError
from .base import Algorithm, BaseDetector, DetectorConfig, DetectorRun, apply_damping
from .mfep import VARIANCE_FLOOR

logger = logging.getLogger('mpdetect.detectors.linear')


def lmmse_estimate(y: np.ndarray, A: np.ndarray, N0: float, Es: float) -> np.ndarray:
    """``Es A^H (Es A A^H + N0 I)^{-1} y``, solved in the smaller dimension."""
    N, M = A.shape
    AH = A.conj().T
    if N <= M:
        gram = Es * (A @ AH) + N0 * np.eye(N)
        return Es * (AH @ solve(gram, y, assume_a='pos'))
    gram = AH @ A + (N0 / Es) * np.eye(M)
    return solve(gram, AH @ y, assume_a='pos')


class LMMSEDetector(BaseDetector):
    """Linear MMSE filter followed by nearest-point decisions."""

    algorithm = Algorithm.LMMSE

    def detect(self, y, A, N0, x_true=None) -> DetectorRun:
        y, A = self._check_inputs(y, A, N0)
        x_hat = lmmse_estimate(y, A, N0, self.cons.energy)
        indices, _ = demap_hard(self.cons, x_hat)
        return DetectorRun(
            algorithm=self.algorithm,
            hard_indices=indices,
            hard_bits=self.cons.indices_to_bits(indices),
            soft_means=x_hat,
        )


def _posterior_diag(y, A, N0, lam, gam):
    """Mean and marginal variances of ``CN(mu, Sigma)`` with
    ``Sigma = (A^H A / N0 + diag(lam))^{-1}`` and ``mu = Sigma (A^H y / N0 + gam)``.
    """
    N, M = A.shape
    AH = A.conj().T
    rhs = AH @ y / N0 + gam
    if N >= M:
        factor = cho_factor(AH @ A / N0 + np.diag(lam))
        sigma = cho_solve(factor, np.eye(M))
    else:
        # Woodbury keeps the solve N x N
        d = 1.0 / lam
        AD = A * d
        inner = cho_factor(N0 * np.eye(N) + AD @ AH)
        sigma = np.diag(d) - AD.conj().T @ cho_solve(inner, AD)
    mu = sigma @ rhs
    return mu, np.real(np.diag(sigma)).copy()


class LMMSEEPDetector(BaseDetector):
    """Expectation propagation with a full LMMSE stage and diagonal Gaussian sites.

    Each symbol keeps a Gaussian site with precision ``lam`` and natural mean
    ``gam``. Sites start at the prior (``lam = 1/Es``, ``gam = 0``) and are
    refined by dividing the discrete posterior by the LMMSE cavity.
    """

    algorithm = Algorithm.LMMSE_EP

    def detect(self, y, A, N0, x_true=None) -> DetectorRun:
        y, A = self._check_inputs(y, A, N0)
        M = A.shape[1]
        cfg = self.cfg
        tx_bits = self._tx_bits(x_true)

        lam = np.full(M, 1.0 / self.cons.energy)
        gam = np.zeros(M, dtype=np.complex128)
        trace = []
        post = None

        for t in range(1, cfg.T + 1):
            mu, sigma2 = _posterior_diag(y, A, N0, lam, gam)
            cavity_var = sigma2 / (1.0 - sigma2 * lam)
            cavity_mean = cavity_var * (mu / sigma2 - gam)
            if np.any(cavity_var <= 0) or not np.all(np.isfinite(cavity_var)):
                raise DetectorError(f"lmmse_ep: nonpositive cavity variance at iteration {t}")
            self._guard(cavity_mean, t)

            post = bayes_denoise(self.cons, cavity_mean, cavity_var)
            self._record(trace, t, post.hard_indices(), tx_bits, xbar=cavity_mean, vbar=cavity_var)

            v_hat = np.maximum(post.var, VARIANCE_FLOOR)
            lam_new = 1.0 / v_hat - 1.0 / cavity_var
            gam_new = post.mean / v_hat - cavity_mean / cavity_var
            valid = lam_new > 0
            lam_new = np.where(valid, lam_new, lam)
            gam_new = np.where(valid, gam_new, gam)

            prev = (gam, lam) if t > 1 else (None, None)
            gam, lam = apply_damping(gam_new, lam_new, prev[0], prev[1], cfg.damping)

        return self._finish(post, trace)


def matched_filter_bound(y: np.ndarray, A: np.ndarray, x_true: np.ndarray, N0: float,
                         cons: Constellation) -> DetectorRun:
    """Single-user detection of every symbol after genie-aided interference cancellation.

    Raises:
        DetectorError: If a column of ``A`` has zero norm.
    """
    y, A = BaseDetector._check_inputs(y, A, N0)
    x_true = np.asarray(x_true, dtype=np.complex128)
    norms = np.sum(np.abs(A) ** 2, axis=0)
    if np.any(norms <= 0):
        raise DetectorError("Matched-filter bound undefined for a zero column")

    residual = y - A @ x_true
    y_tilde = residual[:, None] + A * x_true[None, :]
    z = np.sum(A.conj() * y_tilde, axis=0) / norms
    post = bayes_denoise(cons, z, N0 / norms)

    indices = post.hard_indices()
    return DetectorRun(
        algorithm=Algorithm.MFB,
        hard_indices=indices,
        hard_bits=cons.indices_to_bits(indices),
        soft_means=post.mean,
        soft_vars=post.var,
    )


def run_lmmse(y, A, N0, cons: Constellation) -> DetectorRun:
    return LMMSEDetector(cons, DetectorConfig(algorithm=Algorithm.LMMSE)).detect(y, A, N0)


def run_lmmse_ep(y, A, N0, cons: Constellation, cfg: DetectorConfig,
                 x_true_opt: Optional[np.ndarray] = None) -> DetectorRun:
    """Run LMMSE-EP with the plain denoiser; an annealing schedule in ``cfg`` is ignored."""
    return LMMSEEPDetector(cons, cfg).detect(y, A, N0, x_true_opt)


def run_mfb(A, x_true, N0, cons: Constellation, rng: np.random.Generator,
            y: Optional[np.ndarray] = None) -> int:
    """Bit errors of the matched-filter bound.

    Draws ``y = A x_true + w`` from ``rng`` unless an observation is given.
    """
    A = np.asarray(A, dtype=np.complex128)
    x_true = np.asarray(x_true, dtype=np.complex128)
    if y is None:
        y = A @ x_true + np.sqrt(N0) * complex_normal(rng, A.shape[0])
    run = matched_filter_bound(y, A, x_true, N0, cons)
    return run.bit_errors(symbols_to_bits(cons, x_true))
