"""
Message-passing expectation propagation (MF-EP).

The LE stage combines all N observations per symbol (no extrinsic
exclusion); the denoiser posterior is then turned back into per-edge
replicas by moment matching, which removes the contribution of ``y_n``
from the replica sent to edge (n, m).
"""
import logging
from typing import Optional

import numpy as np

from .. import diagnostics
from .base import (Algorithm, BaseDetector, DetectorConfig, DetectorRun, EdgeState,
                   TraceLevel, apply_damping)
from .gabp import _combine, interference_cancel

logger = logging.getLogger('mpdetect.detectors.mfep')

# floor on posterior variances entering the moment-matching step
VARIANCE_FLOOR = 1e-12


def moment_match(x_hat: np.ndarray, v_hat: np.ndarray, A: np.ndarray, y_tilde: np.ndarray,
                 psi: np.ndarray, prev_x: np.ndarray, prev_v: np.ndarray):
    """Cavity replicas of every edge from the per-symbol posterior.

    ``1/v_check = 1/v_hat - |a|^2/psi`` and
    ``x_check = v_check (x_hat/v_hat - a^* y_tilde / psi)``. Edges whose
    cavity precision is not positive keep their previous replica.

    Returns:
        Tuple of (x_check, v_check, number of edges kept from the previous iteration).
    """
    v_hat = np.maximum(v_hat, VARIANCE_FLOOR)
    prec = 1.0 / v_hat[None, :] - np.abs(A) ** 2 / psi
    mf = (x_hat / v_hat)[None, :] - A.conj() * y_tilde / psi

    valid = prec > 0
    x_check = np.where(valid, mf / np.where(valid, prec, 1.0), prev_x)
    v_check = np.where(valid, 1.0 / np.where(valid, prec, 1.0), prev_v)
    return x_check, v_check, int(np.count_nonzero(~valid))


class MFEPDetector(BaseDetector):
    """MF-EP detector, plain or with the annealed denoiser."""

    algorithm = Algorithm.MFEP

    def detect(self, y, A, N0, x_true=None) -> DetectorRun:
        y, A = self._check_inputs(y, A, N0)
        N, M = A.shape
        cfg = self.cfg
        tx_bits = self._tx_bits(x_true)
        abs2 = np.abs(A) ** 2

        x_check = np.zeros((N, M), dtype=np.complex128)
        v_check = np.full((N, M), self.cons.energy)
        prev_mean = prev_var = None
        trace = []
        post = None

        for t in range(1, cfg.T + 1):
            state = EdgeState(t=t, x_check=x_check, v_check=v_check)
            noise = None
            if cfg.trace_level is TraceLevel.FULL:
                noise = diagnostics.effective_noise(self.algorithm, state, y, A, t)

            y_tilde, psi = interference_cancel(y, A, abs2, N0, x_check, v_check)
            xbar, vbar = _combine((abs2 / psi).sum(axis=0), (A.conj() * y_tilde / psi).sum(axis=0))
            xbar, vbar = apply_damping(xbar, vbar, prev_mean, prev_var, cfg.damping, cfg.damp_variance)
            prev_mean, prev_var = xbar, vbar
            self._guard(xbar, t)

            post = self._denoise(xbar, vbar, t)
            self._record(trace, t, post.hard_indices(), tx_bits, xbar=xbar, vbar=vbar,
                         effective_noise=noise, psi=psi)

            x_check, v_check, kept = moment_match(post.mean, post.var, A, y_tilde, psi,
                                                  x_check, v_check)
            if kept:
                logger.debug(f"MF-EP iteration {t}: {kept} edges kept their previous replica")

        return self._finish(post, trace)


def run_mfep(y, A, N0, cons, cfg: DetectorConfig, x_true_opt: Optional[np.ndarray] = None) -> DetectorRun:
    """Run MF-EP; see :class:`MFEPDetector`."""
    return MFEPDetector(cons, cfg).detect(y, A, N0, x_true_opt)
