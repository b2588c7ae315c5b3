"""
Generalized approximate message passing (GAMP).

Large-system approximation of GaBP that keeps only per-symbol and
per-observation quantities; the Onsager term in ``p`` replaces the
extrinsic exclusion of the edge-wise algorithm.
"""
import logging
from typing import Optional

import numpy as np

from .. import diagnostics
from .base import (Algorithm, BaseDetector, DetectorConfig, DetectorRun, GampState,
                   TraceLevel, apply_damping)

logger = logging.getLogger('mpdetect.detectors.gamp')


def gamp_le(y: np.ndarray, A: np.ndarray, abs2: np.ndarray, N0: float, state: GampState):
    """Output and input linear steps of one GAMP iteration.

    Fills ``gamma``, ``p``, ``psi``, ``xbar`` and ``vbar`` of ``state`` and
    returns the new residual ``s``.
    """
    gamma = abs2 @ state.v_check
    p = A @ state.x_check - gamma * state.s_prev
    psi = gamma + N0
    s = (y - p) / psi

    vbar = 1.0 / (abs2.T @ (1.0 / psi))
    xbar = state.x_check + vbar * (A.conj().T @ s)

    state.gamma, state.p, state.psi = gamma, p, psi
    state.xbar, state.vbar = xbar, vbar
    return s


class GAMPDetector(BaseDetector):
    """GAMP detector, plain or with the annealed denoiser."""

    algorithm = Algorithm.GAMP

    def detect(self, y, A, N0, x_true=None) -> DetectorRun:
        y, A = self._check_inputs(y, A, N0)
        N, M = A.shape
        cfg = self.cfg
        tx_bits = self._tx_bits(x_true)
        abs2 = np.abs(A) ** 2

        x_check = np.zeros(M, dtype=np.complex128)
        v_check = np.full(M, self.cons.energy)
        s = np.zeros(N, dtype=np.complex128)
        prev_mean = prev_var = None
        trace = []
        post = None

        for t in range(1, cfg.T + 1):
            state = GampState(t=t, x_check=x_check, v_check=v_check, s_prev=s)
            s = gamp_le(y, A, abs2, N0, state)

            noise = None
            if cfg.trace_level is TraceLevel.FULL:
                noise = diagnostics.effective_noise(self.algorithm, state, y, A, t)

            xbar, vbar = apply_damping(state.xbar, state.vbar, prev_mean, prev_var,
                                       cfg.damping, cfg.damp_variance)
            prev_mean, prev_var = xbar, vbar
            self._guard(xbar, t)

            post = self._denoise(xbar, vbar, t)
            x_check, v_check = post.mean, post.var
            self._record(trace, t, post.hard_indices(), tx_bits, xbar=xbar, vbar=vbar,
                         effective_noise=noise, psi=state.psi)

        logger.debug(f"GAMP finished {cfg.T} iterations on a {N}x{M} system")
        return self._finish(post, trace)


def run_gamp(y, A, N0, cons, cfg: DetectorConfig, x_true_opt: Optional[np.ndarray] = None) -> DetectorRun:
    """Run GAMP; see :class:`GAMPDetector`."""
    return GAMPDetector(cons, cfg).detect(y, A, N0, x_true_opt)
