"""
Gaussian belief propagation (GaBP) on the dense factor graph of ``y = A x + w``.

Every observation/symbol pair (n, m) carries its own message. Self-noise is
suppressed by extrinsic combining: the belief sent to edge (n, m) combines
all observations except ``y_n``.
"""
import logging
from typing import NamedTuple, Optional

import numpy as np

from .. import diagnostics
from .base import (Algorithm, BaseDetector, DetectorConfig, DetectorRun, EdgeState,
                   TraceLevel, apply_damping)

logger = logging.getLogger('mpdetect.detectors.gabp')


class EdgeLEOutput(NamedTuple):
    y_tilde: np.ndarray
    psi: np.ndarray
    xbar_edge: np.ndarray
    vbar_edge: np.ndarray
    xbar: np.ndarray
    vbar: np.ndarray


def interference_cancel(y: np.ndarray, A: np.ndarray, abs2: np.ndarray, N0: float,
                        x_check: np.ndarray, v_check: np.ndarray):
    """Soft IC of every edge: residual ``y_tilde`` and its variance ``psi`` (N x M)."""
    ax = A * x_check
    y_tilde = y[:, None] - (ax.sum(axis=1, keepdims=True) - ax)
    av = abs2 * v_check
    psi = np.maximum(av.sum(axis=1, keepdims=True) - av, 0.0) + N0
    return y_tilde, psi


def _combine(prec: np.ndarray, mf: np.ndarray):
    """Gaussian combining in natural parameters; zero precision means no information."""
    informative = prec > 0
    var = np.full(prec.shape, np.inf)
    np.divide(1.0, prec, out=var, where=informative)
    mean = np.zeros(prec.shape, dtype=np.complex128)
    np.multiply(var, mf, out=mean, where=informative)
    return mean, var


def gabp_le(y: np.ndarray, A: np.ndarray, N0: float,
            x_check: np.ndarray, v_check: np.ndarray) -> EdgeLEOutput:
    """One LE stage of GaBP: IC, matched filtering and extrinsic combining.

    Returns the per-edge extrinsic beliefs and the per-symbol consensus
    beliefs that combine all N observations.
    """
    abs2 = np.abs(A) ** 2
    y_tilde, psi = interference_cancel(y, A, abs2, N0, x_check, v_check)

    prec = abs2 / psi
    mf = A.conj() * y_tilde / psi
    prec_sum = prec.sum(axis=0)
    mf_sum = mf.sum(axis=0)

    xbar_edge, vbar_edge = _combine(np.maximum(prec_sum - prec, 0.0), mf_sum - mf)
    xbar, vbar = _combine(prec_sum, mf_sum)
    return EdgeLEOutput(y_tilde, psi, xbar_edge, vbar_edge, xbar, vbar)


class GaBPDetector(BaseDetector):
    """GaBP detector, plain or with the annealed denoiser."""

    algorithm = Algorithm.GABP

    def detect(self, y, A, N0, x_true=None) -> DetectorRun:
        y, A = self._check_inputs(y, A, N0)
        N, M = A.shape
        cfg = self.cfg
        tx_bits = self._tx_bits(x_true)

        x_check = np.zeros((N, M), dtype=np.complex128)
        v_check = np.full((N, M), self.cons.energy)
        prev_mean = prev_var = None
        final_annealed = cfg.schedule is not None and cfg.final_annealed
        trace = []
        consensus = None

        for t in range(1, cfg.T + 1):
            state = EdgeState(t=t, x_check=x_check, v_check=v_check)
            noise = None
            if cfg.trace_level is TraceLevel.FULL:
                noise = diagnostics.effective_noise(self.algorithm, state, y, A, t)

            le = gabp_le(y, A, N0, x_check, v_check)
            state.y_tilde, state.psi = le.y_tilde, le.psi

            xbar_edge, vbar_edge = apply_damping(le.xbar_edge, le.vbar_edge, prev_mean, prev_var,
                                                 cfg.damping, cfg.damp_variance)
            prev_mean, prev_var = xbar_edge, vbar_edge
            self._guard(xbar_edge, t)
            self._guard(le.xbar, t)

            edge = self._denoise(xbar_edge, vbar_edge, t)
            x_check, v_check = edge.mean, edge.var

            consensus = self._denoise(le.xbar, le.vbar, t, annealed=final_annealed)
            self._record(trace, t, consensus.hard_indices(), tx_bits,
                         xbar=le.xbar, vbar=le.vbar, effective_noise=noise, psi=le.psi)

        logger.debug(f"GaBP finished {cfg.T} iterations on a {N}x{M} system")
        return self._finish(consensus, trace)


def run_gabp(y, A, N0, cons, cfg: DetectorConfig, x_true_opt: Optional[np.ndarray] = None) -> DetectorRun:
    """Run GaBP; see :class:`GaBPDetector`."""
    return GaBPDetector(cons, cfg).detect(y, A, N0, x_true_opt)
