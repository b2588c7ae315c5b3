"""
Base detector classes and the types shared by every detector.
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from ..constellation import Constellation, symbols_to_bits
from ..denoiser import AnnealSchedule, DenoiseResult, annealed_denoise, bayes_denoise, beta_at
from ..exceptions import BeliefDivergenceError, DetectorError

logger = logging.getLogger('mpdetect.detectors')

# |xbar| beyond this multiple of sqrt(Es) counts as divergence
DIVERGENCE_FACTOR = 1e6


class Algorithm(str, Enum):
    GABP = "gabp"
    MFEP = "mfep"
    GAMP = "gamp"
    LMMSE = "lmmse"
    LMMSE_EP = "lmmse_ep"
    MFB = "mfb"

    @property
    def is_message_passing(self) -> bool:
        return self in (Algorithm.GABP, Algorithm.MFEP, Algorithm.GAMP)

    @property
    def is_iterative(self) -> bool:
        return self.is_message_passing or self is Algorithm.LMMSE_EP


class DenoiserMode(str, Enum):
    PLAIN = "plain"
    ANNEALED = "annealed"


class TraceLevel(str, Enum):
    NONE = "none"
    BER_ONLY = "ber_only"
    FULL = "full"


@dataclass(frozen=True)
class DetectorConfig:
    """Settings of one detector run.

    Attributes:
        algorithm: Which detector to run.
        T: Number of iterations.
        damping: Damping factor delta in (0, 1]; 1 disables damping.
        schedule: Annealing schedule; None selects the plain Bayes denoiser.
        trace_level: How much per-iteration information to keep.
        final_annealed: GaBP consensus decision uses beta(T) instead of the
            plain denoiser when annealing is on.
        damp_variance: Damp LE output variances as well as means.
    """
    algorithm: Algorithm
    T: int = 64
    damping: float = 0.5
    schedule: Optional[AnnealSchedule] = None
    trace_level: TraceLevel = TraceLevel.NONE
    final_annealed: bool = True
    damp_variance: bool = True

    def __post_init__(self):
        if int(self.T) != self.T or self.T < 1:
            raise DetectorError(f"Iteration count T must be a positive integer, got {self.T}")
        if not 0.0 < self.damping <= 1.0:
            raise DetectorError(f"Damping factor must lie in (0, 1], got {self.damping}")
        if self.schedule is not None and self.schedule.T != self.T:
            raise DetectorError(f"Schedule length {self.schedule.T} does not match T={self.T}")

    @property
    def denoiser_mode(self) -> DenoiserMode:
        return DenoiserMode.PLAIN if self.schedule is None else DenoiserMode.ANNEALED


@dataclass
class IterationRecord:
    """What a detector looked like after iteration ``t``."""
    t: int
    bit_errors: Optional[int] = None
    bits: Optional[int] = None
    xbar: Optional[np.ndarray] = None
    vbar: Optional[np.ndarray] = None
    effective_noise: Optional[np.ndarray] = None
    psi: Optional[np.ndarray] = None

    @property
    def ber(self) -> Optional[float]:
        if self.bit_errors is None or not self.bits:
            return None
        return self.bit_errors / self.bits


@dataclass
class DetectorRun:
    """Final estimates of a detector plus its optional trace."""
    algorithm: Algorithm
    hard_indices: np.ndarray
    hard_bits: np.ndarray
    soft_means: np.ndarray
    soft_vars: Optional[np.ndarray] = None
    trace: List[IterationRecord] = field(default_factory=list)

    def bit_errors(self, tx_bits: np.ndarray) -> int:
        return int(np.count_nonzero(self.hard_bits != tx_bits))


@dataclass
class EdgeState:
    """Per-edge messages of GaBP and MF-EP at the start of iteration ``t``.

    ``x_check``/``v_check`` are the soft replicas fed to the IC stage;
    ``y_tilde``/``psi`` are the IC outputs of iteration ``t``. MF-EP also
    keeps its per-symbol denoiser outputs in ``x_hat``/``v_hat``.
    """
    t: int
    x_check: np.ndarray
    v_check: np.ndarray
    y_tilde: Optional[np.ndarray] = None
    psi: Optional[np.ndarray] = None
    x_hat: Optional[np.ndarray] = None
    v_hat: Optional[np.ndarray] = None


@dataclass
class GampState:
    """Per-symbol / per-observation quantities of GAMP at iteration ``t``."""
    t: int
    x_check: np.ndarray
    v_check: np.ndarray
    s_prev: np.ndarray
    gamma: Optional[np.ndarray] = None
    p: Optional[np.ndarray] = None
    psi: Optional[np.ndarray] = None
    xbar: Optional[np.ndarray] = None
    vbar: Optional[np.ndarray] = None


def apply_damping(new_mean, new_var, prev_mean, prev_var, delta: float,
                  damp_variance: bool = True) -> Tuple[np.ndarray, np.ndarray]:
    """Linear damping of LE outputs.

    Returns the new values unchanged when there is no previous value
    (first iteration) or ``delta == 1``.

    Raises:
        DetectorError: If ``delta`` is outside (0, 1].
    """
    if not 0.0 < delta <= 1.0:
        raise DetectorError(f"Damping factor must lie in (0, 1], got {delta}")
    if prev_mean is None or delta == 1.0:
        return new_mean, new_var
    # prev + delta * (new - prev) leaves a fixed point exactly unchanged
    mean = prev_mean + delta * (new_mean - prev_mean)
    var = prev_var + delta * (new_var - prev_var) if damp_variance else new_var
    return mean, var


class BaseDetector(ABC):
    """Abstract base class for detectors."""

    algorithm: Algorithm

    def __init__(self, cons: Constellation, cfg: DetectorConfig):
        self.cons = cons
        self.cfg = cfg

    @abstractmethod
    def detect(self, y: np.ndarray, A: np.ndarray, N0: float,
               x_true: Optional[np.ndarray] = None) -> DetectorRun:
        """Estimate the transmitted symbols.

        Args:
            y: Observation vector, shape (N,).
            A: Measurement matrix, shape (N, M).
            N0: Noise power.
            x_true: True symbols; only used to trace per-iteration BER.

        Returns:
            DetectorRun with hard decisions, soft means and the trace.
        """
        pass

    @staticmethod
    def _check_inputs(y, A, N0) -> Tuple[np.ndarray, np.ndarray]:
        y = np.asarray(y, dtype=np.complex128).reshape(-1)
        A = np.asarray(A, dtype=np.complex128)
        if A.ndim != 2 or A.shape[0] != y.shape[0]:
            raise DetectorError(f"Inconsistent dimensions: y has {y.shape[0]} entries, A is {A.shape}")
        if not N0 > 0:
            raise DetectorError(f"Noise power must be positive, got {N0}")
        return y, A

    def _denoise(self, xbar, vbar, t: int, annealed: Optional[bool] = None) -> DenoiseResult:
        """Run the configured denoiser for iteration ``t``."""
        if annealed is None:
            annealed = self.cfg.schedule is not None
        if annealed:
            return annealed_denoise(self.cons, xbar, beta_at(self.cfg.schedule, t))
        return bayes_denoise(self.cons, xbar, vbar)

    def _guard(self, xbar: np.ndarray, t: int) -> None:
        limit = DIVERGENCE_FACTOR * np.sqrt(self.cons.energy)
        if not np.all(np.isfinite(xbar)) or np.any(np.abs(xbar) > limit):
            raise BeliefDivergenceError(
                f"{self.algorithm.value}: beliefs diverged at iteration {t}",
                algorithm=self.algorithm, iteration=t,
            )

    def _tx_bits(self, x_true) -> Optional[np.ndarray]:
        if x_true is None or self.cfg.trace_level is TraceLevel.NONE:
            return None
        return symbols_to_bits(self.cons, np.asarray(x_true))

    def _record(self, trace: List[IterationRecord], t: int, hard_indices: np.ndarray,
                tx_bits: Optional[np.ndarray], xbar=None, vbar=None, effective_noise=None,
                psi=None) -> None:
        level = self.cfg.trace_level
        if level is TraceLevel.NONE:
            return
        record = IterationRecord(t=t)
        if tx_bits is not None:
            bits = self.cons.indices_to_bits(hard_indices)
            record.bit_errors = int(np.count_nonzero(bits != tx_bits))
            record.bits = int(tx_bits.size)
        if level is TraceLevel.FULL:
            record.xbar = np.array(xbar, copy=True) if xbar is not None else None
            record.vbar = np.array(vbar, copy=True) if vbar is not None else None
            record.effective_noise = effective_noise
            record.psi = np.array(psi, copy=True) if psi is not None else None
        trace.append(record)

    def _finish(self, result: DenoiseResult, trace: List[IterationRecord]) -> DetectorRun:
        indices = result.hard_indices()
        return DetectorRun(
            algorithm=self.algorithm,
            hard_indices=indices,
            hard_bits=self.cons.indices_to_bits(indices),
            soft_means=result.mean,
            soft_vars=result.var,
            trace=trace,
        )
