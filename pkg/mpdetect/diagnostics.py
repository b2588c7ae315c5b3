"""
Belief diagnostics: effective-noise correlation across trials and
standardized belief-residual histograms.

Both accumulators are plain sums, so per-worker instances can be merged in
any grouping and finalized once.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np
from scipy.stats import norm

from .detectors.base import Algorithm, EdgeState, GampState
from .exceptions import DiagnosticsError

logger = logging.getLogger('mpdetect.diagnostics')

TAIL_SIGMAS = (3, 4, 5)
DEFAULT_HIST_RANGE = 8.05
DEFAULT_BIN_WIDTH = 0.1


def effective_noise(algorithm: Algorithm, state: Union[EdgeState, GampState],
                    y: np.ndarray, A: np.ndarray, t: int) -> np.ndarray:
    """Residual of ``y`` after interference cancellation with the iteration-``t`` replicas.

    GaBP / MF-EP: ``e_n = y_n - sum_m a_nm x_check_nm``.
    GAMP: ``e_n = y_n - sum_m a_nm x_check_m + gamma_n s_n``, with ``s`` from
    the previous iteration.

    Raises:
        DiagnosticsError: If the state does not match the algorithm's branch.
    """
    algorithm = Algorithm(algorithm)
    y = np.asarray(y)
    if algorithm in (Algorithm.GABP, Algorithm.MFEP):
        if not isinstance(state, EdgeState):
            raise DiagnosticsError(f"{algorithm.value} requires per-edge replicas")
        return y - np.sum(A * state.x_check, axis=1)
    if algorithm is Algorithm.GAMP:
        if not isinstance(state, GampState):
            raise DiagnosticsError("gamp requires per-symbol replicas with gamma and s")
        gamma = state.gamma if state.gamma is not None else np.abs(A) ** 2 @ state.v_check
        return y - A @ state.x_check + gamma * state.s_prev
    raise DiagnosticsError(f"No effective noise is defined for {algorithm.value} (iteration {t})")


@dataclass
class CorrAccumulator:
    """Streaming second moments of the effective noise of one snapshot iteration."""
    n: int
    t: Optional[int] = None
    cross_sums: np.ndarray = field(default=None)
    power_sums: np.ndarray = field(default=None)
    trial_count: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise DiagnosticsError(f"Accumulator dimension must be positive, got {self.n}")
        if self.cross_sums is None:
            self.cross_sums = np.zeros((self.n, self.n), dtype=np.complex128)
        if self.power_sums is None:
            self.power_sums = np.zeros(self.n)

    def accumulate(self, e: np.ndarray) -> 'CorrAccumulator':
        """Add one noise vector (shape (n,)) or a batch of them (shape (k, n))."""
        e = np.asarray(e, dtype=np.complex128)
        batch = e[None, :] if e.ndim == 1 else e
        if batch.ndim != 2 or batch.shape[1] != self.n:
            raise DiagnosticsError(f"Expected vectors of length {self.n}, got shape {e.shape}")
        self.cross_sums += batch.conj().T @ batch
        self.power_sums += np.sum(np.abs(batch) ** 2, axis=0)
        self.trial_count += batch.shape[0]
        return self

    def merge(self, other: 'CorrAccumulator') -> 'CorrAccumulator':
        if other.n != self.n:
            raise DiagnosticsError(f"Cannot merge accumulators of size {self.n} and {other.n}")
        return CorrAccumulator(
            n=self.n, t=self.t,
            cross_sums=self.cross_sums + other.cross_sums,
            power_sums=self.power_sums + other.power_sums,
            trial_count=self.trial_count + other.trial_count,
        )

    def finalize(self) -> np.ndarray:
        """Normalized correlation matrix with unit diagonal.

        Raises:
            DiagnosticsError: If nothing has been accumulated.
        """
        if self.trial_count == 0:
            raise DiagnosticsError("Cannot finalize an empty correlation accumulator")
        scale = np.sqrt(np.outer(self.power_sums, self.power_sums))
        gamma = np.divide(self.cross_sums, scale, out=np.zeros_like(self.cross_sums),
                          where=scale > 0)
        np.fill_diagonal(gamma, 1.0)
        return gamma


def accumulate(acc: CorrAccumulator, e: np.ndarray) -> CorrAccumulator:
    return acc.accumulate(e)


def finalize(acc: CorrAccumulator) -> np.ndarray:
    return acc.finalize()


def mean_offdiag_magnitude(gamma: np.ndarray) -> float:
    n = gamma.shape[0]
    if n < 2:
        return 0.0
    mask = ~np.eye(n, dtype=bool)
    return float(np.mean(np.abs(gamma[mask])))


def band_profile(gamma: np.ndarray) -> np.ndarray:
    """Average ``|Gamma_{i,i+k}|`` along the k-th superdiagonal, k = 0..n-1."""
    n = gamma.shape[0]
    return np.array([np.mean(np.abs(np.diagonal(gamma, offset=k))) for k in range(n)])


def default_bin_edges(half_range: float = DEFAULT_HIST_RANGE,
                      bin_width: float = DEFAULT_BIN_WIDTH) -> np.ndarray:
    """Symmetric edges with one bin centred on zero."""
    if half_range <= 0 or bin_width <= 0:
        raise DiagnosticsError("Histogram range and bin width must be positive")
    count = int(round(2 * half_range / bin_width))
    return np.linspace(-half_range, half_range, count + 1)


def standardized_residuals(xbar, vbar, x_true) -> np.ndarray:
    """Real and imaginary parts of ``(xbar - x) / sqrt(vbar / 2)``, pooled."""
    xbar = np.asarray(xbar, dtype=np.complex128)
    vbar = np.asarray(vbar, dtype=np.float64)
    if np.any(~(vbar > 0)):
        raise DiagnosticsError("Belief variances must be positive")
    scaled = (xbar - np.asarray(x_true)) / np.sqrt(vbar / 2.0)
    return np.concatenate([scaled.real.ravel(), scaled.imag.ravel()])


@dataclass(frozen=True)
class BeliefHistogram:
    bin_edges: np.ndarray
    density: np.ndarray
    ideal_overlay: np.ndarray
    tail_counts: Dict[int, int]
    total: int

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    def tail_fraction(self, k: int) -> float:
        return self.tail_counts[k] / self.total if self.total else 0.0


@dataclass
class ResidualAccumulator:
    """Histogram counts over fixed edges; samples outside the edges only enter the tail counts."""
    bin_edges: np.ndarray = field(default_factory=default_bin_edges)
    counts: np.ndarray = field(default=None)
    tail_counts: Dict[int, int] = field(default_factory=lambda: {k: 0 for k in TAIL_SIGMAS})
    total: int = 0

    def __post_init__(self):
        self.bin_edges = np.asarray(self.bin_edges, dtype=np.float64)
        if self.bin_edges.ndim != 1 or self.bin_edges.size < 2 or np.any(np.diff(self.bin_edges) <= 0):
            raise DiagnosticsError("Bin edges must be a strictly increasing vector")
        if self.counts is None:
            self.counts = np.zeros(self.bin_edges.size - 1, dtype=np.int64)

    def add(self, residuals: np.ndarray) -> 'ResidualAccumulator':
        residuals = np.asarray(residuals, dtype=np.float64).ravel()
        counts, _ = np.histogram(residuals, bins=self.bin_edges)
        self.counts += counts
        magnitude = np.abs(residuals)
        for k in TAIL_SIGMAS:
            self.tail_counts[k] += int(np.count_nonzero(magnitude > k))
        self.total += residuals.size
        return self

    def add_beliefs(self, xbar, vbar, x_true) -> 'ResidualAccumulator':
        return self.add(standardized_residuals(xbar, vbar, x_true))

    def merge(self, other: 'ResidualAccumulator') -> 'ResidualAccumulator':
        if not np.array_equal(self.bin_edges, other.bin_edges):
            raise DiagnosticsError("Cannot merge histograms with different bin edges")
        return ResidualAccumulator(
            bin_edges=self.bin_edges,
            counts=self.counts + other.counts,
            tail_counts={k: self.tail_counts[k] + other.tail_counts[k] for k in TAIL_SIGMAS},
            total=self.total + other.total,
        )

    def to_histogram(self) -> BeliefHistogram:
        if self.total == 0:
            raise DiagnosticsError("Cannot build a histogram from zero residuals")
        widths = np.diff(self.bin_edges)
        # normalized by the samples inside the edges so the density integrates to one
        inside = self.counts.sum()
        density = self.counts / (inside * widths) if inside else np.zeros_like(widths)
        centers = 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])
        return BeliefHistogram(
            bin_edges=self.bin_edges.copy(),
            density=density,
            ideal_overlay=norm.pdf(centers),
            tail_counts=dict(self.tail_counts),
            total=self.total,
        )


def belief_residual_histogram(xbar, vbar, x_true,
                              bins: Optional[Sequence[float]] = None) -> BeliefHistogram:
    """Normalized histogram of standardized belief residuals with a standard normal overlay.

    Raises:
        DiagnosticsError: If any ``vbar`` is not positive.
    """
    acc = ResidualAccumulator() if bins is None else ResidualAccumulator(bin_edges=np.asarray(bins))
    return acc.add_beliefs(xbar, vbar, x_true).to_histogram()
