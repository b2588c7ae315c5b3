"""
Correlated MU-MIMO measurement model.

The measurement matrix follows the Kronecker model with receive-side
exponential correlation and no transmit correlation:
``A = R_rx^{1/2} G`` with ``G`` i.i.d. CN(0, 1). Observations are
``y = A x + w`` with ``w ~ CN(0, N0 I)``.
"""
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import eigh, toeplitz

from .constellation import Constellation
from .exceptions import ChannelError

logger = logging.getLogger('mpdetect.channel')

PD_TOLERANCE = 1e-12


@dataclass(frozen=True)
class CorrelationSpec:
    """Exponential receive correlation of ``n`` antennas with coefficient ``rho``."""
    rho: float
    n: int


@dataclass
class ChannelRealization:
    """One draw of the measurement matrix.

    Attributes:
        A: Complex N x M measurement matrix.
        M: Number of unknowns (transmit streams).
        N: Number of observations (receive antennas).
        rho: Receive correlation coefficient used to draw ``A``.
        N0: Noise power, attached once an observation is made.
    """
    A: np.ndarray
    M: int
    N: int
    rho: float
    N0: Optional[float] = None

    @property
    def xi(self) -> float:
        """Compression ratio N / M."""
        return self.N / self.M


@dataclass
class Observation:
    """Noisy linear measurement ``y = A x_true + w``."""
    y: np.ndarray
    x_true: np.ndarray
    w: np.ndarray
    tx_indices: np.ndarray = field(default=None)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based generator keyed by (master seed, trial index).

    The stream of a trial does not depend on which worker runs it or when.
    """
    if seed < 0 or trial_index < 0:
        raise ChannelError(f"Seed and trial index must be non-negative, got ({seed}, {trial_index})")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial_index)])))


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples with the given variance.

    Real and imaginary parts are independent N(0, variance / 2).
    """
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def exp_correlation(spec: CorrelationSpec) -> np.ndarray:
    """Exponential correlation matrix ``[R]_ij = rho^|i-j|``.

    Raises:
        ChannelError: If ``rho`` is outside [0, 1) or ``n < 1``.
    """
    if not 0.0 <= spec.rho < 1.0:
        raise ChannelError(f"Correlation coefficient must lie in [0, 1), got {spec.rho}")
    if spec.n < 1:
        raise ChannelError(f"Correlation dimension must be positive, got {spec.n}")
    return toeplitz(spec.rho ** np.arange(spec.n))


def matrix_sqrt(R: np.ndarray) -> np.ndarray:
    """Hermitian square root ``B`` of a Hermitian positive definite ``R`` (``B B^H = R``).

    Raises:
        ChannelError: If ``R`` is not square, not Hermitian or not positive definite.
    """
    R = np.asarray(R)
    if R.ndim != 2 or R.shape[0] != R.shape[1]:
        raise ChannelError(f"Expected a square matrix, got shape {R.shape}")
    if not np.allclose(R, R.conj().T, atol=1e-12):
        raise ChannelError("Matrix is not Hermitian")

    eigvals, eigvecs = eigh(R)
    if eigvals[0] <= PD_TOLERANCE * max(1.0, abs(eigvals[-1])):
        raise ChannelError(f"Matrix is not positive definite (smallest eigenvalue {eigvals[0]:.3e})")
    return (eigvecs * np.sqrt(eigvals)) @ eigvecs.conj().T


@lru_cache(maxsize=32)
def _rx_sqrt(N: int, rho: float) -> np.ndarray:
    root = matrix_sqrt(exp_correlation(CorrelationSpec(rho=rho, n=N)))
    root.setflags(write=False)
    return root


def correlate_rx(G: np.ndarray, rho_rx: float) -> np.ndarray:
    """Apply receive correlation to an i.i.d. matrix: ``R_rx^{1/2} G``."""
    if rho_rx == 0:
        return G
    return _rx_sqrt(G.shape[0], float(rho_rx)) @ G


def sample_channel(M: int, N: int, rho_rx: float, rng: np.random.Generator) -> ChannelRealization:
    """Draw ``A = R_rx^{1/2} G`` with ``G`` i.i.d. CN(0, 1).

    Raises:
        ChannelError: For nonpositive dimensions or ``rho_rx`` outside [0, 1).
    """
    if M < 1 or N < 1:
        raise ChannelError(f"Dimensions must be positive, got M={M}, N={N}")
    G = complex_normal(rng, (N, M))
    A = correlate_rx(G, rho_rx)
    return ChannelRealization(A=A, M=M, N=N, rho=float(rho_rx))


def noise_power(Es: float, esn0_db: float) -> float:
    """N0 such that Es / N0 equals ``esn0_db`` in dB."""
    return Es * 10.0 ** (-esn0_db / 10.0)


def make_observation(A: np.ndarray, cons: Constellation, M: int, esn0_db: float,
                     rng: np.random.Generator, unit_noise: Optional[np.ndarray] = None,
                     noiseless: bool = False) -> Tuple[Observation, float]:
    """Draw uniform symbols and AWGN and form ``y = A x + w``.

    Symbols are drawn before the noise so that a fixed rng stream yields the
    same symbols at every Es/N0.

    Args:
        A: N x M measurement matrix.
        cons: Constellation the symbols are drawn from.
        M: Number of symbols; must match ``A.shape[1]``.
        esn0_db: Es / N0 in dB.
        rng: Random generator.
        unit_noise: Optional CN(0, I) noise vector to scale instead of drawing one.
        noiseless: Force ``w = 0``.

    Returns:
        Tuple of (observation, N0).
    """
    A = np.asarray(A)
    N = A.shape[0]
    if A.shape[1] != M:
        raise ChannelError(f"Matrix has {A.shape[1]} columns but M={M}")

    N0 = noise_power(cons.energy, esn0_db)
    tx_indices = rng.integers(0, cons.order, size=M)
    x_true = cons.points[tx_indices]

    if noiseless:
        w = np.zeros(N, dtype=np.complex128)
    else:
        if unit_noise is None:
            unit_noise = complex_normal(rng, N)
        w = np.sqrt(N0) * unit_noise

    y = A @ x_true + w
    return Observation(y=y, x_true=x_true, w=w, tx_indices=tx_indices), N0
