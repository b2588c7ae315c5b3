"""
Discrete priors for the estimated signal: Gray-coded square QAM.

A :class:`Constellation` holds the symbol set, the prior probabilities and
the Gray labelling used to turn hard decisions into bits.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import ConstellationError

logger = logging.getLogger('mpdetect.constellation')

SUPPORTED_ORDERS = (4, 16, 64)


def _gray(n: np.ndarray) -> np.ndarray:
    """Reflected binary Gray code of non-negative integers."""
    return n ^ (n >> 1)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Constellation:
    """Finite prior over complex symbols.

    Attributes:
        points: Complex symbol values, shape (Q,).
        probs: Prior probabilities of the points, shape (Q,).
        bits_per_symbol: log2(Q).
        labels: Gray label (integer bit pattern, MSB first) of each point.
        label_to_index: Inverse of ``labels``.
        scale: Half the distance between adjacent amplitude levels (c).
        energy: Average symbol energy Es (equal to the prior variance).
    """
    points: np.ndarray
    probs: np.ndarray
    bits_per_symbol: int
    labels: np.ndarray
    label_to_index: np.ndarray
    scale: float
    energy: float

    @property
    def order(self) -> int:
        return int(self.points.shape[0])

    @property
    def c_sq(self) -> float:
        return self.scale ** 2

    @property
    def max_amplitude(self) -> float:
        """Largest per-axis amplitude, (sqrt(Q) - 1) c."""
        return float(np.max(np.abs(self.points.real)))

    @property
    def log_probs(self) -> np.ndarray:
        return np.log(self.probs)

    def labels_to_bits(self, labels: np.ndarray) -> np.ndarray:
        """Expand integer labels into bit arrays of shape (..., bits_per_symbol)."""
        labels = np.asarray(labels, dtype=np.int64)
        shifts = np.arange(self.bits_per_symbol - 1, -1, -1)
        return ((labels[..., None] >> shifts) & 1).astype(np.uint8)

    def indices_to_bits(self, indices: np.ndarray) -> np.ndarray:
        """Bits of the given point indices, flattened symbol after symbol."""
        return self.labels_to_bits(self.labels[np.asarray(indices)]).reshape(-1)


def make_qam(Q: int, Es: float = 1.0) -> Constellation:
    """Build a uniform, Gray-coded square Q-QAM constellation.

    The in-phase and quadrature amplitudes each carry half of the bits, each
    axis labelled with a reflected binary Gray code; the first half of a
    label belongs to the in-phase axis.

    Args:
        Q: Constellation order, one of 4, 16, 64.
        Es: Average symbol energy.

    Returns:
        The constellation with levels {±c, ±3c, ...}, c = sqrt(3 Es / (2 (Q - 1))).

    Raises:
        ConstellationError: For unsupported orders or nonpositive energy.
    """
    if Q not in SUPPORTED_ORDERS:
        raise ConstellationError(
            f"Unsupported QAM order {Q}; supported orders are {', '.join(map(str, SUPPORTED_ORDERS))}"
        )
    if not Es > 0:
        raise ConstellationError(f"Symbol energy must be positive, got {Es}")

    side = int(round(np.sqrt(Q)))
    half_bits = int(np.log2(side))
    scale = float(np.sqrt(3.0 * Es / (2.0 * (Q - 1))))

    levels = np.arange(side)
    amplitudes = (2 * levels - (side - 1)) * scale
    level_gray = _gray(levels)

    # point index q = i_level * side + q_level
    i_idx, q_idx = np.meshgrid(levels, levels, indexing='ij')
    i_idx, q_idx = i_idx.reshape(-1), q_idx.reshape(-1)
    points = amplitudes[i_idx] + 1j * amplitudes[q_idx]
    labels = (level_gray[i_idx] << half_bits) | level_gray[q_idx]

    label_to_index = np.empty(Q, dtype=np.int64)
    label_to_index[labels] = np.arange(Q)

    probs = np.full(Q, 1.0 / Q)
    energy = float(np.sum(probs * np.abs(points) ** 2))

    logger.debug(f"Built {Q}-QAM: c={scale:.6f}, Es={energy:.6f}")
    return Constellation(
        points=_frozen(points),
        probs=_frozen(probs),
        bits_per_symbol=2 * half_bits,
        labels=_frozen(labels.astype(np.int64)),
        label_to_index=_frozen(label_to_index),
        scale=scale,
        energy=energy,
    )


def map_bits(cons: Constellation, bits: np.ndarray) -> np.ndarray:
    """Map a bit vector onto constellation symbols.

    Args:
        cons: Constellation to map onto.
        bits: 0/1 vector whose length is a multiple of ``cons.bits_per_symbol``.

    Returns:
        Complex symbol vector of length ``len(bits) // bits_per_symbol``.
    """
    bits = np.asarray(bits, dtype=np.int64).reshape(-1)
    k = cons.bits_per_symbol
    if bits.size % k:
        raise ConstellationError(f"Bit vector length {bits.size} is not a multiple of {k}")
    if np.any((bits != 0) & (bits != 1)):
        raise ConstellationError("Bit vector must contain only 0 and 1")

    weights = 1 << np.arange(k - 1, -1, -1)
    labels = bits.reshape(-1, k) @ weights
    return cons.points[cons.label_to_index[labels]]


def demap_hard(cons: Constellation, z) -> Tuple[np.ndarray, np.ndarray]:
    """Nearest-point hard decision.

    Ties go to the lowest point index. Works on scalars and arrays.

    Args:
        cons: Constellation to decide on.
        z: Complex value(s).

    Returns:
        Tuple of (point indices with the shape of ``z``, bits of shape
        ``z.shape + (bits_per_symbol,)``).
    """
    z = np.asarray(z, dtype=np.complex128)
    distances = np.abs(z[..., None] - cons.points)
    indices = np.argmin(distances, axis=-1)
    return indices, cons.labels_to_bits(cons.labels[indices])


def symbols_to_bits(cons: Constellation, x: np.ndarray) -> np.ndarray:
    """Bits carried by (noise-free) constellation symbols, flattened."""
    indices, _ = demap_hard(cons, x)
    return cons.indices_to_bits(indices)
