"""
Result records and their CSV / metadata JSON output.
"""
import csv
import io
import json
import logging
import time
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import norm

from ..diagnostics import TAIL_SIGMAS, BeliefHistogram, band_profile, mean_offdiag_magnitude

logger = logging.getLogger('mpdetect.harness.records')

Z95 = float(norm.ppf(0.975))


def binomial_ci(bit_errors: int, bits: int) -> Tuple[float, float]:
    """95% normal-approximation interval of an error rate, clipped to [0, 1]."""
    if bits <= 0:
        return 0.0, 1.0
    p = bit_errors / bits
    half = Z95 * np.sqrt(p * (1.0 - p) / bits)
    return max(0.0, p - half), min(1.0, p + half)


@dataclass
class BerRecord:
    algorithm: str
    denoiser_mode: str
    M: int
    N: int
    Q: int
    rho: float
    esn0_db: float
    T: int
    bits: int
    bit_errors: int
    ber: float
    ci95_low: float
    ci95_high: float
    trials: int
    diverged_trials: int
    wall_seconds: float = 0.0

    @classmethod
    def from_counts(cls, bit_errors: int, bits: int, **kwargs) -> 'BerRecord':
        low, high = binomial_ci(bit_errors, bits)
        return cls(bits=bits, bit_errors=bit_errors, ber=bit_errors / bits if bits else 0.0,
                   ci95_low=low, ci95_high=high, **kwargs)


@dataclass
class IterationBerRecord:
    """Hard-decision BER after ``t`` of ``T`` iterations; ``t = 0`` is the prior mean."""
    algorithm: str
    denoiser_mode: str
    M: int
    N: int
    Q: int
    rho: float
    esn0_db: float
    T: int
    t: int
    bits: int
    bit_errors: int
    ber: float
    ci95_low: float
    ci95_high: float
    trials: int
    diverged_trials: int

    @classmethod
    def from_counts(cls, bit_errors: int, bits: int, **kwargs) -> 'IterationBerRecord':
        low, high = binomial_ci(bit_errors, bits)
        return cls(bits=bits, bit_errors=bit_errors, ber=bit_errors / bits if bits else 0.0,
                   ci95_low=low, ci95_high=high, **kwargs)


@dataclass
class CorrSnapshot:
    """Finalized effective-noise correlation of one algorithm at iteration ``t``."""
    algorithm: str
    rho: float
    esn0_db: float
    t: int
    trials: int
    gamma: np.ndarray

    @property
    def mean_offdiag(self) -> float:
        return mean_offdiag_magnitude(self.gamma)

    @property
    def band(self) -> np.ndarray:
        return band_profile(self.gamma)


@dataclass
class HistogramResult:
    algorithm: str
    rho: float
    esn0_db: float
    t: int
    trials: int
    histogram: BeliefHistogram


def _fmt(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def records_to_csv(records: Sequence[Any], exclude: Iterable[str] = ("wall_seconds",)) -> str:
    """CSV text of dataclass records, one per line, with a header row."""
    if not records:
        return ""
    names = [f.name for f in fields(records[0]) if f.name not in set(exclude)]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(names)
    for record in records:
        writer.writerow([_fmt(getattr(record, name)) for name in names])
    return buffer.getvalue()


def _write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_records(prefix: str, suffix: str, records: Sequence[Any]) -> Path:
    return _write_text(Path(f"{prefix}_{suffix}.csv"), records_to_csv(records))


def matrix_to_csv(matrix: np.ndarray) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    for row in matrix:
        writer.writerow([_fmt(value) for value in row])
    return buffer.getvalue()


def write_corr_snapshots(prefix: str, snapshots: Sequence[CorrSnapshot]) -> List[Path]:
    """One dense |Gamma| CSV per snapshot plus a summary table."""
    paths = []
    for snap in snapshots:
        name = f"{prefix}_gamma_{_safe(snap.algorithm)}_rho{snap.rho:g}_esn0{snap.esn0_db:g}_t{snap.t}.csv"
        paths.append(_write_text(Path(name), matrix_to_csv(np.abs(snap.gamma))))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["algorithm", "rho", "esn0_db", "t", "trials", "mean_offdiag_abs",
                     "band_k1", "band_k4"])
    for snap in snapshots:
        band = snap.band
        writer.writerow([snap.algorithm, _fmt(snap.rho), _fmt(snap.esn0_db), snap.t, snap.trials,
                         _fmt(snap.mean_offdiag),
                         _fmt(band[1]) if band.size > 1 else "",
                         _fmt(band[4]) if band.size > 4 else ""])
    paths.append(_write_text(Path(f"{prefix}_gamma_summary.csv"), buffer.getvalue()))
    return paths


def write_histograms(prefix: str, results: Sequence[HistogramResult]) -> List[Path]:
    """Per-algorithm density and overlay CSV plus a tail-count summary."""
    paths = []
    for res in results:
        hist = res.histogram
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["bin_low", "bin_high", "bin_center", "density", "ideal_overlay"])
        for low, high, center, dens, ideal in zip(hist.bin_edges[:-1], hist.bin_edges[1:],
                                                 hist.bin_centers, hist.density, hist.ideal_overlay):
            writer.writerow([_fmt(low), _fmt(high), _fmt(center), _fmt(dens), _fmt(ideal)])
        name = f"{prefix}_hist_{_safe(res.algorithm)}_rho{res.rho:g}_esn0{res.esn0_db:g}_t{res.t}.csv"
        paths.append(_write_text(Path(name), buffer.getvalue()))

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["algorithm", "rho", "esn0_db", "t", "trials", "residuals"]
                    + [f"tail_{k}sigma" for k in TAIL_SIGMAS]
                    + [f"tail_{k}sigma_fraction" for k in TAIL_SIGMAS])
    for res in results:
        hist = res.histogram
        writer.writerow([res.algorithm, _fmt(res.rho), _fmt(res.esn0_db), res.t, res.trials, hist.total]
                        + [hist.tail_counts[k] for k in TAIL_SIGMAS]
                        + [_fmt(hist.tail_fraction(k)) for k in TAIL_SIGMAS])
    paths.append(_write_text(Path(f"{prefix}_hist_summary.csv"), buffer.getvalue()))
    return paths


def write_metadata(prefix: str, kind: str, config: Dict[str, Any], xi: float,
                   timings: Optional[Dict[str, float]] = None) -> Path:
    """Resolved configuration, code version and timings next to the CSV output."""
    from .. import __version__
    meta = {
        "kind": kind,
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "xi": xi,
        "config": config,
        "wall_seconds": timings or {},
    }
    return _write_text(Path(f"{prefix}_{kind}.meta.json"), json.dumps(meta, indent=2, default=str))


def _safe(label: str) -> str:
    return label.replace("+", "_")
