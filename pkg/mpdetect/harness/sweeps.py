"""
Experiment drivers behind the CLI sub-commands.

Each driver validates what it needs beyond :meth:`ExperimentConfig.validate`,
runs the Monte-Carlo engine, turns the reduced tallies into records and,
unless ``write=False``, writes CSV plus metadata JSON under ``cfg.output``.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from ..denoiser import denoiser_curve
from ..exceptions import ConfigError
from .config import AlgorithmSpec, ExperimentConfig
from .engine import ChunkResult, MonteCarloEngine, TaskKind
from .records import (BerRecord, CorrSnapshot, HistogramResult, IterationBerRecord,
                      write_corr_snapshots, write_histograms, write_metadata, write_records)

logger = logging.getLogger('mpdetect.harness.sweeps')

Progress = Optional[Callable[[int, int], None]]

DEFAULT_C_SQ_BETAS = (0.2, 1.0, 5.0)


def _timings(result: ChunkResult) -> Dict[str, float]:
    timings: Dict[str, float] = {}
    for key, tally in result.tallies.items():
        timings[key[2]] = timings.get(key[2], 0.0) + tally.seconds
    return timings


def _ber_records(cfg: ExperimentConfig, result: ChunkResult) -> List[BerRecord]:
    records = []
    for spec in cfg.algorithm_specs:
        for rho in cfg.rho:
            for esn0 in cfg.esn0_db:
                tally = result.tallies.get((float(rho), float(esn0), spec.label))
                if tally is None:
                    continue
                records.append(BerRecord.from_counts(
                    int(tally.errors[0]), tally.bits,
                    algorithm=spec.label, denoiser_mode=spec.denoiser_mode,
                    M=cfg.M, N=cfg.N, Q=cfg.Q, rho=float(rho), esn0_db=float(esn0),
                    T=cfg.T if spec.algorithm.is_iterative else 0,
                    trials=tally.trials, diverged_trials=tally.diverged,
                    wall_seconds=tally.seconds,
                ))
                logger.info(f"{spec.label} rho={rho} Es/N0={esn0} dB: BER={records[-1].ber:.3e} "
                            f"({records[-1].bit_errors}/{records[-1].bits})")
    return records


def _write(cfg: ExperimentConfig, kind: str, result: ChunkResult) -> None:
    write_metadata(cfg.output, kind, cfg.to_dict(), cfg.xi, _timings(result))


def run_ber_sweep(cfg: ExperimentConfig, progress: Progress = None, write: bool = True) -> List[BerRecord]:
    """BER of every algorithm at every (rho, Es/N0) point."""
    result = MonteCarloEngine(cfg, progress).run(TaskKind.BER)
    records = _ber_records(cfg, result)
    if write:
        write_records(cfg.output, "ber", records)
        _write(cfg, "ber", result)
    return records


def check_rho_monotonicity(records: Sequence[BerRecord]) -> List[str]:
    """Report every place where BER drops as rho grows; logged as warnings."""
    violations = []
    by_curve: Dict[tuple, List[BerRecord]] = {}
    for rec in records:
        by_curve.setdefault((rec.algorithm, rec.esn0_db), []).append(rec)
    for (label, esn0), curve in by_curve.items():
        curve = sorted(curve, key=lambda r: r.rho)
        for prev, cur in zip(curve, curve[1:]):
            if cur.ber < prev.ber:
                message = (f"{label} at Es/N0={esn0} dB: BER falls from {prev.ber:.3e} (rho={prev.rho}) "
                           f"to {cur.ber:.3e} (rho={cur.rho})")
                logger.warning(message)
                violations.append(message)
    return violations


def run_rho_sweep(cfg: ExperimentConfig, progress: Progress = None, write: bool = True) -> List[BerRecord]:
    """BER against the receive correlation coefficient at one Es/N0."""
    if len(cfg.esn0_db) != 1:
        raise ConfigError(f"rho-sweep needs exactly one Es/N0 value, got {cfg.esn0_db}")
    for rho in cfg.rho:
        if not 0.0 <= rho < 1.0:
            raise ConfigError(f"Correlation coefficient must lie in [0, 1), got {rho}")

    result = MonteCarloEngine(cfg, progress).run(TaskKind.BER)
    records = _ber_records(cfg, result)
    check_rho_monotonicity(records)
    if write:
        write_records(cfg.output, "rho", records)
        _write(cfg, "rho", result)
    return records


def _require(cfg: ExperimentConfig, command: str, allowed: Callable[[AlgorithmSpec], bool],
             what: str) -> None:
    bad = [spec.label for spec in cfg.algorithm_specs if not allowed(spec)]
    if bad:
        raise ConfigError(f"{command} only supports {what} algorithms; remove {', '.join(bad)}")


def run_iteration_trace(cfg: ExperimentConfig, progress: Progress = None,
                        write: bool = True) -> List[IterationBerRecord]:
    """Hard-decision BER after every iteration t = 0..T, for each T in ``iteration_counts``."""
    _require(cfg, "iter-trace", lambda s: s.algorithm.is_iterative, "iterative")
    result = MonteCarloEngine(cfg, progress).run(TaskKind.ITER)

    records = []
    for spec in cfg.algorithm_specs:
        for T in cfg.iteration_counts:
            for rho in cfg.rho:
                for esn0 in cfg.esn0_db:
                    tally = result.tallies.get((float(rho), float(esn0), spec.label, T))
                    if tally is None:
                        continue
                    for t in range(T + 1):
                        records.append(IterationBerRecord.from_counts(
                            int(tally.errors[t]), tally.bits,
                            algorithm=spec.label, denoiser_mode=spec.denoiser_mode,
                            M=cfg.M, N=cfg.N, Q=cfg.Q, rho=float(rho), esn0_db=float(esn0),
                            T=T, t=t, trials=tally.trials, diverged_trials=tally.diverged,
                        ))
    if write:
        write_records(cfg.output, "iter", records)
        _write(cfg, "iter", result)
    return records


def _check_diag(cfg: ExperimentConfig, command: str, ts: Sequence[int]) -> None:
    if cfg.trials is None:
        raise ConfigError(f"{command} runs a fixed number of trials; set 'trials' instead of 'target_bit_errors'")
    late = [t for t in ts if not 1 <= t <= cfg.T]
    if late:
        raise ConfigError(f"{command}: iterations {late} outside 1..T={cfg.T}")


def run_corr_diagnostic(cfg: ExperimentConfig, snapshot_ts: Optional[Sequence[int]] = None,
                        progress: Progress = None, write: bool = True) -> List[CorrSnapshot]:
    """Effective-noise correlation matrices of each message-passing algorithm at the snapshot iterations."""
    ts = tuple(cfg.snapshot_ts if snapshot_ts is None else snapshot_ts)
    _require(cfg, "corr-diag", lambda s: s.algorithm.is_message_passing, "message-passing")
    _check_diag(cfg, "corr-diag", ts)

    result = MonteCarloEngine(cfg, progress).run(TaskKind.DIAG, snapshot_ts=ts)
    snapshots = []
    for spec in cfg.algorithm_specs:
        for rho in cfg.rho:
            for esn0 in cfg.esn0_db:
                for t in ts:
                    acc = result.corr.get((float(rho), float(esn0), spec.label, t))
                    if acc is None or acc.trial_count == 0:
                        logger.warning(f"No effective-noise samples for {spec.label} at t={t}")
                        continue
                    snap = CorrSnapshot(algorithm=spec.label, rho=float(rho), esn0_db=float(esn0),
                                        t=t, trials=acc.trial_count, gamma=acc.finalize())
                    logger.info(f"{spec.label} t={t}: mean off-diagonal |Gamma| = {snap.mean_offdiag:.4f}")
                    snapshots.append(snap)
    if write:
        write_corr_snapshots(cfg.output, snapshots)
        _write(cfg, "gamma", result)
    return snapshots


def run_histogram(cfg: ExperimentConfig, t: Optional[int] = None, progress: Progress = None,
                  write: bool = True) -> List[HistogramResult]:
    """Pooled standardized belief-residual histograms at iteration ``t``."""
    t = cfg.histogram_t if t is None else t
    _require(cfg, "histogram", lambda s: s.algorithm.is_iterative, "iterative")
    _check_diag(cfg, "histogram", (t,))

    result = MonteCarloEngine(cfg, progress).run(TaskKind.DIAG, histogram_t=t)
    results = []
    for spec in cfg.algorithm_specs:
        for rho in cfg.rho:
            for esn0 in cfg.esn0_db:
                acc = result.hist.get((float(rho), float(esn0), spec.label, t))
                if acc is None or acc.total == 0:
                    logger.warning(f"No belief residuals for {spec.label} at t={t}")
                    continue
                hist = acc.to_histogram()
                results.append(HistogramResult(algorithm=spec.label, rho=float(rho), esn0_db=float(esn0),
                                               t=t, trials=acc.total // (2 * cfg.M), histogram=hist))
    if write:
        write_histograms(cfg.output, results)
        _write(cfg, "hist", result)
    return results


@dataclass
class DenoiserCurve:
    c_sq_beta: float
    re_y: np.ndarray
    re_mean: np.ndarray


def run_denoiser_curve(cfg: ExperimentConfig, c_sq_betas: Sequence[float] = DEFAULT_C_SQ_BETAS,
                       points: int = 401, write: bool = True) -> List[DenoiserCurve]:
    """Re[eta_beta] along the real axis for a few normalised inverse temperatures."""
    cons = cfg.constellation()
    if points < 2:
        raise ConfigError(f"Need at least two curve points, got {points}")
    if any(not b > 0 for b in c_sq_betas):
        raise ConfigError(f"Inverse temperatures must be positive, got {list(c_sq_betas)}")

    span = 1.5 * cons.max_amplitude
    re_y = np.linspace(-span, span, points)
    curves = [DenoiserCurve(float(b), re_y, denoiser_curve(cons, b, re_y)) for b in c_sq_betas]
    if write:
        write_records(cfg.output, "denoiser", [
            _CurvePoint(c.c_sq_beta, float(y), float(m)) for c in curves for y, m in zip(c.re_y, c.re_mean)
        ])
        write_metadata(cfg.output, "denoiser", cfg.to_dict(), cfg.xi)
    return curves


@dataclass
class _CurvePoint:
    c_sq_beta: float
    re_y: float
    re_eta: float
