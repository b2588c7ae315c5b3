"""
Deterministic parallel Monte-Carlo engine.

Trials are split into chunks with fixed boundaries. Trial ``k`` draws its
channel, symbols and noise from a generator keyed by ``(seed, k)``, so every
operating point and every algorithm sees the same realization for the same
``k``, and the results do not depend on which worker ran the chunk.
Chunk results are reduced pairwise in chunk order.
"""
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..channel import complex_normal, correlate_rx, noise_power, trial_rng
from ..constellation import Constellation, demap_hard
from ..detectors import run_detector
from ..detectors.base import DetectorConfig, TraceLevel
from ..diagnostics import CorrAccumulator, ResidualAccumulator, default_bin_edges
from ..exceptions import BeliefDivergenceError
from ..utils.logging_utils import log_performance
from .config import AlgorithmSpec, ExperimentConfig

logger = logging.getLogger('mpdetect.harness.engine')

# (rho, esn0_db, algorithm label) or (rho, esn0_db, algorithm label, T or t)
Key = Tuple


class TaskKind(str, Enum):
    BER = "ber"
    ITER = "iter"
    DIAG = "diag"


@dataclass
class TrialDraw:
    """Randomness of one trial, shared by every operating point."""
    G: np.ndarray
    tx_indices: np.ndarray
    unit_noise: np.ndarray


def draw_trial(cfg: ExperimentConfig, cons: Constellation, k: int) -> TrialDraw:
    """Draw G, then the symbol indices, then CN(0, I) noise from the trial's own stream."""
    rng = trial_rng(cfg.seed, k)
    G = complex_normal(rng, (cfg.N, cfg.M))
    tx_indices = rng.integers(0, cons.order, size=cfg.M)
    unit_noise = complex_normal(rng, cfg.N)
    return TrialDraw(G=G, tx_indices=tx_indices, unit_noise=unit_noise)


@dataclass
class ErrorTally:
    """Bit-error counts of one key; ``errors[i]`` is the count after iteration ``i``
    for iteration traces and a single entry otherwise."""
    errors: np.ndarray
    bits: int = 0
    trials: int = 0
    diverged: int = 0
    seconds: float = 0.0

    @classmethod
    def empty(cls, length: int = 1) -> 'ErrorTally':
        return cls(errors=np.zeros(length, dtype=np.int64))

    def merge(self, other: 'ErrorTally') -> 'ErrorTally':
        return ErrorTally(
            errors=self.errors + other.errors,
            bits=self.bits + other.bits,
            trials=self.trials + other.trials,
            diverged=self.diverged + other.diverged,
            seconds=self.seconds + other.seconds,
        )


@dataclass
class ChunkJob:
    cfg: ExperimentConfig
    kind: TaskKind
    index: int
    start: int
    stop: int
    snapshot_ts: Tuple[int, ...] = ()
    histogram_t: Optional[int] = None


@dataclass
class ChunkResult:
    index: int
    trials: int = 0
    tallies: Dict[Key, ErrorTally] = field(default_factory=dict)
    corr: Dict[Key, CorrAccumulator] = field(default_factory=dict)
    hist: Dict[Key, ResidualAccumulator] = field(default_factory=dict)

    def merge(self, other: 'ChunkResult') -> 'ChunkResult':
        return ChunkResult(
            index=min(self.index, other.index),
            trials=self.trials + other.trials,
            tallies=_merge_maps(self.tallies, other.tallies),
            corr=_merge_maps(self.corr, other.corr),
            hist=_merge_maps(self.hist, other.hist),
        )


def _merge_maps(left: Dict, right: Dict) -> Dict:
    merged = dict(left)
    for key, value in right.items():
        merged[key] = merged[key].merge(value) if key in merged else value
    return merged


def pairwise_reduce(results: Sequence[ChunkResult]) -> ChunkResult:
    """Merge chunk results in a fixed binary tree over chunk order."""
    if not results:
        raise ValueError("Nothing to reduce")
    level = sorted(results, key=lambda r: r.index)
    while len(level) > 1:
        nxt = [level[i].merge(level[i + 1]) for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            nxt.append(level[-1])
        level = nxt
    return level[0]


@dataclass
class _Plan:
    spec: AlgorithmSpec
    det_cfg: Optional[DetectorConfig]
    T: int


def _plans(job: ChunkJob, cons: Constellation) -> List[_Plan]:
    cfg = job.cfg
    plans = []
    for spec in cfg.algorithm_specs:
        if job.kind is TaskKind.BER:
            plans.append(_Plan(spec, cfg.detector_config(spec, cons=cons), cfg.T))
        elif job.kind is TaskKind.ITER:
            for T in cfg.iteration_counts:
                plans.append(_Plan(spec, cfg.detector_config(spec, T, TraceLevel.BER_ONLY, cons), T))
        else:
            plans.append(_Plan(spec, cfg.detector_config(spec, trace_level=TraceLevel.FULL, cons=cons), cfg.T))
    return plans


def run_chunk(job: ChunkJob) -> ChunkResult:
    """Run trials ``job.start .. job.stop - 1`` for every operating point and algorithm."""
    started = time.perf_counter()
    cfg = job.cfg
    cons = cfg.constellation()
    plans = _plans(job, cons)
    result = ChunkResult(index=job.index, trials=job.stop - job.start)
    bin_edges = default_bin_edges(cfg.histogram_range, cfg.histogram_bin_width)

    for k in range(job.start, job.stop):
        draw = draw_trial(cfg, cons, k)
        x_true = cons.points[draw.tx_indices]
        tx_bits = cons.indices_to_bits(draw.tx_indices)
        prior_errors = int(np.count_nonzero(
            cons.indices_to_bits(demap_hard(cons, np.zeros(cfg.M))[0]) != tx_bits))

        for rho in cfg.rho:
            A = correlate_rx(draw.G, rho)
            for esn0 in cfg.esn0_db:
                N0 = noise_power(cons.energy, esn0)
                y = A @ x_true + np.sqrt(N0) * draw.unit_noise
                for plan in plans:
                    _run_plan(job, result, plan, (float(rho), float(esn0)), y, A, N0, cons,
                              x_true, tx_bits, prior_errors, bin_edges, k)

    logger.debug(f"Chunk {job.index} ({job.start}..{job.stop - 1}) done")
    log_performance(logger, f"chunk {job.index}", time.perf_counter() - started)
    return result


def _run_plan(job: ChunkJob, result: ChunkResult, plan: _Plan, point, y, A, N0, cons,
              x_true, tx_bits, prior_errors, bin_edges, k) -> None:
    label = plan.spec.label
    bits = int(tx_bits.size)
    if job.kind is TaskKind.ITER:
        key = point + (label, plan.T)
        length = plan.T + 1
    else:
        key = point + (label,)
        length = 1
    tally = result.tallies.setdefault(key, ErrorTally.empty(length))

    started = time.perf_counter()
    try:
        run = run_detector(y, A, N0, cons, plan.det_cfg, x_true)
    except BeliefDivergenceError as e:
        logger.warning(f"Trial {k} at rho={point[0]}, Es/N0={point[1]} dB: {e}")
        tally.errors += bits // 2
        if job.kind is TaskKind.ITER:
            tally.errors[0] += prior_errors - bits // 2
        tally.bits += bits
        tally.trials += 1
        tally.diverged += 1
        tally.seconds += time.perf_counter() - started
        return
    tally.seconds += time.perf_counter() - started
    tally.bits += bits
    tally.trials += 1

    if job.kind is TaskKind.ITER:
        tally.errors[0] += prior_errors
        tally.errors[1:] += [record.bit_errors for record in run.trace]
        return

    tally.errors[0] += run.bit_errors(tx_bits)
    if job.kind is not TaskKind.DIAG:
        return

    for t in job.snapshot_ts:
        record = run.trace[t - 1]
        if record.effective_noise is None:
            continue
        acc = result.corr.setdefault(point + (label, t), CorrAccumulator(n=A.shape[0], t=t))
        acc.accumulate(record.effective_noise)
    if job.histogram_t is not None:
        record = run.trace[job.histogram_t - 1]
        acc = result.hist.setdefault(point + (label, job.histogram_t),
                                     ResidualAccumulator(bin_edges=bin_edges))
        acc.add_beliefs(record.xbar, record.vbar, x_true)


def plan_chunks(first_trial: int, last_trial: int, chunk_size: int,
                first_index: int = 0) -> List[Tuple[int, int, int]]:
    """Fixed (index, start, stop) chunk boundaries over ``first_trial .. last_trial - 1``."""
    chunks = []
    index = first_index
    for start in range(first_trial, last_trial, chunk_size):
        chunks.append((index, start, min(start + chunk_size, last_trial)))
        index += 1
    return chunks


class MonteCarloEngine:
    """Runs chunks inline or on a process pool and reduces them deterministically."""

    def __init__(self, cfg: ExperimentConfig,
                 progress: Optional[Callable[[int, int], None]] = None):
        self.cfg = cfg
        self.progress = progress

    def run(self, kind: TaskKind, snapshot_ts: Sequence[int] = (),
            histogram_t: Optional[int] = None) -> ChunkResult:
        cfg = self.cfg
        started = time.perf_counter()

        def make_job(index: int, start: int, stop: int) -> ChunkJob:
            return ChunkJob(cfg, kind, index, start, stop, tuple(snapshot_ts), histogram_t)

        pool = ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
        try:
            if cfg.trials is not None:
                jobs = [make_job(*c) for c in plan_chunks(0, cfg.trials, cfg.chunk_size)]
                results = []
                for res in self._map(pool, jobs):
                    results.append(res)
                    self._report(sum(r.trials for r in results), cfg.trials)
                total = pairwise_reduce(results)
            else:
                total = self._run_until_target(pool, make_job)
        finally:
            if pool is not None:
                pool.shutdown()
        log_performance(logger, f"{kind.value} run ({total.trials} trials)", time.perf_counter() - started)
        return total

    def _map(self, pool, jobs: List[ChunkJob]) -> Iterator[ChunkResult]:
        if pool is None:
            for job in jobs:
                yield run_chunk(job)
        else:
            yield from pool.map(run_chunk, jobs)

    def _report(self, done: int, total: int) -> None:
        if self.progress is not None:
            self.progress(done, total)

    def _run_until_target(self, pool, make_job) -> ChunkResult:
        """Consume chunks in order; a key stops counting after the chunk that
        brings its final-iteration errors to the target."""
        cfg = self.cfg
        target = cfg.target_bit_errors
        wave = max(1, cfg.workers) * 2
        tallies: Dict[Key, ErrorTally] = {}
        finished = set()
        next_trial, next_index, done = 0, 0, 0

        while next_trial < cfg.max_trials:
            stop = min(cfg.max_trials, next_trial + wave * cfg.chunk_size)
            chunks = plan_chunks(next_trial, stop, cfg.chunk_size, next_index)
            next_trial, next_index = stop, next_index + len(chunks)

            for res in self._map(pool, [make_job(*c) for c in chunks]):
                done += res.trials
                for key, tally in res.tallies.items():
                    if key in finished:
                        continue
                    tallies[key] = tallies[key].merge(tally) if key in tallies else tally
                    if tallies[key].errors[-1] >= target:
                        finished.add(key)
                self._report(done, cfg.max_trials)
                if tallies and len(finished) == len(tallies):
                    logger.info(f"Reached {target} bit errors at every point after {done} trials")
                    return ChunkResult(index=0, trials=done, tallies=tallies)

        logger.warning(f"Stopped at max_trials={cfg.max_trials}; "
                       f"{len(tallies) - len(finished)} points below {target} bit errors")
        return ChunkResult(index=0, trials=done, tallies=tallies)
