"""
Tests for the deterministic Monte-Carlo engine
"""
import dataclasses
from unittest.mock import patch

import numpy as np
import pytest

from mpdetect.detectors import run_detector
from mpdetect.exceptions import BeliefDivergenceError
from mpdetect.harness import records_to_csv, run_ber_sweep
from mpdetect.harness.engine import (ChunkJob, ChunkResult, ErrorTally, MonteCarloEngine, TaskKind, draw_trial,
                                     pairwise_reduce, plan_chunks, run_chunk)


def tally(errors, bits=10, trials=1):
    return ErrorTally(errors=np.array([errors]), bits=bits, trials=trials)


class TestChunking:

    def test_plan_chunks(self):
        assert plan_chunks(0, 23, 10) == [(0, 0, 10), (1, 10, 20), (2, 20, 23)]
        assert plan_chunks(40, 50, 5, first_index=8) == [(8, 40, 45), (9, 45, 50)]
        assert plan_chunks(0, 0, 5) == []

    def test_pairwise_reduce_is_order_independent(self):
        results = [ChunkResult(index=i, trials=1, tallies={('k',): tally(i)}) for i in range(7)]
        forward = pairwise_reduce(results)
        shuffled = pairwise_reduce(list(reversed(results))[3:] + list(reversed(results))[:3])
        assert forward.trials == shuffled.trials == 7
        assert int(forward.tallies[('k',)].errors[0]) == sum(range(7))
        assert np.array_equal(forward.tallies[('k',)].errors, shuffled.tallies[('k',)].errors)

    def test_pairwise_reduce_keeps_disjoint_keys(self):
        merged = pairwise_reduce([ChunkResult(index=0, tallies={('a',): tally(1)}),
                                  ChunkResult(index=1, tallies={('b',): tally(2)})])
        assert set(merged.tallies) == {('a',), ('b',)}

    def test_pairwise_reduce_empty(self):
        with pytest.raises(ValueError):
            pairwise_reduce([])


class TestDraws:

    def test_draw_is_keyed_by_trial(self, small_config):
        cons = small_config.constellation()
        first = draw_trial(small_config, cons, 5)
        again = draw_trial(small_config, cons, 5)
        other = draw_trial(small_config, cons, 6)
        assert np.array_equal(first.G, again.G)
        assert np.array_equal(first.tx_indices, again.tx_indices)
        assert np.array_equal(first.unit_noise, again.unit_noise)
        assert not np.allclose(first.G, other.G)

    def test_every_algorithm_sees_the_same_realization(self, small_config):
        job = ChunkJob(small_config, TaskKind.BER, 0, 0, 2)
        with patch('mpdetect.harness.engine.run_detector', wraps=run_detector) as mock_run:
            run_chunk(job)
        calls = mock_run.call_args_list
        per_point = len(small_config.algorithms)
        assert len(calls) == 2 * len(small_config.rho) * len(small_config.esn0_db) * per_point
        for start in range(0, len(calls), per_point):
            group = calls[start:start + per_point]
            y0, A0 = group[0].args[0], group[0].args[1]
            for call in group[1:]:
                assert np.array_equal(call.args[0], y0)
                assert np.array_equal(call.args[1], A0)

    def test_noise_is_common_across_snr(self, small_config):
        job = ChunkJob(dataclasses.replace(small_config, rho=[0.0], algorithms=["lmmse"]), TaskKind.BER, 0, 0, 1)
        with patch('mpdetect.harness.engine.run_detector', wraps=run_detector) as mock_run:
            run_chunk(job)
        (low, high) = [c.args for c in mock_run.call_args_list]
        A, x = low[1], low[5]
        w_low = (low[0] - A @ x) / np.sqrt(low[2])
        w_high = (high[0] - A @ x) / np.sqrt(high[2])
        assert np.allclose(w_low, w_high)


class TestRunChunk:

    def test_bit_accounting(self, small_config):
        result = run_chunk(ChunkJob(small_config, TaskKind.BER, 0, 0, 3))
        assert result.trials == 3
        for key, t in result.tallies.items():
            assert t.trials == 3
            assert t.bits == 3 * small_config.M * 2
            assert 0 <= t.errors[0] <= t.bits

    def test_divergence_counts_half_the_bits(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gamp"], rho=[0.0], esn0_db=[10.0])

        def diverge(*args, **kwargs):
            raise BeliefDivergenceError("blown up", iteration=2)

        with patch('mpdetect.harness.engine.run_detector', side_effect=diverge):
            result = run_chunk(ChunkJob(cfg, TaskKind.BER, 0, 0, 4))
        t = result.tallies[(0.0, 10.0, "gamp")]
        assert t.diverged == 4
        assert int(t.errors[0]) == t.bits // 2

    def test_iteration_tallies(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gabp", "lmmse_ep"])
        result = run_chunk(ChunkJob(cfg, TaskKind.ITER, 0, 0, 2))
        for T in cfg.iteration_counts:
            t = result.tallies[(0.0, 0.0, "gabp", T)]
            assert t.errors.shape == (T + 1,)
        prior = {int(t.errors[0]) for t in result.tallies.values()}
        assert len(prior) == 1

    def test_diagnostic_accumulators(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gabp", "gamp+add"])
        result = run_chunk(ChunkJob(cfg, TaskKind.DIAG, 0, 0, 3, snapshot_ts=(1, 3), histogram_t=3))
        acc = result.corr[(0.5, 10.0, "gamp+add", 3)]
        assert acc.trial_count == 3 and acc.n == cfg.N
        assert result.hist[(0.0, 0.0, "gabp", 3)].total == 3 * 2 * cfg.M


class TestEngine:

    def test_workers_do_not_change_results(self, small_config):
        serial = run_ber_sweep(small_config, write=False)
        parallel = run_ber_sweep(dataclasses.replace(small_config, workers=2), write=False)
        assert records_to_csv(serial) == records_to_csv(parallel)

    def test_chunk_size_does_not_change_counts(self, small_config):
        a = run_ber_sweep(small_config, write=False)
        b = run_ber_sweep(dataclasses.replace(small_config, chunk_size=7), write=False)
        assert [r.bit_errors for r in a] == [r.bit_errors for r in b]

    def test_progress_callback(self, small_config):
        seen = []
        MonteCarloEngine(small_config, lambda done, total: seen.append((done, total))).run(TaskKind.BER)
        assert seen[-1] == (20, 20)
        assert [d for d, _ in seen] == sorted(d for d, _ in seen)

    def test_target_errors(self, small_config):
        cfg = dataclasses.replace(small_config, trials=None, target_bit_errors=5, max_trials=200,
                                  algorithms=["lmmse"], esn0_db=[0.0], rho=[0.0])
        result = MonteCarloEngine(cfg).run(TaskKind.BER)
        t = result.tallies[(0.0, 0.0, "lmmse")]
        assert t.errors[0] >= 5
        assert t.trials < 200
        assert t.trials % cfg.chunk_size == 0

    def test_target_errors_stop_at_max_trials(self, small_config):
        cfg = dataclasses.replace(small_config, trials=None, target_bit_errors=10 ** 6, max_trials=30,
                                  algorithms=["mfb"], esn0_db=[30.0], rho=[0.0])
        result = MonteCarloEngine(cfg).run(TaskKind.BER)
        assert result.tallies[(0.0, 30.0, "mfb")].trials == 30

    def test_target_errors_deterministic_across_workers(self, small_config):
        cfg = dataclasses.replace(small_config, trials=None, target_bit_errors=20, max_trials=400)
        serial = run_ber_sweep(cfg, write=False)
        parallel = run_ber_sweep(dataclasses.replace(cfg, workers=2), write=False)
        assert records_to_csv(serial) == records_to_csv(parallel)
