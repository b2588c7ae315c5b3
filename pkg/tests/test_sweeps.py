"""
Tests for the experiment drivers and their output files
"""
import csv
import dataclasses
import json
from pathlib import Path

import numpy as np
import pytest

from mpdetect import __version__
from mpdetect.exceptions import ConfigError
from mpdetect.harness import (check_rho_monotonicity, run_ber_sweep, run_corr_diagnostic, run_denoiser_curve,
                              run_histogram, run_iteration_trace, run_rho_sweep)
from mpdetect.harness.records import BerRecord, binomial_ci

BER_COLUMNS = ["algorithm", "denoiser_mode", "M", "N", "Q", "rho", "esn0_db", "T", "bits", "bit_errors",
               "ber", "ci95_low", "ci95_high", "trials", "diverged_trials"]


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


def ber_record(rho, ber, algorithm="gabp"):
    return BerRecord.from_counts(int(ber * 1000), 1000, algorithm=algorithm, denoiser_mode="plain", M=4, N=8,
                                 Q=4, rho=rho, esn0_db=10.0, T=4, trials=10, diverged_trials=0)


class TestBerSweep:

    def test_writes_csv_and_metadata(self, small_config):
        records = run_ber_sweep(small_config)
        prefix = small_config.output
        rows = read_csv(f"{prefix}_ber.csv")
        assert list(rows[0].keys()) == BER_COLUMNS
        assert len(rows) == len(records) == 4 * 2 * 2
        meta = json.loads(Path(f"{prefix}_ber.meta.json").read_text())
        assert meta["version"] == __version__
        assert meta["xi"] == 2.0
        assert meta["config"]["M"] == 4
        assert set(meta["wall_seconds"]) == set(small_config.algorithms)

    def test_record_fields(self, small_config):
        records = run_ber_sweep(small_config, write=False)
        by_alg = {r.algorithm: r for r in records}
        assert by_alg["gabp+add"].denoiser_mode == "annealed"
        assert by_alg["gabp+add"].T == small_config.T
        assert by_alg["lmmse"].denoiser_mode == "none"
        assert by_alg["lmmse"].T == 0
        for r in records:
            assert r.bits == small_config.trials * small_config.M * 2
            assert r.ci95_low <= r.ber <= r.ci95_high

    def test_mfb_is_not_worse_than_lmmse_at_high_snr(self, small_config):
        cfg = dataclasses.replace(small_config, trials=200, esn0_db=[10.0], rho=[0.0])
        by_alg = {r.algorithm: r for r in run_ber_sweep(cfg, write=False)}
        assert by_alg["mfb"].bit_errors <= by_alg["lmmse"].bit_errors

    def test_ber_falls_with_snr(self, small_config):
        cfg = dataclasses.replace(small_config, trials=100, esn0_db=[0.0, 15.0], rho=[0.0],
                                  algorithms=["lmmse"])
        low, high = run_ber_sweep(cfg, write=False)
        assert high.ber < low.ber


class TestRhoSweep:

    def test_requires_single_snr(self, small_config):
        with pytest.raises(ConfigError):
            run_rho_sweep(small_config)

    def test_writes_rho_csv(self, small_config):
        cfg = dataclasses.replace(small_config, esn0_db=[10.0])
        run_rho_sweep(cfg)
        rows = read_csv(f"{cfg.output}_rho.csv")
        assert {float(r["rho"]) for r in rows} == {0.0, 0.5}

    def test_monotonicity_check(self):
        ok = [ber_record(0.0, 0.01), ber_record(0.5, 0.02), ber_record(0.9, 0.2)]
        assert check_rho_monotonicity(ok) == []
        bad = [ber_record(0.0, 0.05), ber_record(0.5, 0.01)]
        assert len(check_rho_monotonicity(bad)) == 1


class TestIterationTrace:

    def test_rows_per_curve(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gamp", "mfep+add", "lmmse_ep"])
        records = run_iteration_trace(cfg)
        for T in cfg.iteration_counts:
            curve = [r for r in records if r.algorithm == "gamp" and r.T == T and r.rho == 0.0 and r.esn0_db == 0.0]
            assert [r.t for r in curve] == list(range(T + 1))
        rows = read_csv(f"{cfg.output}_iter.csv")
        assert len(rows) == len(records)
        assert "t" in rows[0]

    def test_prior_row_is_shared(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gabp", "gamp"])
        records = run_iteration_trace(cfg, write=False)
        priors = {r.bit_errors for r in records if r.t == 0}
        assert len(priors) == 1

    def test_final_row_matches_ber_sweep(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gabp+add"], iteration_counts=[small_config.T])
        traced = [r for r in run_iteration_trace(cfg, write=False) if r.t == r.T]
        swept = run_ber_sweep(cfg, write=False)
        assert [r.bit_errors for r in traced] == [r.bit_errors for r in swept]

    def test_rejects_non_iterative(self, small_config):
        with pytest.raises(ConfigError):
            run_iteration_trace(small_config)


class TestCorrDiagnostic:

    def test_snapshots(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gabp+add", "gamp"])
        snapshots = run_corr_diagnostic(cfg)
        assert len(snapshots) == 2 * 2 * 2 * 2
        for snap in snapshots:
            assert snap.gamma.shape == (cfg.N, cfg.N)
            assert np.allclose(np.diag(snap.gamma), 1.0)
            assert np.allclose(snap.gamma, snap.gamma.conj().T)
        assert Path(f"{cfg.output}_gamma_summary.csv").exists()
        assert Path(f"{cfg.output}_gamma_gabp_add_rho0.5_esn010_t3.csv").exists()

    def test_first_snapshot_of_iid_channel_is_weakly_correlated(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["gabp"], rho=[0.0], esn0_db=[10.0], trials=400)
        snap = run_corr_diagnostic(cfg, snapshot_ts=[1], write=False)[0]
        assert snap.mean_offdiag < 0.15

    @pytest.mark.parametrize("changes", [
        {'algorithms': ["gabp", "lmmse"]},
        {'algorithms': ["lmmse_ep"]},
        {'snapshot_ts': [5]},
        {'trials': None, 'target_bit_errors': 10},
    ])
    def test_rejects(self, small_config, changes):
        with pytest.raises(ConfigError):
            run_corr_diagnostic(dataclasses.replace(small_config, **changes))


class TestHistogram:

    def test_histograms(self, small_config):
        cfg = dataclasses.replace(small_config, algorithms=["mfep", "lmmse_ep"], rho=[0.0])
        results = run_histogram(cfg)
        assert len(results) == 2 * 2
        for res in results:
            hist = res.histogram
            widths = np.diff(hist.bin_edges)
            assert np.sum(hist.density * widths) == pytest.approx(1.0)
            assert hist.total == cfg.trials * 2 * cfg.M
            assert res.trials == cfg.trials
        rows = read_csv(f"{cfg.output}_hist_summary.csv")
        assert "tail_4sigma_fraction" in rows[0]

    def test_rejects(self, small_config):
        with pytest.raises(ConfigError):
            run_histogram(small_config)
        with pytest.raises(ConfigError):
            run_histogram(dataclasses.replace(small_config, algorithms=["gamp"]), t=9)


class TestDenoiserCurve:

    def test_curves(self, small_config):
        curves = run_denoiser_curve(small_config, points=51)
        assert [c.c_sq_beta for c in curves] == [0.2, 1.0, 5.0]
        for curve in curves:
            assert np.all(np.diff(curve.re_mean) >= -1e-12)
        rows = read_csv(f"{small_config.output}_denoiser.csv")
        assert len(rows) == 3 * 51

    def test_colder_curve_is_flatter(self, small_config):
        cold, hot = run_denoiser_curve(small_config, (0.2, 5.0), points=11, write=False)
        assert abs(cold.re_mean[-1]) < abs(hot.re_mean[-1])

    @pytest.mark.parametrize("betas,points", [((0.0,), 10), ((1.0,), 1)])
    def test_rejects(self, small_config, betas, points):
        with pytest.raises(ConfigError):
            run_denoiser_curve(small_config, betas, points)


class TestRecords:

    def test_binomial_ci(self):
        low, high = binomial_ci(0, 100)
        assert low == 0.0 and high == 0.0
        low, high = binomial_ci(50, 100)
        assert low == pytest.approx(0.5 - 1.959964 * 0.05, rel=1e-5)
        assert binomial_ci(0, 0) == (0.0, 1.0)
