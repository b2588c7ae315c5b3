"""
Monte-Carlo experiment harness.
"""
from .config import DEFAULT_CONFIG, AlgorithmSpec, ExperimentConfig, load_experiment_config
from .engine import MonteCarloEngine, TaskKind, draw_trial, pairwise_reduce, plan_chunks, run_chunk
from .records import BerRecord, CorrSnapshot, HistogramResult, IterationBerRecord, records_to_csv
from .sweeps import (check_rho_monotonicity, run_ber_sweep, run_corr_diagnostic, run_denoiser_curve,
                     run_histogram, run_iteration_trace, run_rho_sweep)

__all__ = [
    'DEFAULT_CONFIG', 'AlgorithmSpec', 'ExperimentConfig', 'load_experiment_config',
    'MonteCarloEngine', 'TaskKind', 'draw_trial', 'pairwise_reduce', 'plan_chunks', 'run_chunk',
    'BerRecord', 'CorrSnapshot', 'HistogramResult', 'IterationBerRecord', 'records_to_csv',
    'check_rho_monotonicity', 'run_ber_sweep', 'run_corr_diagnostic', 'run_denoiser_curve',
    'run_histogram', 'run_iteration_trace', 'run_rho_sweep',
]
