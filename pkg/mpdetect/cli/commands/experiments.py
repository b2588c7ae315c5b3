"""Monte-Carlo experiment commands for the CLI."""
from abc import abstractmethod
from typing import Any, Dict, List, Optional, Tuple

import click

from ...harness import (ExperimentConfig, load_experiment_config, run_ber_sweep, run_corr_diagnostic,
                        run_histogram, run_iteration_trace, run_rho_sweep)
from ..commands.base import BaseCommand
from ..utils import (display_ber_records, display_corr_snapshots, display_histograms,
                     display_iteration_records, display_output, trial_progress)

# Options shared by every experiment command; values override the config file.
COMMON_OPTIONS: List[Dict[str, Any]] = [
    {
        'param_decls': ['--config', 'config_path'],
        'kwargs': {
            'type': click.Path(exists=True, dir_okay=False),
            'default': None,
            'help': 'JSON experiment configuration file'
        }
    },
    {'param_decls': ['--M', 'M'], 'kwargs': {'type': int, 'default': None, 'help': 'Number of unknowns (transmit streams)'}},
    {'param_decls': ['--N', 'N'], 'kwargs': {'type': int, 'default': None, 'help': 'Number of observations (receive antennas)'}},
    {'param_decls': ['--Q', 'Q'], 'kwargs': {'type': int, 'default': None, 'help': 'QAM order (4, 16 or 64)'}},
    {
        'param_decls': ['--rho'],
        'kwargs': {'type': float, 'multiple': True, 'help': 'Receive correlation coefficient; repeat for a list'}
    },
    {
        'param_decls': ['--esn0', 'esn0_db'],
        'kwargs': {'type': float, 'multiple': True, 'help': 'Es/N0 in dB; repeat for a list'}
    },
    {
        'param_decls': ['--alg', 'algorithms'],
        'kwargs': {
            'multiple': True,
            'help': 'Algorithm (gabp, mfep, gamp, lmmse, lmmse_ep, mfb; append +add for the annealed denoiser)'
        }
    },
    {'param_decls': ['--trials'], 'kwargs': {'type': int, 'default': None, 'help': 'Number of Monte-Carlo trials'}},
    {
        'param_decls': ['--target-errors', 'target_bit_errors'],
        'kwargs': {'type': int, 'default': None, 'help': 'Run until every point has this many bit errors'}
    },
    {'param_decls': ['--seed'], 'kwargs': {'type': int, 'default': None, 'help': 'Master random seed'}},
    {'param_decls': ['--out', 'output'], 'kwargs': {'type': str, 'default': None, 'help': 'Output path prefix'}},
    {'param_decls': ['--workers'], 'kwargs': {'type': int, 'default': None, 'help': 'Worker processes'}},
    {
        'param_decls': ['--no-progress'],
        'kwargs': {'is_flag': True, 'help': 'Hide the progress bar'}
    },
]

OVERRIDE_KEYS = ('M', 'N', 'Q', 'rho', 'esn0_db', 'algorithms', 'trials', 'target_bit_errors',
                 'seed', 'output', 'workers')


def build_overrides(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    """CLI values that were actually given; repeated options become lists."""
    overrides = {}
    for key in OVERRIDE_KEYS:
        value = kwargs.get(key)
        if isinstance(value, tuple):
            value = list(value) or None
        if value is not None:
            overrides[key] = value
    return overrides


class ExperimentCommand(BaseCommand):
    """Base class for commands that run the Monte-Carlo engine."""

    name: str = ""
    help: str = ""
    extra_options: List[Dict[str, Any]] = []

    @classmethod
    def get_command_config(cls) -> Dict[str, Any]:
        return {
            'name': cls.name,
            'help': cls.help,
            'options': COMMON_OPTIONS + cls.extra_options,
        }

    def load_config(self, config_path: Optional[str], kwargs: Dict[str, Any]) -> ExperimentConfig:
        return load_experiment_config(config_path, build_overrides(kwargs))

    def execute(self, config_path: Optional[str] = None, no_progress: bool = False, **kwargs) -> Any:
        cfg = self.load_config(config_path, kwargs)
        with trial_progress(self.name, enabled=not no_progress) as progress:
            result = self.run(cfg, progress, **kwargs)
        self.show(result)
        display_output(cfg.output)
        return result

    @abstractmethod
    def run(self, cfg: ExperimentConfig, progress, **kwargs) -> Any:
        pass

    @abstractmethod
    def show(self, result: Any) -> None:
        pass


class BerSweepCommand(ExperimentCommand):
    """BER against Es/N0."""

    name = 'ber-sweep'
    help = 'BER of every algorithm over the Es/N0 grid'

    def run(self, cfg, progress, **kwargs):
        return run_ber_sweep(cfg, progress)

    def show(self, result) -> None:
        display_ber_records(result, title="BER vs Es/N0")


class RhoSweepCommand(ExperimentCommand):
    """BER against the receive correlation coefficient."""

    name = 'rho-sweep'
    help = 'BER of every algorithm over the correlation grid at one Es/N0'

    def run(self, cfg, progress, **kwargs):
        return run_rho_sweep(cfg, progress)

    def show(self, result) -> None:
        display_ber_records(result, title="BER vs rho")


class IterationTraceCommand(ExperimentCommand):
    """BER after every iteration."""

    name = 'iter-trace'
    help = 'Hard-decision BER after each iteration for every T in the iteration list'
    extra_options = [
        {
            'param_decls': ['--iterations', 'iteration_counts'],
            'kwargs': {'type': int, 'multiple': True, 'help': 'Iteration count T; repeat for a list'}
        },
    ]

    def load_config(self, config_path, kwargs) -> ExperimentConfig:
        overrides = build_overrides(kwargs)
        if kwargs.get('iteration_counts'):
            overrides['iteration_counts'] = list(kwargs['iteration_counts'])
        return load_experiment_config(config_path, overrides)

    def run(self, cfg, progress, **kwargs):
        return run_iteration_trace(cfg, progress)

    def show(self, result) -> None:
        display_iteration_records(result)


class CorrDiagCommand(ExperimentCommand):
    """Effective-noise correlation snapshots."""

    name = 'corr-diag'
    help = 'Correlation matrices of the effective noise at snapshot iterations'
    extra_options = [
        {
            'param_decls': ['--t', 'snapshot_ts'],
            'kwargs': {'type': int, 'multiple': True, 'help': 'Snapshot iteration; repeat for a list'}
        },
    ]

    def run(self, cfg, progress, snapshot_ts: Tuple[int, ...] = (), **kwargs):
        return run_corr_diagnostic(cfg, list(snapshot_ts) or None, progress)

    def show(self, result) -> None:
        display_corr_snapshots(result)


class HistogramCommand(ExperimentCommand):
    """Belief residual histograms."""

    name = 'histogram'
    help = 'Histograms of standardized belief residuals with a Gaussian overlay'
    extra_options = [
        {
            'param_decls': ['--t', 'histogram_t'],
            'kwargs': {'type': int, 'default': None, 'help': 'Iteration whose beliefs are histogrammed'}
        },
    ]

    def run(self, cfg, progress, histogram_t: Optional[int] = None, **kwargs):
        return run_histogram(cfg, histogram_t, progress)

    def show(self, result) -> None:
        display_histograms(result)


COMMANDS = [BerSweepCommand, RhoSweepCommand, IterationTraceCommand, CorrDiagCommand, HistogramCommand]


def register_commands(cli_group):
    """Register experiment commands with the CLI group."""
    for command in COMMANDS:
        cli_group.add_command(command.create_click_command())
