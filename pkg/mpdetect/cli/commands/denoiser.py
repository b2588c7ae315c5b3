"""Annealed denoiser curve command."""
from typing import Any, Dict, Optional, Tuple

import click
from rich.table import Table

from ...harness import load_experiment_config, run_denoiser_curve
from ...harness.sweeps import DEFAULT_C_SQ_BETAS
from ..commands.base import BaseCommand
from ..utils import display_output


class DenoiserCurveCommand(BaseCommand):
    """Write Re[eta_beta(y)] along the real axis for a few inverse temperatures."""

    @classmethod
    def get_command_config(cls) -> Dict[str, Any]:
        return {
            'name': 'denoiser-curve',
            'help': 'Output of the annealed denoiser along the real axis for several c^2 beta values',
            'options': [
                {
                    'param_decls': ['--config', 'config_path'],
                    'kwargs': {
                        'type': click.Path(exists=True, dir_okay=False),
                        'default': None,
                        'help': 'JSON experiment configuration file'
                    }
                },
                {'param_decls': ['--Q', 'Q'], 'kwargs': {'type': int, 'default': None, 'help': 'QAM order'}},
                {
                    'param_decls': ['--c2beta', 'c_sq_betas'],
                    'kwargs': {'type': float, 'multiple': True,
                               'help': f'Normalised inverse temperature; default {list(DEFAULT_C_SQ_BETAS)}'}
                },
                {
                    'param_decls': ['--points'],
                    'kwargs': {'type': int, 'default': 401, 'help': 'Number of points on the real axis'}
                },
                {'param_decls': ['--out', 'output'], 'kwargs': {'type': str, 'default': None, 'help': 'Output path prefix'}},
            ]
        }

    def execute(self, config_path: Optional[str] = None, Q: Optional[int] = None,
                c_sq_betas: Tuple[float, ...] = (), points: int = 401,
                output: Optional[str] = None, **kwargs) -> None:
        cfg = load_experiment_config(config_path, {'Q': Q, 'output': output})
        curves = run_denoiser_curve(cfg, tuple(c_sq_betas) or DEFAULT_C_SQ_BETAS, points)

        table = Table(title=f"Annealed denoiser, {cfg.Q}-QAM", show_header=True, header_style="bold magenta")
        table.add_column("c^2 beta", style="cyan", justify="right")
        table.add_column("Re y", justify="right")
        table.add_column("Re eta", justify="right", style="green")
        for curve in curves:
            for index in (0, len(curve.re_y) // 2, len(curve.re_y) - 1):
                table.add_row(f"{curve.c_sq_beta:g}", f"{curve.re_y[index]:.3f}", f"{curve.re_mean[index]:.4f}")
        self.console.print(table)
        display_output(cfg.output)


def register_commands(cli_group):
    """Register the denoiser command with the CLI group."""
    cli_group.add_command(DenoiserCurveCommand.create_click_command())
