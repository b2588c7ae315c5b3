"""Command modules for the mpdetect CLI."""
from . import denoiser, experiments


def register_commands(cli_group):
    """Register all commands with the CLI.

    Args:
        cli_group: The main Click command group
    """
    experiments.register_commands(cli_group)
    denoiser.register_commands(cli_group)
