"""Shared plumbing for the experiment commands: logging setup, common options and exit codes."""
import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Optional

import click
import numpy as np
from rich.console import Console

from ...exceptions import ConfigError, MPDetectError
from ...utils.logging_utils import configure_logging, log_exception

logger = logging.getLogger('mpdetect.cli')

EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2


class BaseCommand(ABC):
    """A CLI subcommand: subclasses declare their options and implement ``execute``."""

    def __init__(self, debug: bool = False, log_file: Optional[str] = None):
        self.debug = debug
        self.log_file = log_file
        self.console = Console()
        self.setup_logging()

    def setup_logging(self) -> None:
        configure_logging(debug=self.debug, log_file=self.log_file)

    @abstractmethod
    def execute(self, **kwargs) -> Any:
        """Run the command with the parsed click options."""

    @classmethod
    def create_click_command(cls) -> click.Command:
        """Create a Click command from this class.

        Configuration errors exit with code 1, runtime and numerical
        failures with code 2.

        Returns:
            click.Command: Configured Click command
        """
        @click.pass_context
        def callback(ctx, **kwargs):
            """Click command callback."""
            parent = ctx.obj or {}
            command = cls(
                debug=kwargs.pop('debug', False) or parent.get('debug', False),
                log_file=kwargs.pop('log_file', None) or parent.get('log_file'),
            )
            try:
                command.execute(**kwargs)
            except ConfigError as e:
                log_exception(logger, e, "Configuration error:")
                command.console.print(f"[red]Configuration error: {e}[/red]")
                ctx.exit(EXIT_CONFIG_ERROR)
            except (MPDetectError, OSError, np.linalg.LinAlgError, FloatingPointError) as e:
                log_exception(logger, e, "Run failed:")
                command.console.print(f"[red]Run failed: {e}[/red]")
                ctx.exit(EXIT_RUNTIME_ERROR)

        cmd_config = cls.get_command_config()

        cmd = click.Command(
            name=cmd_config['name'],
            help=cmd_config.get('help', ''),
            callback=callback
        )

        cmd.params.extend([
            click.Option(
                ['--debug'],
                is_flag=True,
                help='Enable debug logging'
            ),
            click.Option(
                ['--log-file'],
                type=click.Path(dir_okay=False, writable=True),
                help='Path to log file'
            )
        ])

        for option in cmd_config.get('options', []):
            cmd.params.append(click.Option(option['param_decls'], **option['kwargs']))

        return cmd

    @classmethod
    @abstractmethod
    def get_command_config(cls) -> Dict[str, Any]:
        """Get command configuration for Click.

        Returns:
            Dict with 'name', 'help' and a list of 'options', each given as
            {'param_decls': [...], 'kwargs': {...}}.
        """
        pass
