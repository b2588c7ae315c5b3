"""Main CLI entry point for mpdetect."""
from typing import Optional, Sequence

import click
from rich.console import Console

from .. import __version__
from .commands import register_commands


@click.group()
@click.version_option(version=__version__, prog_name="mpdetect")
@click.option('--debug/--no-debug', default=False, help='Enable debug logging')
@click.option('--log-file', type=click.Path(dir_okay=False, writable=True),
              help='Path to log file')
@click.pass_context
def cli(ctx: click.Context, debug: bool, log_file: str) -> None:
    """mpdetect - Monte-Carlo simulator for message-passing detection of discrete signals.

    Runs GaBP, MF-EP and GAMP (optionally with the annealed denoiser) against
    LMMSE, LMMSE-EP and the matched-filter bound on correlated MIMO channels,
    and writes plot-ready CSV files.
    """
    ctx.ensure_object(dict)
    ctx.obj['debug'] = debug
    ctx.obj['log_file'] = log_file

    if debug:
        console = Console(stderr=True)
        console.print(f"\\[debug] Executing command: {ctx.invoked_subcommand}")


register_commands(cli)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the CLI; returns the process exit code.

    Exit codes: 0 success, 1 configuration error, 2 runtime or numerical failure.
    """
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="mpdetect",
                      standalone_mode=False, obj={})
    except click.ClickException as e:
        e.show()
        return 1
    except click.Abort:
        return 1
    return rv if isinstance(rv, int) else 0


if __name__ == "__main__":
    raise SystemExit(main())
