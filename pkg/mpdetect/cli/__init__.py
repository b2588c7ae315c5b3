"""Command line interface for mpdetect."""
from .main import cli, main

__all__ = ['cli', 'main']
