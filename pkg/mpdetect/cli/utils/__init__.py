"""CLI utility functions."""

from .display import (
    display_ber_records,
    display_corr_snapshots,
    display_histograms,
    display_iteration_records,
    display_output,
    trial_progress,
)

__all__ = [
    'display_ber_records',
    'display_corr_snapshots',
    'display_histograms',
    'display_iteration_records',
    'display_output',
    'trial_progress',
]
