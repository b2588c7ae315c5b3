#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
mpdetect: message-passing estimation of discrete signals from noisy linear measurements.

Provides GaBP, MF-EP and GAMP detectors with a plain or annealed discrete
denoiser, linear baselines, belief diagnostics and a Monte-Carlo harness for
correlated MIMO channels.
"""

__version__ = "0.1.0"

from .constellation import Constellation, demap_hard, make_qam, map_bits
from .denoiser import AnnealSchedule, DenoiseResult, annealed_denoise, bayes_denoise, beta_at
from .channel import ChannelRealization, CorrelationSpec, exp_correlation, make_observation, sample_channel
from .detectors import (Algorithm, DetectorConfig, DetectorRun, TraceLevel, apply_damping, run_detector,
                        run_gabp, run_gamp, run_lmmse, run_lmmse_ep, run_mfb, run_mfep)
from .exceptions import MPDetectError

__all__ = [
    '__version__',
    'Constellation', 'make_qam', 'map_bits', 'demap_hard',
    'AnnealSchedule', 'DenoiseResult', 'bayes_denoise', 'annealed_denoise', 'beta_at',
    'ChannelRealization', 'CorrelationSpec', 'exp_correlation', 'sample_channel', 'make_observation',
    'Algorithm', 'DetectorConfig', 'DetectorRun', 'TraceLevel', 'apply_damping', 'run_detector',
    'run_gabp', 'run_mfep', 'run_gamp', 'run_lmmse', 'run_lmmse_ep', 'run_mfb',
    'MPDetectError',
]
