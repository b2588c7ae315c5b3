"""
Detectors for discrete signals observed through a dense linear channel.
"""
from typing import Dict, Optional, Type

import numpy as np

from ..constellation import Constellation
from ..exceptions import DetectorError
from .base import (Algorithm, BaseDetector, DenoiserMode, DetectorConfig, DetectorRun, EdgeState,
                   GampState, IterationRecord, TraceLevel, apply_damping)
from .gabp import GaBPDetector, gabp_le, run_gabp
from .gamp import GAMPDetector, gamp_le, run_gamp
from .linear import (LMMSEDetector, LMMSEEPDetector, lmmse_estimate, matched_filter_bound,
                     run_lmmse, run_lmmse_ep, run_mfb)
from .mfep import MFEPDetector, moment_match, run_mfep

DETECTORS: Dict[Algorithm, Type[BaseDetector]] = {
    Algorithm.GABP: GaBPDetector,
    Algorithm.MFEP: MFEPDetector,
    Algorithm.GAMP: GAMPDetector,
    Algorithm.LMMSE: LMMSEDetector,
    Algorithm.LMMSE_EP: LMMSEEPDetector,
}


def run_detector(y, A, N0, cons: Constellation, cfg: DetectorConfig,
                 x_true: Optional[np.ndarray] = None) -> DetectorRun:
    """Dispatch to the detector named by ``cfg.algorithm``.

    The matched-filter bound needs the true symbols and is served by
    :func:`matched_filter_bound`.
    """
    if cfg.algorithm is Algorithm.MFB:
        if x_true is None:
            raise DetectorError("The matched-filter bound requires the true symbols")
        return matched_filter_bound(y, A, x_true, N0, cons)
    return DETECTORS[cfg.algorithm](cons, cfg).detect(y, A, N0, x_true)


__all__ = [
    'Algorithm', 'BaseDetector', 'DenoiserMode', 'DetectorConfig', 'DetectorRun', 'EdgeState',
    'GampState', 'IterationRecord', 'TraceLevel', 'apply_damping', 'DETECTORS', 'run_detector',
    'GaBPDetector', 'MFEPDetector', 'GAMPDetector', 'LMMSEDetector', 'LMMSEEPDetector',
    'gabp_le', 'gamp_le', 'moment_match', 'lmmse_estimate', 'matched_filter_bound',
    'run_gabp', 'run_mfep', 'run_gamp', 'run_lmmse', 'run_lmmse_ep', 'run_mfb',
]
