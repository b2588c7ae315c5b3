"""
Experiment configuration: defaults, .env, JSON file and CLI overrides.
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from ..constellation import SUPPORTED_ORDERS, Constellation, make_qam
from ..denoiser import DEFAULT_D1, DEFAULT_D2, AnnealSchedule
from ..detectors.base import Algorithm, DetectorConfig, TraceLevel
from ..exceptions import ConfigError
from ..utils.config import load_env_defaults

logger = logging.getLogger('mpdetect.harness.config')

ADD_SUFFIX = "+add"

# Default configuration
DEFAULT_CONFIG: Dict[str, Any] = {
    "M": 16,
    "N": 32,
    "Q": 4,
    "rho": [0.0],
    "esn0_db": [10.0],
    "T": 64,
    "iteration_counts": [16, 32, 64],
    "algorithms": ["gabp+add", "mfep+add", "gamp+add", "lmmse", "lmmse_ep", "mfb"],
    "trials": 1000,
    "target_bit_errors": None,
    "max_trials": 1000000,
    "seed": 0,
    "damping": 0.5,
    "damp_variance": True,
    "d1": DEFAULT_D1,
    "d2": DEFAULT_D2,
    "es": 1.0,
    "final_annealed": True,
    "output": "results/mpdetect",
    "workers": 1,
    "chunk_size": 50,
    "snapshot_ts": [4, 20, 40, 60],
    "histogram_t": 60,
    "histogram_range": 8.05,
    "histogram_bin_width": 0.1,
}

LIST_KEYS = ("rho", "esn0_db", "iteration_counts", "algorithms", "snapshot_ts")


@dataclass(frozen=True)
class AlgorithmSpec:
    """An algorithm name plus whether it runs with the annealed denoiser."""
    algorithm: Algorithm
    annealed: bool = False

    @classmethod
    def parse(cls, name: str) -> 'AlgorithmSpec':
        text = str(name).strip().lower()
        annealed = text.endswith(ADD_SUFFIX)
        if annealed:
            text = text[:-len(ADD_SUFFIX)]
        try:
            algorithm = Algorithm(text)
        except ValueError:
            valid = ", ".join(a.value for a in Algorithm)
            raise ConfigError(f"Unknown algorithm '{name}'; valid names are {valid} (MPAs accept '{ADD_SUFFIX}')")
        if annealed and not algorithm.is_message_passing:
            raise ConfigError(f"The annealed denoiser only applies to gabp, mfep and gamp, not '{algorithm.value}'")
        return cls(algorithm=algorithm, annealed=annealed)

    @property
    def label(self) -> str:
        return self.algorithm.value + (ADD_SUFFIX if self.annealed else "")

    @property
    def denoiser_mode(self) -> str:
        if not self.algorithm.is_iterative:
            return "none"
        return "annealed" if self.annealed else "plain"


@dataclass
class ExperimentConfig:
    """Resolved experiment settings.

    Exactly one of ``trials`` and ``target_bit_errors`` is set.
    """
    M: int = 16
    N: int = 32
    Q: int = 4
    rho: List[float] = field(default_factory=lambda: [0.0])
    esn0_db: List[float] = field(default_factory=lambda: [10.0])
    T: int = 64
    iteration_counts: List[int] = field(default_factory=lambda: [16, 32, 64])
    algorithms: List[str] = field(default_factory=lambda: list(DEFAULT_CONFIG["algorithms"]))
    trials: Optional[int] = 1000
    target_bit_errors: Optional[int] = None
    max_trials: int = 1000000
    seed: int = 0
    damping: float = 0.5
    damp_variance: bool = True
    d1: float = DEFAULT_D1
    d2: float = DEFAULT_D2
    es: float = 1.0
    final_annealed: bool = True
    output: str = "results/mpdetect"
    workers: int = 1
    chunk_size: int = 50
    snapshot_ts: List[int] = field(default_factory=lambda: [4, 20, 40, 60])
    histogram_t: int = 60
    histogram_range: float = 8.05
    histogram_bin_width: float = 0.1

    @property
    def xi(self) -> float:
        return self.N / self.M

    @property
    def algorithm_specs(self) -> List[AlgorithmSpec]:
        return [AlgorithmSpec.parse(name) for name in self.algorithms]

    def constellation(self) -> Constellation:
        return make_qam(self.Q, self.es)

    def detector_config(self, spec: AlgorithmSpec, T: Optional[int] = None,
                        trace_level: TraceLevel = TraceLevel.NONE,
                        cons: Optional[Constellation] = None) -> DetectorConfig:
        """DetectorConfig for one algorithm of this experiment."""
        T = self.T if T is None else T
        schedule = None
        if spec.annealed:
            cons = cons or self.constellation()
            schedule = AnnealSchedule.for_constellation(cons, T, self.d1, self.d2)
        return DetectorConfig(
            algorithm=spec.algorithm,
            T=T,
            damping=self.damping,
            schedule=schedule,
            trace_level=trace_level,
            final_annealed=self.final_annealed,
            damp_variance=self.damp_variance,
        )

    def validate(self) -> 'ExperimentConfig':
        """Check every field; raises ConfigError on the first problem."""
        for name in ("M", "N", "T", "max_trials", "workers", "chunk_size", "histogram_t"):
            value = getattr(self, name)
            if not _is_int(value) or value < 1:
                raise ConfigError(f"'{name}' must be a positive integer, got {value!r}")
        if self.Q not in SUPPORTED_ORDERS:
            raise ConfigError(f"'Q' must be one of {', '.join(map(str, SUPPORTED_ORDERS))}, got {self.Q!r}")
        if not _is_int(self.seed) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"'seed' must be a 64-bit non-negative integer, got {self.seed!r}")

        if (self.trials is None) == (self.target_bit_errors is None):
            raise ConfigError("Exactly one of 'trials' and 'target_bit_errors' must be set")
        if self.trials is not None and (not _is_int(self.trials) or self.trials < 1):
            raise ConfigError(f"'trials' must be a positive integer, got {self.trials!r}")
        if self.target_bit_errors is not None and (not _is_int(self.target_bit_errors)
                                                   or self.target_bit_errors < 1):
            raise ConfigError(f"'target_bit_errors' must be a positive integer, got {self.target_bit_errors!r}")

        if not self.rho:
            raise ConfigError("'rho' must list at least one correlation coefficient")
        for rho in self.rho:
            if not _is_number(rho) or not 0.0 <= rho < 1.0:
                raise ConfigError(f"Correlation coefficient must lie in [0, 1), got {rho!r}")
        if not self.esn0_db or not all(_is_number(v) for v in self.esn0_db):
            raise ConfigError("'esn0_db' must list at least one Es/N0 value in dB")

        if not self.algorithms:
            raise ConfigError("'algorithms' must name at least one algorithm")
        labels = [spec.label for spec in self.algorithm_specs]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"Duplicate algorithms in {labels}")

        if not _is_number(self.damping) or not 0.0 < self.damping <= 1.0:
            raise ConfigError(f"'damping' must lie in (0, 1], got {self.damping!r}")
        for name in ("d1", "d2", "es", "histogram_range", "histogram_bin_width"):
            value = getattr(self, name)
            if not _is_number(value) or value <= 0:
                raise ConfigError(f"'{name}' must be positive, got {value!r}")
        for name in ("iteration_counts", "snapshot_ts"):
            values = getattr(self, name)
            if not values or not all(_is_int(v) and v >= 1 for v in values):
                raise ConfigError(f"'{name}' must list positive integers, got {values!r}")
        return self

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _as_list(key: str, value):
    if key in LIST_KEYS and not isinstance(value, (list, tuple)):
        return [value]
    return list(value) if isinstance(value, tuple) else value


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a JSON experiment file.

    Raises:
        ConfigError: If the file cannot be read, is not a JSON object or has unknown keys.
    """
    path = Path(path)
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config file {path} must contain a JSON object")
    unknown = sorted(set(data) - set(DEFAULT_CONFIG))
    if unknown:
        raise ConfigError(f"Unknown config keys in {path}: {', '.join(unknown)}")
    return data


def load_experiment_config(path: Optional[Union[str, Path]] = None,
                           overrides: Optional[Mapping[str, Any]] = None,
                           environ: Optional[Mapping[str, str]] = None) -> ExperimentConfig:
    """Resolve an experiment configuration.

    Precedence, lowest first: built-in defaults, .env / environment,
    JSON file, ``overrides`` (None values are ignored).

    Raises:
        ConfigError: If the resolved configuration is invalid.
    """
    data = dict(DEFAULT_CONFIG)
    data.update(load_env_defaults(environ))

    explicit: Dict[str, Any] = {}
    if path is not None:
        explicit.update(load_config_file(path))
    explicit.update({k: v for k, v in (overrides or {}).items() if v is not None})

    if "target_bit_errors" in explicit and explicit["target_bit_errors"] is not None and "trials" not in explicit:
        explicit["trials"] = None
    data.update(explicit)

    unknown = sorted(set(data) - set(DEFAULT_CONFIG))
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")

    cfg = ExperimentConfig(**{key: _as_list(key, value) for key, value in data.items()})
    logger.debug(f"Resolved experiment config: {cfg.to_dict()}")
    return cfg.validate()


__all__ = [
    'DEFAULT_CONFIG',
    'AlgorithmSpec',
    'ExperimentConfig',
    'load_config_file',
    'load_experiment_config',
]
