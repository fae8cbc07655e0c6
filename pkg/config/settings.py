"""
Training and evaluation configuration: dataclasses, defaults and TOML loading

Precedence when the CLI builds a config: command-line flag > config file >
built-in default.
"""

from dataclasses import asdict, dataclass, fields, is_dataclass, replace

import toml

from utils.exceptions import ConfigError

# Defaults used for every experiment unless overridden
DEFAULT_ETA = 0.1
DEFAULT_GAMMA = 50.0
DEFAULT_MAX_OUTER_ITERS = 1000
DEFAULT_INNER_STEPS = 1
DEFAULT_PASSES = 300
DEFAULT_STEP = 1.0
DEFAULT_FOLDS = 10
DEFAULT_REPEATS = 10


def _require(condition, message):
    if not condition:
        raise ConfigError(message)


@dataclass(frozen=True)
class BatchConfig:
    """
    Batch trainer settings

    gamma is compared against a sum of gradient norms, so it scales with the
    number of samples and the feature magnitudes. backtrack halves any step
    that would raise the criterion; keep_best returns the iterate with the
    fewest training errors rather than the last one.
    """

    K: int = 1
    eta: float = DEFAULT_ETA
    gamma: float = DEFAULT_GAMMA
    max_outer_iters: int = DEFAULT_MAX_OUTER_ITERS
    inner_steps: int = DEFAULT_INNER_STEPS
    seed: int = 0
    backtrack: bool = True
    keep_best: bool = True

    def __post_init__(self):
        _require(self.K >= 1, f"K must be >= 1, got {self.K}")
        _require(self.eta > 0, f"eta must be positive, got {self.eta}")
        _require(self.gamma > 0, f"gamma must be positive, got {self.gamma}")
        _require(self.max_outer_iters >= 1, f"max_outer_iters must be >= 1, got {self.max_outer_iters}")
        _require(self.inner_steps >= 1, f"inner_steps must be >= 1, got {self.inner_steps}")


@dataclass(frozen=True)
class OnlineConfig:
    """Online trainer settings"""

    K: int = 1
    passes: int = DEFAULT_PASSES
    step: float = DEFAULT_STEP
    seed: int = 0
    shuffle_each_pass: bool = False
    early_stop: bool = True

    def __post_init__(self):
        _require(self.K >= 1, f"K must be >= 1, got {self.K}")
        _require(self.passes >= 1, f"passes must be >= 1, got {self.passes}")
        _require(self.step > 0, f"step must be positive, got {self.step}")


@dataclass(frozen=True)
class CvConfig:
    """Cross-validation protocol settings"""

    folds: int = DEFAULT_FOLDS
    repeats: int = DEFAULT_REPEATS
    seed: int = 0
    n_jobs: int = 1

    def __post_init__(self):
        _require(self.folds >= 2, f"folds must be >= 2, got {self.folds}")
        _require(self.repeats >= 1, f"repeats must be >= 1, got {self.repeats}")


SECTIONS = {"batch": BatchConfig, "online": OnlineConfig, "cv": CvConfig}


def load_settings(path=None):
    """
    Read a TOML file with optional [batch], [online] and [cv] tables

    Args:
        path: File path or None for built-in defaults only

    Returns:
        Dict mapping section name to a dict of overrides
    """
    if path is None:
        return {name: {} for name in SECTIONS}

    try:
        raw = toml.load(path)
    except toml.TomlDecodeError as e:
        raise ConfigError(f"invalid config file {path}: {e}") from e

    unknown_sections = set(raw) - set(SECTIONS)
    if unknown_sections:
        raise ConfigError(f"unknown config sections: {', '.join(sorted(unknown_sections))}")

    settings = {}
    for name, cls in SECTIONS.items():
        section = raw.get(name, {})
        allowed = {f.name for f in fields(cls)}
        unknown = set(section) - allowed
        if unknown:
            raise ConfigError(f"unknown keys in [{name}]: {', '.join(sorted(unknown))}")
        settings[name] = dict(section)
    return settings


def build_config(cls, file_values=None, **overrides):
    """
    Instantiate a config dataclass from file values plus explicit overrides

    Overrides equal to None are ignored, so unset CLI flags fall through to
    the file value and then to the dataclass default.
    """
    values = dict(file_values or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls(**values)
    except TypeError as e:
        raise ConfigError(str(e)) from e


def with_seed(cfg, seed):
    """Copy of a trainer config with a different seed; non-dataclass configs pass through"""
    if is_dataclass(cfg):
        return replace(cfg, seed=seed)
    return cfg


def config_echo(cfg):
    """Flat dict of a config, for reports"""
    if is_dataclass(cfg):
        return asdict(cfg)
    return dict(cfg) if isinstance(cfg, dict) else {}
