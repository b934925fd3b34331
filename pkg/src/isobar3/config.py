"""Run configuration: defaults, TOML loading, env overrides, validation.

A config is rejected as a whole before any work starts; commands never
see a partially valid one.
"""

import dataclasses
import os
from dataclasses import dataclass

try:
    import tomllib
except ModuleNotFoundError:  # 3.10
    import tomli as tomllib

from .errors import ConfigError

CACHE_ENV = "ISOBAR3_CACHE_DIR"


@dataclass(frozen=True)
class RunConfig:
    n: int = 1_000_000          # table length for sieve/sums/probe
    weight: int = 12
    fit_n: int = 4_194_304      # table length for the error-exponent fit
    deep_n: int = 10_000_000    # large-scale timing run inside verify-all
    grid_lo_exp: int = 10
    grid_hi_exp: int = 22
    window_exponent: float = 0.495
    window_count: int = 200
    window_x_lo: int = 1_000_000
    window_x_hi: int = 2_000_000
    probe_x: float = 1_000_000.0
    probe_t_exponent: float = 0.52
    seed: int = 0
    target_digits: int = 10
    threads: int = 1
    out_dir: str = "out"
    cache_dir: str = ".isobar3-cache"

    def to_json(self):
        return dataclasses.asdict(self)


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_INT_FIELDS = {n for n, t in _FIELDS.items() if t is int or t == "int"}
_FLOAT_FIELDS = {n for n, t in _FIELDS.items() if t is float or t == "float"}


def _coerce(key, value):
    if key in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key} must be an integer, got {value!r}")
        return value
    if key in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{key} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{key} must be a string, got {value!r}")
    return value


def validate(cfg):
    if cfg.n < 1:
        raise ConfigError("n must be positive")
    if cfg.weight < 12 or cfg.weight % 2:
        raise ConfigError("weight must be an even integer >= 12")
    if not 0 < cfg.grid_lo_exp < cfg.grid_hi_exp:
        raise ConfigError("need 0 < grid_lo_exp < grid_hi_exp")
    if cfg.fit_n < 2 ** cfg.grid_hi_exp:
        raise ConfigError("fit_n must cover the top of the dyadic grid")
    if not 0.0 < cfg.window_exponent < 1.0:
        raise ConfigError("window_exponent must lie in (0, 1)")
    if cfg.window_count < 2:
        raise ConfigError("window_count must be at least 2")
    if not 1 <= cfg.window_x_lo < cfg.window_x_hi:
        raise ConfigError("need 1 <= window_x_lo < window_x_hi")
    if cfg.probe_x < 100.0:
        raise ConfigError("probe_x is too small for a meaningful sweep")
    if not 1.0 / 3.0 < cfg.probe_t_exponent < 1.0:
        raise ConfigError("probe_t_exponent must lie in (1/3, 1)")
    if cfg.deep_n < cfg.n:
        raise ConfigError("deep_n must be at least n")
    if cfg.target_digits < 1:
        raise ConfigError("target_digits must be positive")
    if cfg.threads < 1:
        raise ConfigError("threads must be positive")
    return cfg


def load_config(path=None, overrides=None):
    """Defaults, then the TOML file, then ISOBAR3_CACHE_DIR, then explicit
    overrides (CLI flags); the merged result is validated once."""
    values = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"malformed TOML in {path}: {exc}") from exc
        for key, value in data.items():
            if key not in _FIELDS:
                raise ConfigError(f"unknown config key {key!r}")
            values[key] = _coerce(key, value)

    env_cache = os.environ.get(CACHE_ENV)
    if env_cache:
        values["cache_dir"] = env_cache

    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in _FIELDS:
                raise ConfigError(f"unknown override {key!r}")
            values[key] = _coerce(key, value)

    return validate(RunConfig(**values))


def lambda_cache_path(cfg, n=None):
    n = cfg.n if n is None else n
    return os.path.join(cfg.cache_dir, f"lambda_k{cfg.weight}_n{n}.bin")
