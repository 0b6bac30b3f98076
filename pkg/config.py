"""Environment settings, scenario files and logging setup."""

from dataclasses import dataclass
import logging
import os
from pathlib import Path
import sys
from typing import Literal, Optional

from dotenv import load_dotenv
# Not public API: parse_stream and Binding.original need the python-dotenv pin in requirements.txt.
from dotenv.parser import parse_stream
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from errors import ConfigError, InvalidParameterError
from integrator import DEFAULT_DT, InitialCondition
from model import SystemParams, default_params

load_dotenv()

LOG_FORMAT = '[%(asctime)s] %(levelname)s %(name)s: %(message)s'

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Settings:
    """Process-wide defaults read from the environment (or a local .env)."""

    log_level: str
    dt: float
    output_dir: Path
    workers: int


def _env_number(name, default, cast):
    raw = os.getenv(name)
    if raw is None or raw.strip() == '':
        return default
    try:
        value = cast(raw)
    except ValueError:
        raise ConfigError(f"environment variable {name}={raw!r} is not a valid {cast.__name__}")
    if value <= 0:
        raise ConfigError(f"environment variable {name} must be > 0, got {raw!r}")
    return value


def get_settings():
    """Read LAMBDA3_* environment variables, falling back to built-in defaults."""
    return Settings(
        log_level=os.getenv('LAMBDA3_LOG_LEVEL', 'WARNING').upper(),
        dt=_env_number('LAMBDA3_DT', DEFAULT_DT, float),
        output_dir=Path(os.getenv('LAMBDA3_OUTPUT_DIR', 'repro_output')),
        workers=_env_number('LAMBDA3_WORKERS', 1, int),
    )


def configure_logging(level='WARNING'):
    """Send log records to stderr with a timestamp prefix; stdout stays data-only."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, '_lambda3', False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler._lambda3 = True
    root.addHandler(handler)
    root.setLevel(level)


def _split_numbers(value):
    if isinstance(value, str):
        parts = [part.strip() for part in value.split(',')]
        return [part for part in parts if part]
    return value


class ScenarioConfig(BaseModel):
    """A fully validated scenario: physical parameters plus run controls."""

    model_config = ConfigDict(extra='forbid', frozen=True)

    t1: float = Field(default_factory=lambda: default_params().t1, gt=0)
    t2: float = Field(default_factory=lambda: default_params().t2, gt=0)
    k21: float = Field(default_factory=lambda: default_params().k21, ge=0)
    k02: float = Field(default_factory=lambda: default_params().k02, gt=0)
    omega: float = Field(default=0.0, ge=0)
    omegas: Optional[list[float]] = None
    t_end: float = Field(default=14.0, gt=0)
    dt: float = Field(default=DEFAULT_DT, gt=0)
    stride: int = Field(default=1, ge=1)
    init: tuple[float, float, float, float] = (0.0, 0.0, 1.0, 0.0)
    output: Optional[Path] = None
    format: Optional[Literal['csv', 'yaml']] = None
    bracket: Optional[tuple[float, float]] = None
    tol: float = Field(default=1e-3, gt=0)

    @field_validator('omegas', mode='before')
    @classmethod
    def _parse_omegas(cls, value):
        return _split_numbers(value)

    @field_validator('omegas')
    @classmethod
    def _check_omegas(cls, value):
        if value is not None:
            if not value:
                raise ValueError('must list at least one value')
            if any(w < 0 for w in value):
                raise ValueError('every omega must be >= 0')
        return value

    @field_validator('bracket', mode='before')
    @classmethod
    def _parse_bracket(cls, value):
        return _split_numbers(value)

    @field_validator('bracket')
    @classmethod
    def _check_bracket(cls, value):
        if value is not None and not 0 <= value[0] < value[1]:
            raise ValueError('needs 0 <= lo < hi')
        return value

    @field_validator('init', mode='before')
    @classmethod
    def _parse_init(cls, value):
        if isinstance(value, str):
            selector = value.strip().lower()
            if selector == 'excited':
                return InitialCondition.excited().as_array().tolist()
            if selector == 'ground':
                return InitialCondition.ground().as_array().tolist()
            return _split_numbers(value)
        return value

    @field_validator('init')
    @classmethod
    def _check_init(cls, value):
        InitialCondition(*value)
        return value

    def params(self, omega=None):
        """SystemParams for this scenario, optionally at another omega."""
        return SystemParams(
            t1=self.t1, t2=self.t2, k21=self.k21, k02=self.k02,
            omega=self.omega if omega is None else omega,
        )

    def initial_condition(self):
        return InitialCondition(*self.init)


def validate_config(values):
    """
    Build a ScenarioConfig, turning validation failures into ConfigError.

    Args:
        values: Mapping of key -> raw value (strings are coerced)

    Returns:
        ScenarioConfig
    """
    try:
        return ScenarioConfig(**values)
    except ValidationError as e:
        first = e.errors()[0]
        key = '.'.join(str(part) for part in first['loc']) or None
        if first['type'] == 'extra_forbidden':
            raise ConfigError('unknown key', key=key) from None
        message = first['msg']
        cause = (first.get('ctx') or {}).get('error')
        if isinstance(cause, InvalidParameterError):
            message = str(cause)
        raise ConfigError(message, key=key) from None


def _binding_line(binding):
    # The dotenv reader marks a binding before skipping leading blank lines.
    text = binding.original.string
    skipped = text[:len(text) - len(text.lstrip())]
    return binding.original.line + skipped.count('\n')


def read_config_file(path):
    """
    Parse a flat `key = value` file with `#` comments.

    Args:
        path: Path to the scenario file

    Returns:
        Dict of raw string values
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    values = {}
    with open(path, 'r', encoding='utf-8') as f:
        for binding in parse_stream(f):
            if binding.error:
                raise ConfigError('could not parse line', line=_binding_line(binding))
            if binding.key is None:
                continue
            line = _binding_line(binding)
            if binding.value is None or binding.value.strip() == '':
                raise ConfigError('missing value', line=line, key=binding.key)
            if binding.key in values:
                raise ConfigError('duplicate key', line=line, key=binding.key)
            values[binding.key] = binding.value.strip()

    logger.info("Read %d keys from %s", len(values), path)
    return values


def load_config(path, **overrides):
    """
    Load, default-fill and validate a scenario file.

    Args:
        path: Path to the scenario file
        **overrides: Values that take precedence over the file (None is ignored)

    Returns:
        ScenarioConfig
    """
    values = read_config_file(path)
    values.update({k: v for k, v in overrides.items() if v is not None})
    return validate_config(values)
