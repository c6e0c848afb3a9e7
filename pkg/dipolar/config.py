"""Configuration management for dipolar runs."""

import json
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, field_validator

from dipolar.kernels.params import KernelParams, LayerSeparation, parse_ell
from dipolar.utils.exceptions import ConfigurationError, ValidationError

load_dotenv()


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}")


class Config:
    """Base configuration class."""

    BASE_DIR = Path(__file__).parent.parent
    LOG_DIR = Path(os.getenv("DIPOLAR_LOG_DIR", str(BASE_DIR / "logs")))
    OUTPUT_DIR = Path(os.getenv("DIPOLAR_OUTPUT_DIR", str(BASE_DIR / "output")))
    LOG_LEVEL = os.getenv("DIPOLAR_LOG_LEVEL", "INFO")

    # Discretization
    NODES = _env_int("DIPOLAR_NODES", 512)
    GAMMA_NODES = _env_int("DIPOLAR_GAMMA_NODES", 2048)
    GRID_DIRECT_LIMIT = _env_int("DIPOLAR_GRID_DIRECT_LIMIT", 20000)

    # Execution
    WORKERS = _env_int("DIPOLAR_WORKERS", os.cpu_count() or 1)
    SEED = _env_int("DIPOLAR_SEED", 20190101)

    @classmethod
    def init_dirs(cls):
        """Ensure log and output directories exist."""
        cls.LOG_DIR.mkdir(parents=True, exist_ok=True)
        cls.OUTPUT_DIR.mkdir(parents=True, exist_ok=True)


class DevelopmentConfig(Config):
    """Development configuration."""
    DEBUG = True


class ProductionConfig(Config):
    """Production configuration."""
    DEBUG = False


class TestingConfig(Config):
    """Testing configuration."""
    DEBUG = True

    NODES = 128
    GAMMA_NODES = 512
    WORKERS = 1


# Configuration mapping
config_map: Dict[str, Any] = {
    "development": DevelopmentConfig,
    "production": ProductionConfig,
    "testing": TestingConfig,
    "default": DevelopmentConfig,
}


def get_config(config_name: Optional[str] = None) -> Config:
    """Get configuration based on environment."""
    if config_name is None:
        config_name = os.getenv("DIPOLAR_ENV", "default")
    return config_map.get(config_name, DevelopmentConfig)


class RunConfig(BaseModel):
    """Validated settings of one command-line run."""

    command: str = "energy"
    lam: float = Field(1.0, alias="lambda", ge=0.0)
    delta: Optional[float] = None
    ell: Union[float, str, None] = "inf"
    shape: Optional[str] = None
    evaluator: str = "boundary"
    h: Optional[float] = Field(None, gt=0.0)
    nodes: Optional[int] = Field(None, ge=16)
    gamma_nodes: Optional[int] = Field(None, ge=16)
    tol: float = Field(1e-3, gt=0.0)
    max_steps: int = Field(2000, ge=0)
    dt0: Optional[float] = Field(None, gt=0.0)
    workers: int = Field(default_factory=lambda: get_config().WORKERS, ge=1)
    seed: int = Field(default_factory=lambda: get_config().SEED)
    output_dir: str = Field(default_factory=lambda: str(get_config().OUTPUT_DIR))

    # Command specific
    compare_all: bool = False
    ansatz: Optional[str] = None
    r: Optional[float] = Field(None, gt=0.0)
    a: Optional[float] = Field(None, gt=0.0)
    m: Optional[float] = Field(None, gt=0.0)
    l_range: Optional[str] = None
    with_mass: bool = False
    quick: bool = False
    frames: Optional[int] = Field(None, ge=1)

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    @field_validator("delta")
    @classmethod
    def _check_delta(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and not 0.0 < value < 0.5:
            raise ValueError("delta must lie in (0, 1/2)")
        return value

    @field_validator("ell")
    @classmethod
    def _check_ell(cls, value):
        try:
            parsed = parse_ell(value)
        except ValidationError as e:
            raise ValueError(str(e))
        return "inf" if parsed is LayerSeparation.INFINITE else parsed

    def kernel_params(self) -> Optional[KernelParams]:
        """Kernel parameters, or None when no cutoff was given."""
        if self.delta is None:
            return None
        return KernelParams(self.lam, self.delta, self.ell)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)


def load_run_config(cli_values: Dict[str, Any], config_file: Optional[Union[str, Path]] = None) -> RunConfig:
    """
    Merge settings with precedence CLI > JSON file > defaults.

    Args:
        cli_values: Values given on the command line (None entries are ignored)
        config_file: Optional JSON file with RunConfig fields

    Raises:
        ConfigurationError: If the file is unreadable or a value is invalid
    """
    merged: Dict[str, Any] = {}
    if config_file is not None:
        path = Path(config_file)
        if not path.exists():
            raise ConfigurationError(f"config file not found: {path}")
        try:
            with open(path, "r", encoding="utf-8") as f:
                merged.update(json.load(f))
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"config file {path} is not valid JSON: {e}")
    merged.update({key: value for key, value in cli_values.items() if value is not None})
    try:
        return RunConfig(**merged)
    except PydanticValidationError as e:
        raise ConfigurationError(f"invalid run configuration: {e}")


def dump_effective_config(run_config: RunConfig, directory: Union[str, Path]) -> Path:
    """Write ``effective_config.json`` into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "effective_config.json"
    with open(path, "w", encoding="utf-8") as f:
        json.dump(run_config.to_dict(), f, indent=2)
    return path
