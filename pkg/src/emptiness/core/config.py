"""
Emptiness Configuration Management

This module handles configuration loading, validation, and management
for the emptiness toolkit. Settings live in a YAML file with one section
per dataclass below; command-line flags override file values.
"""

import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional, List
from dataclasses import dataclass, field, fields
from loguru import logger

from .errors import ValidationError


ROUTES = ("exact", "mc", "potential", "sixvertex")
FORMATS = ("csv", "json")


@dataclass
class GeneralConfig:
    """General application configuration settings."""
    log_level: str = "INFO"
    threads: int = 1
    memory_budget_mb: int = 2048
    output_format: str = "csv"
    file_logging: bool = False


@dataclass
class ExactConfig:
    """Exact diagonalization settings."""
    dense_max_sites: int = 12
    sector_max_sites: int = 20
    degeneracy_tol: float = 1e-10
    lanczos_tol: float = 1e-12


@dataclass
class LoopsConfig:
    """Loop Monte Carlo settings."""
    n_samples: int = 20000
    n_batches: int = 32
    chains: int = 1
    progress: bool = True


@dataclass
class TransferConfig:
    """Six-vertex transfer matrix settings."""
    max_sites: int = 20
    power_tol: float = 1e-12
    power_max_iter: int = 200000


@dataclass
class OpcConfig:
    """Osculating path demo and property-suite settings."""
    fixtures: int = 1000
    width: int = 6
    height: int = 6
    sample_rows: int = 4


@dataclass
class BoundsConfig:
    """Bound verifier settings."""
    bootstrap_resamples: int = 200
    rp_trials: int = 100
    holder_trials: int = 20
    slack: float = 1e-10


@dataclass
class RunConfig:
    """A single EFP run or scan request."""
    route: str = "exact"
    d: int = 1
    n: int = 4
    delta: Optional[float] = 0.0
    kappa: Optional[float] = None
    beta: Optional[float] = 1.0
    m2: Optional[int] = None
    l_min: int = 0
    l_max: int = 2
    samples: Optional[int] = None
    seed: int = 0
    output: Optional[str] = None
    format: Optional[str] = None
    fit: bool = False
    beta_values: List[float] = field(default_factory=list)

    @property
    def l_values(self) -> List[int]:
        return list(range(self.l_min, self.l_max + 1))

    def validate(self) -> None:
        """
        Check the run record for internal consistency.

        Raises:
            ValidationError: If the record cannot describe a run
        """
        if self.route not in ROUTES:
            raise ValidationError(f"route must be one of {', '.join(ROUTES)}, got {self.route!r}")
        if self.format is not None and self.format not in FORMATS:
            raise ValidationError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        if (self.delta is None) == (self.kappa is None):
            raise ValidationError("exactly one of delta and kappa must be given")
        if self.kappa is not None and self.route != "sixvertex":
            raise ValidationError("kappa is only meaningful for route=sixvertex")
        if self.route == "sixvertex" and self.kappa is None:
            raise ValidationError("route=sixvertex needs kappa")
        if self.l_max < self.l_min or self.l_min < 0:
            raise ValidationError(f"empty L-range {self.l_min}..{self.l_max}")
        if self.route == "sixvertex" and self.d != 1:
            raise ValidationError("route=sixvertex is one-dimensional (d=1)")
        if self.route in ("mc", "potential") and self.samples is not None and self.samples < 1:
            raise ValidationError("samples must be positive for stochastic routes")
        if self.route in ("mc", "potential") and (self.beta is None or self.beta <= 0):
            raise ValidationError("stochastic routes need beta > 0")


SECTIONS = {
    "general": GeneralConfig,
    "exact": ExactConfig,
    "loops": LoopsConfig,
    "transfer": TransferConfig,
    "opc": OpcConfig,
    "bounds": BoundsConfig,
    "run": RunConfig,
}


class Config:
    """
    Main configuration class for emptiness.

    Handles loading, validation, and access to all configuration settings.
    """

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration with optional custom config file path.

        Args:
            config_path: Path to custom configuration file
        """
        self.config_path = config_path or self._get_default_config_path()

        self.general = GeneralConfig()
        self.exact = ExactConfig()
        self.loops = LoopsConfig()
        self.transfer = TransferConfig()
        self.opc = OpcConfig()
        self.bounds = BoundsConfig()
        self.run = RunConfig()

        self._load_config()
        self._apply_environment()

    def _get_default_config_path(self) -> str:
        """Get the default configuration file path."""
        current_dir = Path.cwd()
        config_files = [
            current_dir / "config" / "emptiness.yaml",
            current_dir / "emptiness.yaml",
            current_dir / "config.yaml",
        ]

        for config_file in config_files:
            if config_file.exists():
                return str(config_file)

        return str(current_dir / "config" / "emptiness.yaml")

    def _load_config(self):
        """Load configuration from YAML file, keeping defaults when absent."""
        config_file = Path(self.config_path)

        if not config_file.exists():
            logger.debug(f"No configuration file at {self.config_path}, using defaults")
            return

        try:
            with open(config_file, "r", encoding="utf-8") as f:
                config_data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ValidationError(f"cannot parse configuration {self.config_path}: {e}") from e

        for name in SECTIONS:
            self._update_section(getattr(self, name), config_data.get(name) or {})

        logger.info(f"Configuration loaded from: {self.config_path}")

    def _apply_environment(self):
        """Apply environment overrides (thread count)."""
        threads = os.environ.get("EMPTINESS_THREADS")
        if threads:
            try:
                self.general.threads = int(threads)
            except ValueError:
                logger.warning(f"Ignoring non-integer EMPTINESS_THREADS={threads!r}")

    def _update_section(self, section: Any, data: Dict[str, Any]):
        """Update a configuration section with new data."""
        for key, value in data.items():
            if hasattr(section, key):
                setattr(section, key, value)
            else:
                logger.warning(f"Unknown configuration key '{key}' ignored")

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value by key.

        Args:
            key: Configuration key (e.g., 'loops.n_batches')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        try:
            value = self
            for k in key.split("."):
                value = getattr(value, k)
            return value
        except AttributeError:
            return default

    def set(self, key: str, value: Any):
        """
        Set a configuration value by key.

        Args:
            key: Configuration key (e.g., 'run.seed')
            value: Value to set
        """
        keys = key.split(".")
        obj = self
        for k in keys[:-1]:
            obj = getattr(obj, k)
        if not hasattr(obj, keys[-1]):
            raise ValidationError(f"unknown configuration key '{key}'")
        setattr(obj, keys[-1], value)

    def override(self, section: str, **values: Any):
        """Apply flag overrides; ``None`` means the flag was not given."""
        for key, value in values.items():
            if value is not None:
                self.set(f"{section}.{key}", value)

    def to_dict(self) -> Dict[str, Dict[str, Any]]:
        return {name: self._section_to_dict(getattr(self, name)) for name in SECTIONS}

    def save(self, path: Optional[str] = None):
        """
        Save current configuration to file.

        Args:
            path: Optional custom path to save configuration
        """
        save_path = Path(path or self.config_path)
        save_path.parent.mkdir(parents=True, exist_ok=True)
        with open(save_path, "w", encoding="utf-8") as f:
            yaml.dump(self.to_dict(), f, default_flow_style=False, indent=2)
        logger.info(f"Configuration saved to: {save_path}")

    def _section_to_dict(self, section: Any) -> Dict[str, Any]:
        """Convert a configuration section to dictionary."""
        return {f.name: getattr(section, f.name) for f in fields(section)}

    @property
    def memory_budget_bytes(self) -> int:
        return int(self.general.memory_budget_mb) * 1024 * 1024

    def validate(self) -> bool:
        """
        Validate current configuration.

        Returns:
            True if configuration is valid, False otherwise
        """
        problems = []
        if self.general.threads < 1:
            problems.append("general.threads must be at least 1")
        if self.general.memory_budget_mb < 1:
            problems.append("general.memory_budget_mb must be positive")
        if self.general.output_format not in FORMATS:
            problems.append(f"general.output_format must be one of {', '.join(FORMATS)}")
        if self.loops.n_samples < 1:
            problems.append("loops.n_samples must be positive")
        if self.loops.n_batches < 2:
            problems.append("loops.n_batches must be at least 2 for the jackknife")
        if not 0 < self.exact.degeneracy_tol < 1:
            problems.append("exact.degeneracy_tol must be in (0, 1)")
        if self.bounds.bootstrap_resamples < 10:
            problems.append("bounds.bootstrap_resamples must be at least 10")
        try:
            self.run.validate()
        except ValidationError as e:
            problems.append(f"run: {e}")

        for problem in problems:
            logger.error(problem)
        if not problems:
            logger.debug("Configuration validation passed")
        return not problems
