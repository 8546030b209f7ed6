"""Configuration management for shadowrank."""

import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional, Union
from dotenv import load_dotenv

from .errors import ConfigError

DEFAULT_LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _default_threads() -> int:
    """Worker cap from SHADOWRANK_THREADS, else the CPU count."""
    value = os.getenv("SHADOWRANK_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise ConfigError(f"SHADOWRANK_THREADS must be an integer, got: {value!r}")
    return os.cpu_count() or 1


def default_workers() -> int:
    """Number of worker threads library functions use when none is given."""
    return _default_threads()


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively overlay ``override`` on ``base``."""
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """Configuration manager for shadowrank runs."""

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        """Initialize configuration.

        Args:
            config_file: Path to a YAML settings file. Defaults to shadowrank.yaml
                in the current working directory.
        """
        load_dotenv()

        self.config_file = Path(config_file) if config_file else Path.cwd() / "shadowrank.yaml"
        if config_file and not self.config_file.exists():
            raise ConfigError(f"Settings file not found: {self.config_file}")

        self._config = self._load_config()

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from file and environment variables."""
        config = {
            "sampling": {
                "delta": 4.0,
                "disc_method": "rings",
            },
            "shadow": {
                "quadrature_points": 16,
                "divergence_tol": 0.05,
                "fallback_threshold": 1.0,
                "sweep": {
                    "n_mu": 100,
                    "n_phi": 100,
                    "polygon_sides": 64,
                },
            },
            "kernel": {
                "dense_cap": 4000 * 4000,
                "chunk_rows": 256,
            },
            "spectrum": {
                "block_size": 64,
                "power_iters": 2,
                "oversampling": 10,
                "knee_end_tau": 0.1,
                "knee_min_distance": 1e-3,
            },
            "analysis": {
                "remainder_columns": 25,
                "edge_band": None,
                "smoothing": False,
            },
            "parallel": {
                "threads": _default_threads(),
            },
            "output": {
                "directory": "results",
            },
            "logging": {
                "level": os.getenv("LOG_LEVEL", "INFO"),
                "format": DEFAULT_LOG_FORMAT,
            },
        }

        if self.config_file.exists():
            try:
                with open(self.config_file, "r", encoding="utf-8") as f:
                    file_config = yaml.safe_load(f) or {}
            except yaml.YAMLError as e:
                raise ConfigError(f"Invalid YAML in {self.config_file}: {e}")
            if not isinstance(file_config, dict):
                raise ConfigError(f"Settings file must contain a mapping: {self.config_file}")
            config = _merge(config, file_config)

        return config

    def get(self, key: str, default: Any = None) -> Any:
        """Get configuration value by dot notation key."""
        keys = key.split(".")
        value = self._config

        for k in keys:
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default

        return value

    def save(self) -> None:
        """Save current configuration to file."""
        with open(self.config_file, "w", encoding="utf-8") as f:
            yaml.safe_dump(self._config, f, default_flow_style=False)

    @property
    def delta(self) -> float:
        """Sampling density in points per wavelength per dimension."""
        return float(self.get("sampling.delta", 4.0))

    @property
    def disc_method(self) -> str:
        """Default disc sampling method."""
        return self.get("sampling.disc_method", "rings")

    @property
    def quadrature_points(self) -> int:
        """Coarse LoS quadrature points per characteristic size."""
        return int(self.get("shadow.quadrature_points", 16))

    @property
    def divergence_tol(self) -> float:
        """Largest accepted relative change under quadrature refinement."""
        return float(self.get("shadow.divergence_tol", 0.05))

    @property
    def fallback_threshold(self) -> float:
        """Area predictor value below which the length predictor is used."""
        return float(self.get("shadow.fallback_threshold", 1.0))

    @property
    def sweep_settings(self) -> Dict[str, int]:
        """Direction grid and polygon resolution of the plane-wave sweep."""
        return dict(self.get("shadow.sweep", {}))

    @property
    def dense_cap(self) -> int:
        """Largest number of entries assembled as a dense block."""
        return int(self.get("kernel.dense_cap", 4000 * 4000))

    @property
    def chunk_rows(self) -> int:
        """Rows evaluated per chunk in matrix-free products."""
        return int(self.get("kernel.chunk_rows", 256))

    @property
    def randomized_settings(self) -> Dict[str, int]:
        """Block size, power iterations and oversampling of the randomized SVD."""
        return {
            "block_size": int(self.get("spectrum.block_size", 64)),
            "power_iters": int(self.get("spectrum.power_iters", 2)),
            "oversampling": int(self.get("spectrum.oversampling", 10)),
        }

    @property
    def knee_end_tau(self) -> float:
        """Threshold that ends the chord used for knee detection."""
        return float(self.get("spectrum.knee_end_tau", 0.1))

    @property
    def knee_min_distance(self) -> float:
        """Chord distance below which a curve is reported as knee-less."""
        return float(self.get("spectrum.knee_min_distance", 1e-3))

    @property
    def remainder_columns(self) -> int:
        """Remainder group size for line geometries."""
        return int(self.get("analysis.remainder_columns", 25))

    @property
    def edge_band(self) -> Optional[float]:
        """Edge band width in wavelengths, None for the geometry default."""
        value = self.get("analysis.edge_band")
        return None if value is None else float(value)

    @property
    def smoothing(self) -> bool:
        """Whether localization maps are smoothed over a 3x3 neighbourhood."""
        return bool(self.get("analysis.smoothing", False))

    @property
    def threads(self) -> int:
        """Worker thread cap."""
        return max(1, int(self.get("parallel.threads", 1)))

    @property
    def output_directory(self) -> Path:
        """Base directory for run artifacts."""
        return Path(self.get("output.directory", "results"))

    @property
    def log_level(self) -> str:
        """Logging level name."""
        return self.get("logging.level", "INFO")

    @property
    def log_format(self) -> str:
        """Format string for log records."""
        return self.get("logging.format", DEFAULT_LOG_FORMAT)
