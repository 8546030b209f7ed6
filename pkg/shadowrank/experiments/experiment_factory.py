"""Registry of named experiment pipelines."""

from typing import Any, Dict, List, Type
import logging

from ..errors import ConfigError
from .base_experiment import BaseExperiment, ExperimentConfig
from .custom import CustomExperiment
from .discs import DiscsMethodsExperiment, DiscsScalingExperiment
from .lines import LineModesExperiment, ParallelLinesExperiment
from .plates import PlanarExperiment, QuasiPlanarSlabExperiment, SlantedSquaresExperiment

logger = logging.getLogger(__name__)


class ExperimentFactory:
    """Factory class for creating experiment instances."""

    _experiments: Dict[str, Type[BaseExperiment]] = {
        cls.name: cls
        for cls in (
            DiscsMethodsExperiment,
            DiscsScalingExperiment,
            SlantedSquaresExperiment,
            PlanarExperiment,
            QuasiPlanarSlabExperiment,
            ParallelLinesExperiment,
            LineModesExperiment,
            CustomExperiment,
        )
    }

    @classmethod
    def create_experiment(cls, config: ExperimentConfig, **kwargs: Any) -> BaseExperiment:
        """Create the experiment named in ``config``.

        Args:
            config: Run parameters; ``config.name`` selects the pipeline.
            **kwargs: Passed to the experiment constructor.

        Returns:
            Configured experiment instance

        Raises:
            ConfigError: If the name is not registered
        """
        name = config.name.lower()
        if name not in cls._experiments:
            available = ", ".join(cls._experiments)
            raise ConfigError(f"Unknown experiment: {config.name}. Available experiments: {available}")

        experiment = cls._experiments[name](config, **kwargs)
        logger.info(f"Created {name} experiment")
        return experiment

    @classmethod
    def register_experiment(cls, name: str, experiment_class: Type[BaseExperiment]) -> None:
        """Register a new experiment pipeline.

        Args:
            name: Experiment name
            experiment_class: Class that implements BaseExperiment
        """
        if not issubclass(experiment_class, BaseExperiment):
            raise ValueError(
                f"Experiment class must inherit from BaseExperiment, got: {experiment_class.__name__}"
            )
        cls._experiments[name.lower()] = experiment_class
        logger.info(f"Registered experiment: {name}")

    @classmethod
    def get_available_experiments(cls) -> List[str]:
        return list(cls._experiments)

    @classmethod
    def get_experiment_info(cls, name: str) -> Dict[str, Any]:
        """Name, class and description of a registered experiment.

        Raises:
            ConfigError: If the name is not registered
        """
        name = name.lower()
        if name not in cls._experiments:
            raise ConfigError(f"Unknown experiment: {name}")
        experiment_class = cls._experiments[name]
        return {
            "name": name,
            "class_name": experiment_class.__name__,
            "module": experiment_class.__module__,
            "description": experiment_class.description or "No description available",
        }


def create_experiment(config: ExperimentConfig, **kwargs: Any) -> BaseExperiment:
    """Convenience function to create an experiment."""
    return ExperimentFactory.create_experiment(config, **kwargs)
