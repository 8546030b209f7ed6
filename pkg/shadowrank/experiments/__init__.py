"""
Named experiment pipelines.

Each experiment runs a family of catalog geometries through the shadow,
kernel and spectrum stages and writes CSV/JSON/SVG artifacts:
- discs-methods, discs-scaling
- slanted-squares, planar-2d3d, quasi-planar-slab
- parallel-lines, line-modes
- custom (geometry list from the config file)
"""

from .base_experiment import BaseExperiment, CaseParams, ExperimentConfig, ExperimentOutcome
from .experiment_factory import ExperimentFactory, create_experiment

__all__ = [
    "BaseExperiment",
    "CaseParams",
    "ExperimentConfig",
    "ExperimentOutcome",
    "ExperimentFactory",
    "create_experiment",
]
