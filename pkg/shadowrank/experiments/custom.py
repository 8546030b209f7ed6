"""Experiment over geometries listed in the configuration file."""

import logging
from typing import Any, Dict, List

from ..errors import ConfigError
from ..geometry import GeometrySpec
from ..pipeline import CaseResult
from .base_experiment import BaseExperiment, CaseParams

logger = logging.getLogger(__name__)


class CustomExperiment(BaseExperiment):
    """Runs each GeometrySpec mapping from ``geometries``; lengths in meters."""

    name = "custom"
    description = "User-supplied geometry list"

    def default_cases(self) -> List[CaseParams]:
        return []

    def specs(self) -> List[GeometrySpec]:
        if not self.config.geometries:
            raise ConfigError("The custom experiment needs a non-empty 'geometries' list")
        specs = []
        for entry in self.config.geometries:
            data = dict(entry)
            if "lambda" not in data and "wavelength" not in data:
                data["lambda"] = self.config.wavelength
            specs.append(GeometrySpec.from_dict(data))
        unique = {spec.case_id(): spec for spec in reversed(specs)}
        return [spec for spec in specs if unique.get(spec.case_id()) is spec]

    def analyze(self, results: List[CaseResult]) -> Dict[str, Any]:
        tau = min(self.config.taus)
        case_analysis = {result.case_id: self.mode_analysis(result, tau) for result in results}
        return {"checks": {}, "scaling": [], "case_analysis": case_analysis}
