"""Square-plate experiments: slanted pairs, coplanar squares and the quasi-planar slab."""

import logging
import math
from typing import Any, Dict, List

from ..pipeline import CaseResult
from .base_experiment import BaseExperiment, CaseParams
from .discs import knee_error

logger = logging.getLogger(__name__)


def _families(cases: List[CaseParams], results: List[CaseResult]) -> Dict[str, List[CaseResult]]:
    grouped: Dict[str, List[CaseResult]] = {}
    for case, result in zip(cases, results):
        grouped.setdefault(case.family, []).append(result)
    return grouped


class SlantedSquaresExperiment(BaseExperiment):
    """Squares whose closest edges are a apart along a direction slanted by phi."""

    name = "slanted-squares"
    description = "Slanted square plates (d = a) from broadside to near endfire"

    angles = (math.pi / 2, 3 * math.pi / 8, math.pi / 4, math.pi / 8, 0.1)

    def default_cases(self) -> List[CaseParams]:
        sizes = [8.0, 16.0, 32.0] if self.config.full else [8.0, 16.0]
        return [
            CaseParams("slanted-plates", a, d=a, phi=phi, family=f"phi{phi:.4f}")
            for phi in self.angles
            for a in sizes
        ]

    def analyze(self, results: List[CaseResult]) -> Dict[str, Any]:
        tau = min(self.config.taus)
        scaling = []
        predictors = {}
        for family, members in _families(self.cases(), results).items():
            study = self.study(family, [r.spec for r in members], tau)
            if study is not None:
                scaling.append(study)
            predictors[family] = {
                "kind": [r.estimate.kind.value for r in members],
                "knee_pred": [r.knee_pred for r in members],
                "knee_detected": [r.knee_detected for r in members],
            }

        diagonal = f"phi{math.pi / 4:.4f}"
        slope = next((s["slope"] for s in scaling if s["family"] == diagonal), None)
        checks = {
            "predictors": predictors,
            "slopes": {s["family"]: s["slope"] for s in scaling},
            "diagonal_slope_below_2": slope is not None and slope < 2,
        }
        return {"checks": checks, "scaling": scaling}


class PlanarExperiment(BaseExperiment):
    """Coplanar squares and their front-corner segments under both kernels."""

    name = "planar-2d3d"
    description = "Coplanar squares against their 2-D cross-section, 2-D and 3-D kernels"

    def default_cases(self) -> List[CaseParams]:
        a = 30.0 if self.config.full else 10.0
        diagonal = math.sqrt(2) * a
        return [
            CaseParams("coplanar-squares", a, family="squares-3d", extra={"dim": 3}),
            CaseParams("coplanar-squares", a, family="squares-2d", extra={"dim": 2}),
            CaseParams("parallel-lines", diagonal, d=2 * diagonal, family="corners-2d", extra={"dim": 2}),
            CaseParams("parallel-lines", diagonal, d=2 * diagonal, family="corners-3d", extra={"dim": 3}),
        ]

    def analyze(self, results: List[CaseResult]) -> Dict[str, Any]:
        checks: Dict[str, Any] = {}
        for case, result in zip(self.cases(), results):
            checks[case.family] = {
                "shadow_kind": result.estimate.kind.value,
                "shadow_value": result.estimate.value,
                "knee_pred": result.knee_pred,
                "knee_detected": result.knee_detected,
                "knee_error": knee_error(result),
            }
        squares = [r for r in results if r.spec.shape.value == "coplanar-squares"]
        if len(squares) == 2 and all(r.knee_detected for r in squares):
            three, two = squares
            checks["knee_ratio_3d_to_2d"] = three.knee_detected / two.knee_detected
        return {"checks": checks, "scaling": []}


class QuasiPlanarSlabExperiment(BaseExperiment):
    """Plate at small height h above a coplanar frame."""

    name = "quasi-planar-slab"
    description = "Plate-and-frame slab where the area predictor vanishes"

    heights = (1.0, 0.5, 0.25)

    def default_cases(self) -> List[CaseParams]:
        sizes = [4.0, 8.0, 16.0] if self.config.full else [4.0, 8.0]
        return [
            CaseParams("plate-and-frame", a, h=h, family=f"h{h:g}".replace(".", "p"))
            for h in self.heights
            for a in sizes
        ]

    def analyze(self, results: List[CaseResult]) -> Dict[str, Any]:
        tau = min(self.config.taus)
        scaling = []
        checks: Dict[str, Any] = {}
        for family, members in _families(self.cases(), results).items():
            study = self.study(family, [r.spec for r in members], tau)
            if study is not None:
                scaling.append(study)
            checks[family] = {
                "shadow_kind": [r.estimate.kind.value for r in members],
                "knee_pred": [r.knee_pred for r in members],
                "knee_detected": [r.knee_detected for r in members],
                "knee_error": [knee_error(r) for r in members],
            }
        checks["length_predictor_used"] = all(r.estimate.kind.value == "length" for r in results)
        return {"checks": checks, "scaling": scaling}
