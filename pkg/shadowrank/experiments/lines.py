"""Parallel-line experiments in the 2-D kernel."""

import logging
from typing import Any, Dict, List, Optional

from ..pipeline import CaseResult
from .base_experiment import BaseExperiment, CaseParams

logger = logging.getLogger(__name__)

# (h/a, d/a)
LINE_CONFIGS = ((0.0, 1.0), (0.0, 2.0), (2.0, 1.0), (2.0, 2.0))


def _family(h_ratio: float, d_ratio: float) -> str:
    return f"h{h_ratio:g}a_d{d_ratio:g}a"


def _line_cases(sizes: List[float]) -> List[CaseParams]:
    return [
        CaseParams("parallel-lines", a, d=d_ratio * a, h=h_ratio * a, family=_family(h_ratio, d_ratio))
        for h_ratio, d_ratio in LINE_CONFIGS
        for a in sizes
    ]


class ParallelLinesExperiment(BaseExperiment):
    """Knee and remainder width of two parallel segments."""

    name = "parallel-lines"
    description = "Parallel segments: length predictor and remainder width against size"

    tau = 1e-12

    def default_cases(self) -> List[CaseParams]:
        sizes = [16.0, 32.0, 400.0] if self.config.full else [16.0, 32.0]
        return _line_cases(sizes)

    def _width(self, result: CaseResult) -> Optional[int]:
        report = result.report_at(self.tau)
        return None if report is None else report.remainder_width

    def analyze(self, results: List[CaseResult]) -> Dict[str, Any]:
        checks: Dict[str, Any] = {}
        grouped: Dict[str, List[CaseResult]] = {}
        for case, result in zip(self.cases(), results):
            grouped.setdefault(case.family, []).append(result)

        for family, members in grouped.items():
            members = sorted(members, key=lambda r: r.spec.a)
            widths = [self._width(r) for r in members]
            entry: Dict[str, Any] = {
                "a_over_lambda": [r.spec.a / r.scene.wavelength for r in members],
                "knee_pred": [r.knee_pred for r in members],
                "closed_form": [None if r.closed_form is None else r.closed_form.dof for r in members],
                "knee_detected": [r.knee_detected for r in members],
                "knee_within_2": [
                    r.knee_detected is not None and abs(r.knee_detected - r.knee_pred) <= 2 for r in members
                ],
                "remainder_width": widths,
            }
            if len(widths) >= 2 and widths[0] and widths[1] is not None:
                entry["width_change"] = abs(widths[1] - widths[0]) / widths[0]
                entry["width_nearly_constant"] = entry["width_change"] < 0.3
            checks[family] = entry
        return {"checks": checks, "scaling": []}


class LineModesExperiment(BaseExperiment):
    """Localization and DFT content of aperture and remainder singular vectors."""

    name = "line-modes"
    description = "Aperture/diffraction split of singular vectors for four line configurations"

    def default_cases(self) -> List[CaseParams]:
        return _line_cases([16.0])

    def analyze(self, results: List[CaseResult]) -> Dict[str, Any]:
        tau = min(self.config.taus)
        case_analysis = {}
        checks: Dict[str, Any] = {}
        for case, result in zip(self.cases(), results):
            metrics = self.mode_analysis(result, tau)
            case_analysis[result.case_id] = metrics
            aperture = metrics.get("edge_concentration_aperture")
            remainder = metrics.get("edge_concentration_remainder")
            entry: Dict[str, Any] = {}
            if aperture and remainder is not None:
                entry["edge_ratio"] = remainder / aperture
                entry["remainder_at_edges"] = entry["edge_ratio"] > 2
            inside = metrics.get("band_fraction_aperture")
            outside = metrics.get("band_fraction_remainder")
            if inside is not None and outside is not None:
                entry["aperture_in_band"] = inside >= 0.9
                entry["remainder_broader"] = outside < inside
            checks[case.family] = entry
        return {"checks": checks, "scaling": [], "case_analysis": case_analysis}
