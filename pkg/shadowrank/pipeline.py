"""Per-case glue: scene, shadow predictor, interaction block and spectrum."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from .config import Config
from .errors import DegenerateKneeError, FloorError
from .geometry import GeometrySpec, ScenePair, Shape, build_scene
from .kernel import InteractionBlock, assemble_block
from .shadow import ShadowEstimate, closed_form_for, governing_estimate
from .spectrum import (
    REPORT_TAUS,
    RankReport,
    SpectrumResult,
    certified_ranks,
    compute_spectrum,
    detect_knee,
    rank_at,
    remainder_width,
)

logger = logging.getLogger(__name__)


@dataclass
class PipelineSettings:
    """Numeric knobs shared by every stage of a case."""
    delta: Optional[float] = None
    disc_method: str = "rings"
    polygon_sides: int = 64
    quadrature_points: int = 16
    divergence_tol: float = 0.05
    fallback_threshold: float = 1.0
    dense_cap: int = 4000 * 4000
    chunk_rows: int = 256
    randomized: Dict[str, int] = field(default_factory=lambda: {"block_size": 64, "power_iters": 2, "oversampling": 10})
    knee_end_tau: float = 0.1
    knee_min_distance: float = 1e-3
    vector_doubling: bool = False
    workers: Optional[int] = None

    @classmethod
    def from_config(cls, config: Config) -> "PipelineSettings":
        """Settings from the configuration sections."""
        return cls(
            delta=config.delta,
            disc_method=config.disc_method,
            polygon_sides=int(config.sweep_settings.get("polygon_sides", 64)),
            quadrature_points=config.quadrature_points,
            divergence_tol=config.divergence_tol,
            fallback_threshold=config.fallback_threshold,
            dense_cap=config.dense_cap,
            chunk_rows=config.chunk_rows,
            randomized=config.randomized_settings,
            knee_end_tau=config.knee_end_tau,
            knee_min_distance=config.knee_min_distance,
            workers=config.threads,
        )


@dataclass
class CaseResult:
    """Everything computed for one geometry."""
    spec: GeometrySpec
    scene: ScenePair
    estimate: ShadowEstimate
    closed_form: Optional[ShadowEstimate]
    knee_pred: float
    spectrum: SpectrumResult
    knee_detected: Optional[int]
    reports: List[RankReport]

    @property
    def case_id(self) -> str:
        return self.spec.case_id()

    @property
    def ka(self) -> float:
        return self.scene.wavenumber * self.spec.a

    def report_at(self, tau: float) -> Optional[RankReport]:
        for report in self.reports:
            if report.tau == tau:
                return report
        return None

    def summary(self) -> Dict[str, Any]:
        """Scalar results for the run summary."""
        return {
            "case_id": self.case_id,
            "geometry": self.spec.to_dict(),
            "ka": self.ka,
            "shadow": self.estimate.to_dict(),
            "closed_form": None if self.closed_form is None else self.closed_form.to_dict(),
            "knee_pred": self.knee_pred,
            "knee_detected": self.knee_detected,
            "ranks": certified_ranks(self.spectrum),
            "remainder_width": {f"{r.tau:g}": r.remainder_width for r in self.reports},
            "spectrum_method": self.spectrum.method.value,
            "n_sigmas": self.spectrum.size,
        }


def resolve_spec(spec: GeometrySpec, settings: PipelineSettings) -> GeometrySpec:
    """Fill the sampling density and disc method from the settings.

    Values given explicitly in the spec win over the settings.
    """
    changes: Dict[str, Any] = {}
    if settings.delta not in (None, spec.delta) and "delta" not in spec.model_fields_set:
        changes["delta"] = settings.delta
    unset_sampling = "sampling" not in spec.model_fields_set
    if spec.shape == Shape.PARALLEL_DISCS and unset_sampling and settings.disc_method != spec.sampling:
        changes["sampling"] = settings.disc_method
    return spec.with_updates(**changes) if changes else spec


def scene_for(spec: GeometrySpec, wavelength: Optional[float], settings: PipelineSettings) -> ScenePair:
    """Build the scene for ``spec`` with the settings applied."""
    return build_scene(resolve_spec(spec, settings), wavelength, polygon_sides=settings.polygon_sides)


def block_for(scene: ScenePair, settings: PipelineSettings) -> InteractionBlock:
    return assemble_block(scene, settings.dense_cap, settings.chunk_rows, settings.workers)


def analyze_case(
    spec: GeometrySpec,
    wavelength: Optional[float] = None,
    settings: Optional[PipelineSettings] = None,
    seed: int = 42,
    method: str = "auto",
    taus: Sequence[float] = REPORT_TAUS,
) -> CaseResult:
    """Run one geometry through shadow prediction and spectrum extraction.

    Args:
        spec: Catalog geometry.
        wavelength: Wavelength, falling back to the spec's own.
        settings: Numeric settings, defaults when None.
        seed: Seed of the randomized SVD.
        method: Spectrum method: auto, dense or randomized.
        taus: Thresholds for the rank reports; those below the spectrum's
            floor are skipped.

    Returns:
        CaseResult with the governing predictor, spectrum and reports.
    """
    settings = settings or PipelineSettings()
    spec = resolve_spec(spec, settings)
    scene = scene_for(spec, wavelength, settings)
    logger.info(f"Case {spec.case_id()}: {scene.observer.size}x{scene.source.size} points")

    estimate = governing_estimate(
        scene,
        fallback_threshold=settings.fallback_threshold,
        quadrature_points=settings.quadrature_points,
        divergence_tol=settings.divergence_tol,
        workers=settings.workers,
    )
    knee_pred = estimate.doubled() if settings.vector_doubling else estimate.dof

    block = block_for(scene, settings)
    spectrum = compute_spectrum(
        block,
        target_tau=min(taus),
        seed=seed,
        method=method,
        dense_cap=settings.dense_cap,
        **settings.randomized,
    )

    try:
        knee = detect_knee(spectrum, settings.knee_end_tau, settings.knee_min_distance)
    except DegenerateKneeError as e:
        logger.warning(f"Case {spec.case_id()}: {e}")
        knee = None

    reports = []
    for tau in taus:
        try:
            reports.append(
                RankReport(
                    tau=tau,
                    rank=rank_at(spectrum, tau),
                    knee_pred=knee_pred,
                    knee_detected=knee,
                    remainder_width=remainder_width(spectrum, knee_pred, tau),
                )
            )
        except FloorError as e:
            logger.warning(f"Case {spec.case_id()}: skipping tau={tau:g}: {e}")

    logger.info(
        f"Case {spec.case_id()}: predicted knee {knee_pred:.4g} ({estimate.kind.value}), detected {knee}"
    )
    return CaseResult(
        spec=spec,
        scene=scene,
        estimate=estimate,
        closed_form=closed_form_for(scene),
        knee_pred=knee_pred,
        spectrum=spectrum,
        knee_detected=knee,
        reports=reports,
    )
