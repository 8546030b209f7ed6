"""Base class and configuration model for named experiment pipelines."""

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, ClassVar, Dict, List, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .. import __version__
from ..analysis import (
    Group,
    band_energy_fraction,
    default_edge_band,
    edge_concentration,
    localization_map,
    mode_dft,
    predict_band,
    scaling_study,
)
from ..artifact_writer import ArtifactWriter
from ..errors import (
    EmptyBandError,
    FloorError,
    GeometryError,
    MissingVectorsError,
    NonUniformSamplingError,
    ParameterError,
)
from ..geometry import GeometrySpec
from ..pipeline import CaseResult, PipelineSettings, analyze_case, resolve_spec
from ..plots import SvgPlotter
from ..spectrum import REPORT_TAUS
from ..summary import CaseSummary, RunSummary, ScalingSummary

logger = logging.getLogger(__name__)


class ExperimentConfig(BaseModel):
    """Parameters of one experiment run.

    Geometry overrides ``a``, ``d``, ``h`` are in wavelengths; ``phi`` is in
    radians. Custom geometries are GeometrySpec mappings in meters.
    """
    model_config = ConfigDict(extra="forbid")

    name: str
    wavelength: float = Field(default=1.0, gt=0)
    seed: int = 42
    output_directory: Optional[str] = None
    full: bool = False
    plot: bool = True
    taus: List[float] = Field(default_factory=lambda: list(REPORT_TAUS))
    method: str = "auto"
    a: Optional[float] = Field(default=None, gt=0)
    d: Optional[float] = Field(default=None, ge=0)
    h: Optional[float] = None
    phi: Optional[float] = None
    geometries: List[Dict[str, Any]] = Field(default_factory=list)

    @field_validator("taus")
    @classmethod
    def _check_taus(cls, taus: List[float]) -> List[float]:
        if not taus or any(not 0 < t < 1 for t in taus):
            raise ValueError("taus must be a non-empty list of values in (0, 1)")
        return sorted(set(taus), reverse=True)

    @field_validator("method")
    @classmethod
    def _check_method(cls, method: str) -> str:
        if method not in ("auto", "dense", "randomized"):
            raise ValueError(f"method must be auto, dense or randomized, got {method!r}")
        return method

    @property
    def overrides(self) -> Dict[str, float]:
        return {k: v for k, v in (("a", self.a), ("d", self.d), ("h", self.h), ("phi", self.phi)) if v is not None}


@dataclass
class CaseParams:
    """One catalog geometry in wavelength units, with the family it belongs to."""
    shape: str
    a: float
    d: float = 0.0
    h: float = 0.0
    phi: float = math.pi / 2
    family: str = ""
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_spec(self, wavelength: float) -> GeometrySpec:
        data = {
            "shape": self.shape,
            "a": self.a * wavelength,
            "d": self.d * wavelength,
            "h": self.h * wavelength,
            "phi": self.phi,
            "lambda": wavelength,
        }
        data.update(self.extra)
        return GeometrySpec.from_dict(data)


@dataclass
class ExperimentOutcome:
    """Summary and the files an experiment produced."""
    summary: RunSummary
    artifacts: List[Path]


class BaseExperiment(ABC):
    """Abstract base class for experiment pipelines."""

    name: ClassVar[str] = ""
    description: ClassVar[str] = ""

    def __init__(
        self,
        config: ExperimentConfig,
        settings: Optional[PipelineSettings] = None,
        writer: Optional[ArtifactWriter] = None,
        threads: int = 1,
        smoothing: bool = False,
        edge_band: Optional[float] = None,
        remainder_columns: int = 25,
    ):
        """Initialize the experiment.

        Args:
            config: Run parameters.
            settings: Numeric settings for every case.
            writer: Artifact writer; nothing is written when None.
            threads: Case pool width.
            smoothing: Smooth localization maps over grid neighbourhoods.
            edge_band: Edge band width in wavelengths, None for the default.
            remainder_columns: Remainder group size for line geometries.
        """
        self.config = config
        self.settings = settings or PipelineSettings()
        self.writer = writer
        self.threads = max(1, threads)
        self.smoothing = smoothing
        self.edge_band = edge_band
        self.remainder_columns = remainder_columns
        self.plotter = SvgPlotter() if config.plot and writer is not None else None
        self._artifacts: List[Path] = []
        self._by_id: Dict[str, CaseResult] = {}

    @abstractmethod
    def default_cases(self) -> List[CaseParams]:
        """Desk-scale (or full-size when ``config.full``) cases."""

    def analyze(self, results: List[CaseResult]) -> Dict[str, Any]:
        """Experiment-specific checks; returns ``{"checks": ..., "scaling": [...]}``."""
        return {"checks": {}, "scaling": []}

    def cases(self) -> List[CaseParams]:
        """Default cases with CLI overrides applied and duplicates removed."""
        cases = [self._with_overrides(case) for case in self.default_cases()]
        unique: Dict[str, CaseParams] = {}
        for case in cases:
            key = case.to_spec(self.config.wavelength).case_id()
            unique.setdefault(key, case)
        return list(unique.values())

    def _with_overrides(self, case: CaseParams) -> CaseParams:
        """Apply the geometry overrides; a new ``a`` alone rescales ``d`` and ``h``."""
        overrides = dict(self.config.overrides)
        if not overrides:
            return case
        if "a" in overrides and case.a > 0:
            scale = overrides["a"] / case.a
            overrides.setdefault("d", case.d * scale)
            overrides.setdefault("h", case.h * scale)
        return replace(case, **overrides)

    def specs(self) -> List[GeometrySpec]:
        return [resolve_spec(case.to_spec(self.config.wavelength), self.settings) for case in self.cases()]

    def run_case(self, spec: GeometrySpec, inner_workers: Optional[int] = None) -> CaseResult:
        settings = replace(self.settings, workers=inner_workers or self.settings.workers)
        return analyze_case(
            spec,
            settings=settings,
            seed=self.config.seed,
            method=self.config.method,
            taus=self.config.taus,
        )

    def run_cases(self, specs: Sequence[GeometrySpec]) -> List[CaseResult]:
        """Run every case in a pool; results come back in case order."""
        width = min(self.threads, len(specs)) or 1
        inner = max(1, self.threads // width)
        if width == 1:
            return [self.run_case(spec, inner) for spec in specs]
        with ThreadPoolExecutor(max_workers=width) as pool:
            return list(pool.map(lambda spec: self.run_case(spec, inner), specs))

    def run(self) -> ExperimentOutcome:
        """Run all cases, write per-case artifacts and the summary."""
        specs = self.specs()
        logger.info(f"Running {self.name} with {len(specs)} case(s)")
        results = self.run_cases(specs)
        self._by_id = {result.case_id: result for result in results}

        for result in results:
            self.write_case(result)

        extra = self.analyze(results)
        case_analysis = extra.get("case_analysis", {})
        summary = RunSummary(
            experiment=self.name,
            version=__version__,
            seed=self.config.seed,
            full=self.config.full,
            wavelength=self.config.wavelength,
            cases=[
                CaseSummary(**result.summary(), analysis=case_analysis.get(result.case_id, {}))
                for result in results
            ],
            scaling=[ScalingSummary(**s) for s in extra.get("scaling", [])],
            checks=extra.get("checks", {}),
        )
        if self.writer is not None:
            path = self.writer.experiment_directory(self.name) / "summary.json"
            self._artifacts.append(self.writer.write_json(path, summary.model_dump(mode="json")))
        return ExperimentOutcome(summary=summary, artifacts=list(self._artifacts))

    def cached_case(self, spec: GeometrySpec) -> CaseResult:
        """Result of an already computed case, computing it when missing."""
        cached = self._by_id.get(spec.case_id())
        return cached if cached is not None else self.run_case(spec)

    def case_directory(self, result: CaseResult) -> Optional[Path]:
        if self.writer is None:
            return None
        return self.writer.case_directory(self.name, result.case_id)

    def write_case(self, result: CaseResult) -> None:
        """Spectrum CSV and, when plotting, its SVG."""
        directory = self.case_directory(result)
        if directory is None:
            return
        sigmas = result.spectrum.sigmas
        normalized = result.spectrum.normalized
        rows = ((n + 1, sigmas[n], normalized[n]) for n in range(sigmas.size))
        self._artifacts.append(self.writer.write_csv(directory / "spectrum.csv", ["n", "sigma", "sigma_norm"], rows))
        if self.plotter is not None:
            svg = self.plotter.sv_curves({result.case_id: sigmas}, result.knee_pred, title=result.case_id)
            self._artifacts.append(self.writer.write_text(directory / "spectrum.svg", svg))

    def study(self, family: str, specs: Sequence[GeometrySpec], tau: float) -> Optional[Dict[str, Any]]:
        """Scaling study over cached cases; written as ``scaling_<family>.csv``."""
        if len(specs) < 2:
            logger.warning(f"Skipping scaling study {family}: fewer than two sizes")
            return None
        try:
            result = scaling_study(specs, tau, case_runner=self.cached_case)
        except (ParameterError, FloorError) as e:
            logger.warning(f"Skipping scaling study {family}: {e}")
            return None
        if self.writer is not None:
            header = ["a", "ka", "dof", "knee_detected", "rank", "remainder_width"]
            rows = [[getattr(row, key) for key in header] for row in result.rows]
            path = self.writer.experiment_directory(self.name) / f"scaling_{family}.csv"
            self._artifacts.append(self.writer.write_csv(path, header, rows))
        return {"family": family, "tau": tau, "slope": result.slope, "rows": result.table()}

    def mode_analysis(self, result: CaseResult, tau: float) -> Dict[str, Any]:
        """Localization maps, edge concentration and, for lines, DFT band fractions."""
        scene, spectrum = result.scene, result.spectrum
        if self.edge_band is not None:
            band_width = self.edge_band * scene.wavelength
        else:
            band_width = default_edge_band(scene)
        remainder_size = self.remainder_columns if scene.observer.manifold_dim == 1 else None
        directory = self.case_directory(result)
        metrics: Dict[str, Any] = {"band_width": band_width}
        maps = {}
        try:
            for group in (Group.APERTURE, Group.REMAINDER):
                maps[group] = localization_map(
                    spectrum, scene, group, result.knee_pred, tau, remainder_size, self.smoothing
                )
        except (MissingVectorsError, ParameterError, FloorError) as e:
            logger.warning(f"No localization maps for {result.case_id}: {e}")
            return metrics

        for group, lmap in maps.items():
            try:
                metrics[f"edge_concentration_{group.value}"] = edge_concentration(lmap, scene, band_width)
            except EmptyBandError as e:
                logger.warning(f"{result.case_id}: {e}")
            if directory is not None:
                points = lmap.points if lmap.points.shape[1] == 3 else [[*p, 0.0] for p in lmap.points]
                rows = ([*p, v, m] for p, v, m in zip(points, lmap.values, lmap.mean_squares))
                self._artifacts.append(
                    self.writer.write_csv(
                        directory / f"map_{group.value}.csv", ["x", "y", "z", "value", "mean_square"], rows
                    )
                )
                if self.plotter is not None:
                    svg = self.plotter.heatmap(lmap, title=f"{result.case_id} {group.value}")
                    self._artifacts.append(self.writer.write_text(directory / f"map_{group.value}.svg", svg))

        if scene.observer.manifold_dim == 1:
            try:
                modes = mode_dft(spectrum, scene, result.knee_pred, tau, remainder_size)
                band = predict_band(scene)
            except (NonUniformSamplingError, MissingVectorsError, ParameterError, FloorError, GeometryError) as e:
                logger.warning(f"No DFT analysis for {result.case_id}: {e}")
                return metrics
            fractions = band_energy_fraction(modes, band)
            metrics["band"] = {"k_lo": band.k_lo, "k_hi": band.k_hi}
            for group, fraction in fractions.items():
                metrics[f"band_fraction_{group.value}"] = fraction
            if directory is not None:
                rows = (
                    (k, group.value, energy[i])
                    for group, energy in modes.group_energy.items()
                    for i, k in enumerate(modes.k_x)
                )
                dft_csv = self.writer.write_csv(directory / "dft.csv", ["k_x", "group", "mean_square"], rows)
                self._artifacts.append(dft_csv)
                if self.plotter is not None:
                    svg = self.plotter.mode_plot(modes, band, title=result.case_id)
                    self._artifacts.append(self.writer.write_text(directory / "dft.svg", svg))
        return metrics
