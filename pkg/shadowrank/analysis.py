"""Aperture and diffraction diagnostics of singular vectors, and scaling studies."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    EmptyBandError,
    GeometryError,
    MissingVectorsError,
    NonUniformSamplingError,
    ParameterError,
)
from .geometry import GeometrySpec, ScenePair, Shape
from .pipeline import CaseResult, PipelineSettings, analyze_case
from .spectrum import SpectrumResult, rank_at

logger = logging.getLogger(__name__)

EDGE_RATIO_CAP = 1e6

# Relative tolerance for treating line samples as uniformly spaced.
_UNIFORM_TOL = 1e-9


class Group(str, Enum):
    APERTURE = "aperture"
    REMAINDER = "remainder"


@dataclass(frozen=True, eq=False)
class LocalizationMap:
    """Per-point intensity of a group of singular vectors.

    ``mean_squares`` holds the unnormalized per-point mean of |U|² over the
    group columns; ``values`` is log10 of its square root, normalized to the
    maximum and clipped to one decade.
    """
    points: np.ndarray
    values: np.ndarray
    mean_squares: np.ndarray
    group: Group
    columns: Tuple[int, int]

    @property
    def group_size(self) -> int:
        return self.columns[1] - self.columns[0]


@dataclass(frozen=True)
class SpectralBand:
    """Lateral wavenumber interval of the aperture scanning beams."""
    k_lo: float
    k_hi: float

    @property
    def width(self) -> float:
        return self.k_hi - self.k_lo

    def contains(self, k_x: np.ndarray, margin: float = 0.0) -> np.ndarray:
        return (k_x >= self.k_lo - margin) & (k_x <= self.k_hi + margin)


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Unitary DFTs of singular vectors sampled along a line.

    ``coefficients`` has one column per singular vector with rows ordered by
    increasing ``k_x``; ``group_energy`` maps each group to its per-bin mean of
    |coefficient|².
    """
    k_x: np.ndarray
    coefficients: np.ndarray
    group_energy: Dict[Group, np.ndarray]
    resolution: float


@dataclass(frozen=True)
class ScalingRow:
    a: float
    ka: float
    dof: float
    knee_detected: Optional[int]
    rank: int
    remainder_width: int


@dataclass(frozen=True)
class ScalingStudy:
    rows: List[ScalingRow]
    tau: float
    slope: Optional[float]

    def table(self) -> List[Dict[str, Any]]:
        return [row.__dict__.copy() for row in self.rows]


def _knee_index(knee_pred: float) -> int:
    if knee_pred < 0:
        raise ParameterError(f"knee_pred must be non-negative, got {knee_pred}")
    return math.floor(knee_pred + 0.5)


def group_columns(
    spectrum: SpectrumResult,
    group: Group,
    knee_pred: float,
    tau: float,
    remainder_size: Optional[int] = None,
) -> Tuple[int, int]:
    """Half-open column range of a singular-vector group.

    The aperture group is the first ``round(knee_pred)`` columns. The
    remainder group follows it up to the rank at ``tau``, or for at most
    ``remainder_size`` columns when given.
    """
    knee = _knee_index(knee_pred)
    group = Group(group)
    if group == Group.APERTURE:
        start, end = 0, knee
    else:
        start, end = knee, rank_at(spectrum, tau)
        if remainder_size is not None:
            end = min(end, knee + remainder_size)
    if end <= start:
        raise ParameterError(f"The {group.value} group is empty (columns {start}..{end})")
    return start, end


def _vectors(spectrum: SpectrumResult, end: int) -> np.ndarray:
    if spectrum.U_cols is None:
        raise MissingVectorsError("The spectrum carries no observer-side singular vectors")
    if spectrum.U_cols.shape[1] < end:
        raise MissingVectorsError(
            f"Need {end} singular vectors, the spectrum carries {spectrum.U_cols.shape[1]}"
        )
    return spectrum.U_cols


def _sample_spacing(scene: ScenePair) -> float:
    if scene.spec is not None:
        return scene.wavelength / scene.spec.delta
    tree = cKDTree(scene.observer.points)
    distances, _ = tree.query(scene.observer.points, k=2)
    return float(np.median(distances[:, 1]))


def _smooth(points: np.ndarray, values: np.ndarray, spacing: float) -> np.ndarray:
    """Average over the 3x3 grid neighbourhood of every point."""
    tree = cKDTree(points)
    neighbours = tree.query_ball_point(points, r=1.5 * spacing)
    return np.array([values[idx].mean() for idx in neighbours])


def localization_map(
    spectrum: SpectrumResult,
    scene: ScenePair,
    group: Group,
    knee_pred: float,
    tau: float,
    remainder_size: Optional[int] = None,
    smoothing: bool = False,
) -> LocalizationMap:
    """Row-wise intensity of a group of observer-side singular vectors.

    Args:
        spectrum: Spectrum carrying ``U_cols``.
        scene: Scene the spectrum was computed on.
        group: Aperture or remainder.
        knee_pred: Predicted knee, which splits the two groups.
        tau: Threshold ending the remainder group.
        remainder_size: Optional cap on the remainder group size.
        smoothing: Average mean squares over each point's grid neighbourhood.

    Returns:
        LocalizationMap over the observer points.

    Raises:
        MissingVectorsError: If the spectrum lacks the group's columns.
    """
    group = Group(group)
    start, end = group_columns(spectrum, group, knee_pred, tau, remainder_size)
    u = _vectors(spectrum, end)[:, start:end]
    if u.shape[0] != scene.observer.size:
        raise MissingVectorsError(
            f"Singular vectors have {u.shape[0]} rows, the observer has {scene.observer.size} points"
        )

    mean_squares = np.mean(np.abs(u) ** 2, axis=1)
    if smoothing:
        mean_squares = _smooth(scene.observer.points, mean_squares, _sample_spacing(scene))

    rms = np.sqrt(mean_squares)
    peak = rms.max()
    with np.errstate(divide="ignore"):
        values = np.log10(rms / peak) if peak > 0 else np.full(rms.shape, -np.inf)
    values = np.clip(values, -1.0, 0.0)
    return LocalizationMap(
        points=scene.observer.points,
        values=values,
        mean_squares=mean_squares,
        group=group,
        columns=(start, end),
    )


def default_edge_band(scene: ScenePair) -> float:
    """λ for curves, max(λ, 0.05a) for surfaces."""
    if scene.observer.manifold_dim == 1 or scene.spec is None:
        return scene.wavelength
    return max(scene.wavelength, 0.05 * scene.spec.a)


def edge_concentration(lmap: LocalizationMap, scene: ScenePair, band_width: Optional[float] = None) -> float:
    """Mean-square intensity near the domain edges relative to the interior.

    Points closer than ``band_width`` to the observer boundary form the edge
    band. The ratio is capped at 1e6.

    Raises:
        EmptyBandError: If the band or its complement has no points.
    """
    band_width = default_edge_band(scene) if band_width is None else band_width
    if band_width <= 0:
        raise ParameterError(f"band_width must be positive, got {band_width}")
    in_band = scene.observer.boundary_dist < band_width
    if not np.any(in_band) or np.all(in_band):
        raise EmptyBandError(
            f"Edge band of width {band_width:g} holds {int(in_band.sum())} of {in_band.size} points"
        )
    edge = lmap.mean_squares[in_band].mean()
    interior = lmap.mean_squares[~in_band].mean()
    if interior <= 0:
        return EDGE_RATIO_CAP
    return float(min(edge / interior, EDGE_RATIO_CAP))


def _line_order(scene: ScenePair) -> Tuple[np.ndarray, float]:
    """Observer sample order along x and the uniform spacing."""
    points = scene.observer.points
    if points.shape[0] < 2:
        raise NonUniformSamplingError("A line needs at least two samples")
    if np.ptp(points[:, 1:], axis=0).max() > _UNIFORM_TOL * max(1.0, np.ptp(points[:, 0])):
        raise NonUniformSamplingError("Observer samples do not lie on a line along x")
    order = np.argsort(points[:, 0], kind="stable")
    steps = np.diff(points[order, 0])
    dx = steps.mean()
    if dx <= 0 or np.ptp(steps) > _UNIFORM_TOL * max(dx, 1.0):
        raise NonUniformSamplingError("Observer samples are not uniformly spaced along x")
    return order, float(dx)


def mode_dft(
    spectrum: SpectrumResult,
    scene: ScenePair,
    knee_pred: float,
    tau: float,
    remainder_size: Optional[int] = None,
) -> ModeSpectrum:
    """Unitary DFT of every observer-side singular vector up to the rank at ``tau``.

    Bins are mapped to lateral wavenumbers ``k_x`` in ascending order; a
    vector ``exp(-j κ x)`` peaks at ``k_x = -κ``.

    Raises:
        NonUniformSamplingError: If the observer is not a uniformly sampled line along x.
        MissingVectorsError: If the spectrum lacks singular vectors.
    """
    order, dx = _line_order(scene)
    groups = {
        group: group_columns(spectrum, group, knee_pred, tau, remainder_size)
        for group in (Group.APERTURE, Group.REMAINDER)
    }
    end = max(cols[1] for cols in groups.values())
    u = _vectors(spectrum, end)[order, :end]

    n = u.shape[0]
    coefficients = np.fft.fftshift(np.fft.fft(u, axis=0, norm="ortho"), axes=0)
    k_x = np.fft.fftshift(2 * math.pi * np.fft.fftfreq(n, d=dx))
    energy = np.abs(coefficients) ** 2
    group_energy = {group: energy[:, start:stop].mean(axis=1) for group, (start, stop) in groups.items()}
    resolution = 2 * math.pi / (n * dx)
    return ModeSpectrum(k_x=k_x, coefficients=coefficients, group_energy=group_energy, resolution=resolution)


def _segment_extent(scene: ScenePair, which: str) -> Tuple[float, float, float]:
    """x-range and y-position of a line domain."""
    spec = scene.spec
    if spec is not None and spec.shape == Shape.PARALLEL_LINES:
        shift, y = (0.0, 0.0) if which == "source" else (spec.h, spec.d)
        return shift - spec.a / 2, shift + spec.a / 2, y
    cloud = scene.source if which == "source" else scene.observer
    half_cell = float(np.min(cloud.weights)) / 2
    return cloud.points[:, 0].min() - half_cell, cloud.points[:, 0].max() + half_cell, float(cloud.points[0, 1])


def predict_band(scene: ScenePair) -> SpectralBand:
    """Band of lateral wavenumbers k·sin θ spanned by source-observer directions.

    Raises:
        GeometryError: If either domain is not a segment parallel to x.
    """
    for cloud in (scene.source, scene.observer):
        if cloud.manifold_dim != 1 or np.ptp(cloud.points[:, 1:], axis=0).max() > 0:
            raise GeometryError("Band prediction needs both domains to be segments along x")
    src_lo, src_hi, src_y = _segment_extent(scene, "source")
    obs_lo, obs_hi, obs_y = _segment_extent(scene, "observer")
    d = abs(obs_y - src_y)
    k = scene.wavenumber
    values = []
    for xs in (src_lo, src_hi):
        for xo in (obs_lo, obs_hi):
            offset = xs - xo
            distance = math.hypot(offset, d)
            if distance == 0:
                raise GeometryError("Line endpoints coincide")
            values.append(k * offset / distance)
    return SpectralBand(k_lo=min(values), k_hi=max(values))


def band_energy_fraction(modes: ModeSpectrum, band: SpectralBand, margin_bins: int = 1) -> Dict[Group, float]:
    """Share of each group's DFT energy inside ``band`` widened by ``margin_bins`` bins."""
    inside = band.contains(modes.k_x, margin_bins * modes.resolution)
    fractions = {}
    for group, energy in modes.group_energy.items():
        total = energy.sum()
        fractions[group] = float(energy[inside].sum() / total) if total > 0 else 0.0
    return fractions


def fit_loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.size != y.size or x.size < 2:
        raise ParameterError("A slope needs at least two (x, y) pairs")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ParameterError("Log-log fitting needs positive values")
    if np.ptp(x) == 0:
        raise ParameterError("Log-log fitting needs distinct x values")
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)


def scaling_study(
    family: Sequence[GeometrySpec],
    tau: float,
    wavelength: float = 1.0,
    settings: Optional[PipelineSettings] = None,
    seed: int = 42,
    case_runner: Optional[Callable[[GeometrySpec], CaseResult]] = None,
) -> ScalingStudy:
    """Remainder width against ka over a family of sizes.

    Args:
        family: Geometries differing in size.
        tau: Threshold for ranks and remainder widths.
        wavelength: Wavelength used when a spec carries none.
        settings: Pipeline settings.
        seed: Randomized SVD seed.
        case_runner: Replaces :func:`analyze_case` (used to share cached cases).

    Returns:
        ScalingStudy with one row per size and the fitted log-log slope,
        None when fewer than two widths are positive.
    """
    if len(family) < 2:
        raise ParameterError("A scaling study needs at least two sizes")
    if len(family) == 2:
        logger.warning("Fitting the scaling slope from only two sizes")

    def run(spec: GeometrySpec) -> CaseResult:
        if case_runner is not None:
            return case_runner(spec)
        return analyze_case(spec, spec.wavelength or wavelength, settings, seed, taus=(tau,))

    rows = []
    for spec in family:
        case = run(spec)
        rows.append(
            ScalingRow(
                a=spec.a,
                ka=case.ka,
                dof=case.knee_pred,
                knee_detected=case.knee_detected,
                rank=rank_at(case.spectrum, tau),
                remainder_width=max(0, rank_at(case.spectrum, tau) - _knee_index(case.knee_pred)),
            )
        )

    usable = [row for row in rows if row.remainder_width > 0]
    slope = None
    if len({row.ka for row in usable}) >= 2:
        slope = fit_loglog_slope([row.ka for row in usable], [row.remainder_width for row in usable])
    else:
        logger.warning("Not enough positive remainder widths to fit a slope")
    logger.info(f"Scaling study over {len(rows)} sizes at tau={tau:g}: slope={slope}")
    return ScalingStudy(rows=rows, tau=tau, slope=slope)
