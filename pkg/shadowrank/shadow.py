"""Cumulative mutual shadow areas and lengths, and the DoF predictors built on them."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np
import shapely

from .config import default_workers
from .errors import (
    DimensionError,
    DivergenceError,
    GeometryError,
    OverlapError,
    ParameterError,
    UnsupportedShapeError,
)
from .geometry import PointCloud, ScenePair, Shape

logger = logging.getLogger(__name__)

# Pairwise evaluations held in memory per quadrature chunk.
_PAIRS_PER_CHUNK = 2_000_000

# Directions closer than this to edge-on project a domain onto a line.
_EDGE_ON_TOL = 1e-9


class ShadowKind(str, Enum):
    AREA = "area"
    LENGTH = "length"


class ShadowMethod(str, Enum):
    LOS_INTEGRAL = "los-integral"
    CLOSED_FORM = "closed-form"
    SWEEP = "plane-wave-sweep"


@dataclass(frozen=True)
class ShadowEstimate:
    """A cumulative mutual shadow and the DoF predictor derived from it."""
    value: float
    kind: ShadowKind
    dof: float
    method: ShadowMethod
    wavelength: float
    rel_err_est: Optional[float] = None

    @classmethod
    def create(
        cls,
        value: float,
        kind: ShadowKind,
        method: ShadowMethod,
        wavelength: float,
        rel_err_est: Optional[float] = None,
    ) -> "ShadowEstimate":
        """Build an estimate, deriving ``dof`` from the value and wavelength."""
        if wavelength <= 0:
            raise ParameterError(f"wavelength must be positive, got {wavelength}")
        value = max(0.0, float(value))
        power = 2 if kind == ShadowKind.AREA else 1
        return cls(value, kind, value / wavelength ** power, method, wavelength, rel_err_est)

    def doubled(self) -> float:
        """Predictor for vector sources and fields."""
        return 2 * self.dof

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["kind"] = self.kind.value
        data["method"] = self.method.value
        return data


def _pair_chunk(source: PointCloud, observer: PointCloud, rows: slice, power: int) -> float:
    r = observer.points[rows, None, :] - source.points[None, :, :]
    dist = np.linalg.norm(r, axis=2)
    if np.any(dist == 0):
        raise OverlapError("source and observer share a quadrature point")
    obs_cos = np.abs(np.einsum("ijk,ik->ij", r, observer.normals[rows]))
    src_cos = np.abs(np.einsum("ijk,jk->ij", r, source.normals))
    integrand = obs_cos * src_cos / dist ** power
    return math.fsum((integrand @ source.weights) * observer.weights[rows])


def los_double_integral(
    source: PointCloud, observer: PointCloud, power: int, workers: Optional[int] = None
) -> float:
    """Weighted double sum of |n'·R||n·R|/|R|^power over all point pairs.

    Observer rows are split into fixed chunks whose partial sums are gathered
    in order and combined with ``math.fsum``, so the result does not depend on
    the number of workers.
    """
    rows_per_chunk = max(1, _PAIRS_PER_CHUNK // source.size)
    chunks = [slice(i, min(i + rows_per_chunk, observer.size)) for i in range(0, observer.size, rows_per_chunk)]
    workers = workers or default_workers()

    if workers == 1 or len(chunks) == 1:
        partials = [_pair_chunk(source, observer, rows, power) for rows in chunks]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(chunks))) as pool:
            partials = list(pool.map(lambda rows: _pair_chunk(source, observer, rows, power), chunks))
    return math.fsum(partials)


def _refined_integral(
    scene: ScenePair,
    power: int,
    quadrature_points: int,
    divergence_tol: float,
    workers: Optional[int],
) -> Tuple[float, Optional[float]]:
    """Integral at two resolutions, Richardson-combined for the midpoint rule."""
    if scene.quadrature_sampler is None:
        return los_double_integral(scene.source, scene.observer, power, workers), None

    coarse = los_double_integral(*scene.quadrature_sampler(quadrature_points), power, workers)
    fine = los_double_integral(*scene.quadrature_sampler(2 * quadrature_points), power, workers)
    if fine == 0 and coarse == 0:
        return 0.0, 0.0

    change = abs(fine - coarse) / abs(fine)
    logger.debug(f"LoS refinement {quadrature_points}->{2 * quadrature_points}: coarse={coarse:.10g} fine={fine:.10g}")
    if change > divergence_tol:
        raise DivergenceError(
            f"Shadow quadrature changed by {change:.3g} under refinement "
            f"(limit {divergence_tol}); the domains are too close"
        )
    value = (4 * fine - coarse) / 3
    return value, change / 3


def shadow_area_los(
    scene: ScenePair,
    quadrature_points: int = 16,
    divergence_tol: float = 0.05,
    workers: Optional[int] = None,
) -> ShadowEstimate:
    """Cumulative mutual shadow area from the line-of-sight double surface integral.

    Args:
        scene: 3-D scene with surface domains.
        quadrature_points: Coarse samples per characteristic size; the
            estimate is refined once at twice this resolution.
        divergence_tol: Largest accepted relative change under refinement.
        workers: Thread cap for the pairwise sums.

    Returns:
        Area estimate with ``dof = area / λ²``.

    Raises:
        DimensionError: If the scene is not 3-D or its domains are curves.
        DivergenceError: If refinement changes the value by more than the tolerance.
    """
    if scene.dim != 3 or scene.source.manifold_dim != 2 or scene.observer.manifold_dim != 2:
        raise DimensionError("Mutual shadow area needs surface domains in a 3-D scene")
    value, err = _refined_integral(scene, 4, quadrature_points, divergence_tol, workers)
    return ShadowEstimate.create(value, ShadowKind.AREA, ShadowMethod.LOS_INTEGRAL, scene.wavelength, err)


def shadow_length_los(
    scene: ScenePair,
    quadrature_points: int = 16,
    divergence_tol: float = 0.05,
    workers: Optional[int] = None,
) -> ShadowEstimate:
    """Cumulative mutual shadow length from the line-of-sight double line integral.

    A 3-D scene carrying a 2-D cross-section is evaluated on that cross-section.
    """
    if scene.dim == 3 and scene.cross_section is not None:
        scene = scene.cross_section
    if scene.dim != 2 or scene.source.manifold_dim != 1 or scene.observer.manifold_dim != 1:
        raise DimensionError("Mutual shadow length needs curve domains in a 2-D scene")
    value, err = _refined_integral(scene, 3, quadrature_points, divergence_tol, workers)
    return ShadowEstimate.create(value, ShadowKind.LENGTH, ShadowMethod.LOS_INTEGRAL, scene.wavelength, err)


def shadow_discs_closed_form(a: float, d: float, wavelength: float = 1.0) -> ShadowEstimate:
    """Exact mutual shadow area of two coaxial parallel discs of radius ``a`` at distance ``d``."""
    if not a > 0 or not d >= 0:
        raise ParameterError(f"Need a > 0 and d >= 0, got a={a}, d={d}")
    value = math.pi ** 2 / 4 * (math.sqrt(4 * a * a + d * d) - d) ** 2
    return ShadowEstimate.create(value, ShadowKind.AREA, ShadowMethod.CLOSED_FORM, wavelength, 0.0)


def shadow_lines_closed_form(a: float, d: float, h: float, wavelength: float = 1.0) -> ShadowEstimate:
    """Exact mutual shadow length of two parallel segments of length ``a``.

    The segments are ``d`` apart and the observer is shifted by ``h`` along them.
    Collinear overlapping segments (d = h = 0) return ``2a`` with a warning.
    """
    if not a > 0 or not d >= 0:
        raise ParameterError(f"Need a > 0 and d >= 0, got a={a}, d={d}")
    if d == 0 and h == 0:
        logger.warning("Coincident segments (d = h = 0): returning the degenerate value 2a")
    value = math.hypot(d, a + h) - 2 * math.hypot(d, h) + math.hypot(d, a - h)
    return ShadowEstimate.create(value, ShadowKind.LENGTH, ShadowMethod.CLOSED_FORM, wavelength, 0.0)


def _orthonormal_frame(axis: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    axis = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(axis)
    if norm == 0:
        raise ParameterError("Direction axis must be non-zero")
    axis = axis / norm
    helper = np.array([1.0, 0.0, 0.0]) if abs(axis[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(axis, e1)
    return e1, e2, axis


def hemisphere_directions(axis: np.ndarray, n_mu: int = 100, n_phi: int = 100) -> Tuple[np.ndarray, np.ndarray]:
    """Midpoint product grid in (cos θ, φ) over the hemisphere about ``axis``.

    Returns:
        ``(directions, weights)`` with shapes ``(n_mu * n_phi, 3)`` and
        ``(n_mu * n_phi,)``; the weights sum to 2π.
    """
    if n_mu < 1 or n_phi < 1:
        raise ParameterError(f"Need n_mu, n_phi >= 1, got {n_mu}, {n_phi}")
    e1, e2, e3 = _orthonormal_frame(axis)
    mu = (np.arange(n_mu) + 0.5) / n_mu
    phi = 2 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
    mu_grid, phi_grid = np.meshgrid(mu, phi, indexing="ij")
    mu_grid, phi_grid = mu_grid.ravel(), phi_grid.ravel()
    sin_theta = np.sqrt(1 - mu_grid ** 2)
    directions = (
        (sin_theta * np.cos(phi_grid))[:, None] * e1
        + (sin_theta * np.sin(phi_grid))[:, None] * e2
        + mu_grid[:, None] * e3
    )
    weights = np.full(mu_grid.size, 2 * math.pi / (n_mu * n_phi))
    return directions, weights


def _polygon_normal(outline: np.ndarray) -> np.ndarray:
    normal = np.cross(outline[1] - outline[0], outline[2] - outline[0])
    return normal / np.linalg.norm(normal)


def _check_outlines(scene: ScenePair) -> Tuple[np.ndarray, np.ndarray]:
    if scene.dim != 3:
        raise DimensionError("The plane-wave sweep needs a 3-D scene")
    if scene.outlines is None:
        raise UnsupportedShapeError("The plane-wave sweep needs flat convex polygon domains")
    return scene.outlines


def _overlap_areas(scene: ScenePair, directions: np.ndarray) -> np.ndarray:
    """Overlap area of the two projected outlines for each direction."""
    source_outline, observer_outline = _check_outlines(scene)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    directions = directions / np.linalg.norm(directions, axis=1, keepdims=True)

    # in-plane basis (u, v) perpendicular to each direction
    helper = np.where(np.abs(directions[:, :1]) < 0.9, [[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    u = np.cross(directions, helper)
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v = np.cross(directions, u)

    areas = np.zeros(directions.shape[0])
    visible = (np.abs(directions @ _polygon_normal(source_outline)) > _EDGE_ON_TOL) & (
        np.abs(directions @ _polygon_normal(observer_outline)) > _EDGE_ON_TOL
    )
    if not np.any(visible):
        return areas

    def projected(outline: np.ndarray) -> np.ndarray:
        closed = np.vstack([outline, outline[:1]])
        coords = np.stack(
            [np.einsum("vk,mk->mv", closed, u[visible]), np.einsum("vk,mk->mv", closed, v[visible])], axis=-1
        )
        return shapely.polygons(coords)

    overlap = shapely.intersection(projected(source_outline), projected(observer_outline))
    areas[visible] = shapely.area(overlap)
    return areas


def mutual_shadow_area(scene: ScenePair, direction: np.ndarray) -> float:
    """Overlap area of the shadows both domains cast on the plane normal to ``direction``."""
    return float(_overlap_areas(scene, np.asarray(direction, dtype=float))[0])


def _sweep_integral(scene: ScenePair, axis: np.ndarray, n_mu: int, n_phi: int) -> float:
    directions, weights = hemisphere_directions(axis, n_mu, n_phi)
    return math.fsum(_overlap_areas(scene, directions) * weights)


def shadow_area_sweep(scene: ScenePair, n_mu: int = 100, n_phi: int = 100) -> ShadowEstimate:
    """Cumulative mutual shadow area by integrating projected overlaps over directions.

    The hemisphere is centred on the source-to-observer centroid axis. The
    overlap area is even in the direction, so every pair of mutually visible
    points is counted once. ``rel_err_est`` compares against a grid with half
    the resolution in each angle.

    Raises:
        DimensionError: If the scene is not 3-D.
        UnsupportedShapeError: If either domain is not a flat convex polygon.
    """
    _check_outlines(scene)
    axis = scene.observer.centroid - scene.source.centroid
    value = _sweep_integral(scene, axis, n_mu, n_phi)
    coarse = _sweep_integral(scene, axis, max(1, n_mu // 2), max(1, n_phi // 2))
    rel_err = abs(value - coarse) / value if value > 0 else 0.0
    logger.debug(f"Sweep over {n_mu}x{n_phi} directions: {value:.10g} (half grid {coarse:.10g})")
    return ShadowEstimate.create(value, ShadowKind.AREA, ShadowMethod.SWEEP, scene.wavelength, rel_err)


def governing_estimate(
    scene: ScenePair,
    fallback_threshold: float = 1.0,
    quadrature_points: int = 16,
    divergence_tol: float = 0.05,
    workers: Optional[int] = None,
) -> ShadowEstimate:
    """Shadow estimate that governs the knee of ``scene``.

    3-D surface scenes use the area; when its predictor falls below
    ``fallback_threshold`` the length of the 2-D cross-section takes over.
    2-D curve scenes use the length directly. Mixed cases (2-D kernels on
    surfaces, 3-D kernels on curves) always use the cross-section.
    """
    kwargs = {"quadrature_points": quadrature_points, "divergence_tol": divergence_tol, "workers": workers}
    surfaces = scene.source.manifold_dim == 2 and scene.observer.manifold_dim == 2

    if scene.dim == 3 and surfaces:
        area = shadow_area_los(scene, **kwargs)
        if area.dof >= fallback_threshold or scene.cross_section is None:
            return area
        logger.warning(
            f"Area predictor {area.dof:.3g} is below {fallback_threshold}; "
            f"using the cross-section length predictor"
        )
        return shadow_length_los(scene.cross_section, **kwargs)

    if scene.dim == 2 and not surfaces:
        return shadow_length_los(scene, **kwargs)

    if scene.cross_section is None:
        raise GeometryError("Scene has no cross-section to predict its knee from")
    return shadow_length_los(scene.cross_section, **kwargs)


def predict_knee(
    scene: ScenePair,
    vector_doubling: bool = False,
    fallback_threshold: float = 1.0,
    quadrature_points: int = 16,
    divergence_tol: float = 0.05,
    workers: Optional[int] = None,
) -> float:
    """Predicted knee index (number of DoF) of the interaction between the scene's domains."""
    estimate = governing_estimate(scene, fallback_threshold, quadrature_points, divergence_tol, workers)
    return estimate.doubled() if vector_doubling else estimate.dof


def closed_form_for(scene: ScenePair) -> Optional[ShadowEstimate]:
    """Closed-form estimate when the scene is a matching catalog shape, else None."""
    spec = scene.spec
    if spec is None:
        return None
    if spec.shape == Shape.PARALLEL_DISCS and spec.h == 0:
        return shadow_discs_closed_form(spec.a, spec.d, scene.wavelength)
    if spec.shape == Shape.PARALLEL_LINES:
        return shadow_lines_closed_form(spec.a, spec.d, spec.h, scene.wavelength)
    return None
