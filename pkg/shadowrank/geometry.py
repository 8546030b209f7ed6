"""Catalog of source/observer domain pairs and their point sampling."""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator
from scipy.spatial import cKDTree

from .errors import OverlapError, ParameterError

logger = logging.getLogger(__name__)

# Domains closer than this fraction of a wavelength are treated as touching.
MIN_SEPARATION_FRACTION = 1e-2

NORMAL_TOL = 1e-12


class Shape(str, Enum):
    """Catalog geometries."""
    PARALLEL_DISCS = "parallel-discs"
    PARALLEL_PLATES = "parallel-plates"
    SLANTED_PLATES = "slanted-plates"
    COPLANAR_SQUARES = "coplanar-squares"
    PARALLEL_LINES = "parallel-lines"
    PLATE_AND_FRAME = "plate-and-frame"


# Shapes whose kernel may be either 2-D or 3-D; every other shape is 3-D only.
_DUAL_DIM_SHAPES = {Shape.COPLANAR_SQUARES, Shape.PARALLEL_LINES}


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Sampled surface or curve with unit normals and quadrature weights."""
    points: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    boundary_dist: np.ndarray
    dim: int
    manifold_dim: int = 2

    def __post_init__(self):
        for name in ("points", "normals", "weights", "boundary_dist"):
            array = np.array(getattr(self, name), dtype=float)
            array.setflags(write=False)
            object.__setattr__(self, name, array)

        if self.dim not in (2, 3):
            raise ParameterError(f"PointCloud dim must be 2 or 3, got {self.dim}")
        if self.manifold_dim not in (1, 2):
            raise ParameterError(f"manifold_dim must be 1 or 2, got {self.manifold_dim}")
        n = self.points.shape[0]
        if n == 0:
            raise ParameterError("PointCloud needs at least one point")
        if self.points.shape != (n, self.dim) or self.normals.shape != (n, self.dim):
            raise ParameterError(
                f"points and normals must have shape ({n}, {self.dim}), got "
                f"{self.points.shape} and {self.normals.shape}"
            )
        if self.weights.shape != (n,) or self.boundary_dist.shape != (n,):
            raise ParameterError("weights and boundary_dist need one entry per point")

        lengths = np.linalg.norm(self.normals, axis=1)
        if np.any(np.abs(lengths - 1.0) > NORMAL_TOL):
            raise ParameterError("every normal must have unit length")
        if np.any(self.weights <= 0):
            raise ParameterError("quadrature weights must be positive")
        if np.any(self.boundary_dist < 0):
            raise ParameterError("boundary distances must be non-negative")

    @property
    def size(self) -> int:
        """Number of sample points."""
        return self.points.shape[0]

    @property
    def measure(self) -> float:
        """Total area (surfaces) or length (curves) carried by the weights."""
        return math.fsum(self.weights)

    @property
    def centroid(self) -> np.ndarray:
        """Weighted centroid of the samples."""
        return self.weights @ self.points / self.weights.sum()

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "PointCloud":
        """Apply the rigid motion ``x -> R x + t``."""
        rotation = np.asarray(rotation, dtype=float)
        translation = np.asarray(translation, dtype=float)
        return PointCloud(
            points=self.points @ rotation.T + translation,
            normals=_unit_rows(self.normals @ rotation.T),
            weights=self.weights,
            boundary_dist=self.boundary_dist,
            dim=self.dim,
            manifold_dim=self.manifold_dim,
        )

    def scaled(self, factor: float) -> "PointCloud":
        """Scale positions, weights and boundary distances by ``factor``."""
        return PointCloud(
            points=self.points * factor,
            normals=self.normals,
            weights=self.weights * factor ** self.manifold_dim,
            boundary_dist=self.boundary_dist * factor,
            dim=self.dim,
            manifold_dim=self.manifold_dim,
        )


class GeometrySpec(BaseModel):
    """Parametric description of one catalog source/observer pair.

    Lengths are in meters. ``delta`` is the sampling density in points per
    wavelength per dimension; ``wavelength`` is optional here and may be
    supplied to :func:`build_scene` instead.
    """
    model_config = ConfigDict(frozen=True, populate_by_name=True, extra="forbid")

    shape: Shape
    a: float = Field(gt=0)
    d: float = Field(default=0.0, ge=0)
    h: float = 0.0
    phi: float = math.pi / 2
    delta: float = Field(default=4.0, ge=2)
    wavelength: Optional[float] = Field(default=None, alias="lambda", gt=0)
    dim: Optional[int] = None
    sampling: str = "rings"
    gap: Optional[float] = Field(default=None, gt=0)

    @model_validator(mode="after")
    def _check_dim_and_sampling(self) -> "GeometrySpec":
        if self.dim is not None:
            if self.dim not in (2, 3):
                raise ValueError(f"dim must be 2 or 3, got {self.dim}")
            if self.dim == 2 and self.shape not in _DUAL_DIM_SHAPES:
                raise ValueError(f"{self.shape.value} is only defined with the 3-D kernel")
        if self.sampling not in ("rings", "grid"):
            raise ValueError(f"sampling must be 'rings' or 'grid', got {self.sampling!r}")
        return self

    @property
    def kernel_dim(self) -> int:
        """Kernel dimensionality, defaulting per shape."""
        if self.dim is not None:
            return self.dim
        return 2 if self.shape == Shape.PARALLEL_LINES else 3

    @property
    def frame_gap(self) -> float:
        """Buffer between the slab plate and its frame."""
        return self.gap if self.gap is not None else self.a / 2

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GeometrySpec":
        """Validate a JSON-style mapping, raising ParameterError on failure."""
        try:
            return cls.model_validate(data)
        except ValidationError as e:
            raise ParameterError(f"Invalid geometry spec: {e}") from e

    @classmethod
    def from_json(cls, text: str) -> "GeometrySpec":
        """Parse the JSON object form."""
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParameterError(f"Geometry spec is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ParameterError("Geometry spec must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready mapping using the ``lambda`` key."""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)

    def to_json(self) -> str:
        """Serialize to the JSON object form."""
        return json.dumps(self.to_dict(), sort_keys=True)

    def with_updates(self, **changes: Any) -> "GeometrySpec":
        """Copy with validated changes."""
        data = self.model_dump(by_alias=False)
        data.update(changes)
        return GeometrySpec.model_validate(data)

    def case_id(self) -> str:
        """Filesystem-safe identifier built from the parameters."""
        parts = [self.shape.value, f"a{self.a:g}", f"d{self.d:g}"]
        if self.h:
            parts.append(f"h{self.h:g}")
        if self.shape == Shape.SLANTED_PLATES:
            parts.append(f"phi{self.phi:.4f}")
        parts.append(f"{self.kernel_dim}d")
        if self.shape == Shape.PARALLEL_DISCS and self.sampling != "rings":
            parts.append(self.sampling)
        return "_".join(parts).replace(".", "p").replace("-", "_")


Sampler = Callable[[int], Tuple[PointCloud, PointCloud]]


@dataclass(frozen=True, eq=False)
class ScenePair:
    """A source and an observer domain plus the wavelength of the interaction."""
    source: PointCloud
    observer: PointCloud
    wavelength: float
    dim: int
    spec: Optional[GeometrySpec] = None
    outlines: Optional[Tuple[np.ndarray, np.ndarray]] = None
    cross_section: Optional["ScenePair"] = None
    quadrature_sampler: Optional[Sampler] = field(default=None, repr=False)

    def __post_init__(self):
        if self.wavelength <= 0:
            raise ParameterError(f"wavelength must be positive, got {self.wavelength}")
        if not (self.source.dim == self.observer.dim == self.dim):
            raise ParameterError(
                f"source.dim={self.source.dim}, observer.dim={self.observer.dim} "
                f"and dim={self.dim} must agree"
            )
        if self.min_distance() <= 0:
            raise OverlapError("source and observer share a point")

    @property
    def wavenumber(self) -> float:
        """k = 2π/λ."""
        return 2 * math.pi / self.wavelength

    @property
    def shape(self) -> Tuple[int, int]:
        """Block shape (N_o, N_s)."""
        return self.observer.size, self.source.size

    def min_distance(self) -> float:
        """Smallest distance between a source and an observer point."""
        tree = cKDTree(self.observer.points)
        distances, _ = tree.query(self.source.points, k=1)
        return float(np.min(distances))

    def transformed(self, rotation: np.ndarray, translation: np.ndarray) -> "ScenePair":
        """Apply one rigid motion to both domains."""
        rotation = np.asarray(rotation, dtype=float)
        translation = np.asarray(translation, dtype=float)
        outlines = None
        if self.outlines is not None:
            outlines = tuple(o @ rotation.T + translation for o in self.outlines)
        sampler = None
        if self.quadrature_sampler is not None:
            inner = self.quadrature_sampler

            def sampler(n: int) -> Tuple[PointCloud, PointCloud]:
                src, obs = inner(n)
                return src.transformed(rotation, translation), obs.transformed(rotation, translation)

        return ScenePair(
            source=self.source.transformed(rotation, translation),
            observer=self.observer.transformed(rotation, translation),
            wavelength=self.wavelength,
            dim=self.dim,
            spec=self.spec,
            outlines=outlines,
            cross_section=self.cross_section,
            quadrature_sampler=sampler,
        )

    def swapped(self) -> "ScenePair":
        """Exchange the roles of source and observer."""
        sampler = None
        if self.quadrature_sampler is not None:
            inner = self.quadrature_sampler

            def sampler(n: int) -> Tuple[PointCloud, PointCloud]:
                src, obs = inner(n)
                return obs, src

        return ScenePair(
            source=self.observer,
            observer=self.source,
            wavelength=self.wavelength,
            dim=self.dim,
            spec=self.spec,
            outlines=None if self.outlines is None else (self.outlines[1], self.outlines[0]),
            cross_section=None if self.cross_section is None else self.cross_section.swapped(),
            quadrature_sampler=sampler,
        )

    def with_wavelength(self, wavelength: float) -> "ScenePair":
        """Same sample points at a different wavelength."""
        return ScenePair(
            source=self.source,
            observer=self.observer,
            wavelength=wavelength,
            dim=self.dim,
            spec=self.spec,
            outlines=self.outlines,
            cross_section=None if self.cross_section is None
            else self.cross_section.with_wavelength(wavelength),
            quadrature_sampler=self.quadrature_sampler,
        )


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def _cells(length: float, spacing: float) -> int:
    """Cell count so that the cell size does not exceed ``spacing``."""
    return max(1, math.ceil(length / spacing - 1e-9))


def _check_positive(**values: float) -> None:
    for name, value in values.items():
        if not (value > 0 and math.isfinite(value)):
            raise ParameterError(f"{name} must be positive and finite, got {value}")


def sample_disc(radius: float, spacing: float, method: str = "rings") -> PointCloud:
    """Sample a disc of the given radius in the z=0 plane.

    The default ring method places points on concentric midpoint rings whose
    weights are exact annulus-sector areas. The grid method keeps the centres
    of a uniform square grid that fall inside the disc and rescales the cell
    weights to the exact disc area.

    Args:
        radius: Disc radius in meters.
        spacing: Largest allowed distance between neighbouring samples.
        method: "rings" or "grid".

    Returns:
        3-D surface PointCloud with +z normals.
    """
    _check_positive(radius=radius, spacing=spacing)

    if method == "rings":
        n_rings = _cells(radius, spacing)
        dr = radius / n_rings
        xs, ys, ws, rhos = [], [], [], []
        for i in range(n_rings):
            rho = (i + 0.5) * dr
            n_phi = _cells(2 * math.pi * rho, spacing)
            phi = 2 * math.pi * (np.arange(n_phi) + 0.5) / n_phi
            xs.append(rho * np.cos(phi))
            ys.append(rho * np.sin(phi))
            ws.append(np.full(n_phi, 2 * math.pi * rho * dr / n_phi))
            rhos.append(np.full(n_phi, rho))
        x, y = np.concatenate(xs), np.concatenate(ys)
        weights = np.concatenate(ws)
        rho = np.concatenate(rhos)
    elif method == "grid":
        n = _cells(2 * radius, spacing)
        cell = 2 * radius / n
        centres = -radius + (np.arange(n) + 0.5) * cell
        gx, gy = np.meshgrid(centres, centres, indexing="ij")
        rho_all = np.hypot(gx, gy).ravel()
        inside = rho_all < radius
        x, y, rho = gx.ravel()[inside], gy.ravel()[inside], rho_all[inside]
        weights = np.full(x.size, math.pi * radius ** 2 / x.size)
    else:
        raise ParameterError(f"Unknown disc sampling method: {method}")

    points = np.column_stack([x, y, np.zeros_like(x)])
    normals = np.tile([0.0, 0.0, 1.0], (x.size, 1))
    return PointCloud(points, normals, weights, np.maximum(radius - rho, 0.0), dim=3)


def sample_rectangle(edge_a: float, edge_b: float, spacing: float) -> PointCloud:
    """Cell-centred uniform grid over an ``edge_a`` x ``edge_b`` rectangle in z=0.

    The rectangle is centred at the origin with ``edge_a`` along x.
    """
    _check_positive(edge_a=edge_a, edge_b=edge_b, spacing=spacing)
    na, nb = _cells(edge_a, spacing), _cells(edge_b, spacing)
    ca, cb = edge_a / na, edge_b / nb
    xs = -edge_a / 2 + (np.arange(na) + 0.5) * ca
    ys = -edge_b / 2 + (np.arange(nb) + 0.5) * cb
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    x, y = gx.ravel(), gy.ravel()
    points = np.column_stack([x, y, np.zeros_like(x)])
    normals = np.tile([0.0, 0.0, 1.0], (x.size, 1))
    weights = np.full(x.size, ca * cb)
    boundary = np.minimum(edge_a / 2 - np.abs(x), edge_b / 2 - np.abs(y))
    return PointCloud(points, normals, weights, np.maximum(boundary, 0.0), dim=3)


def sample_segment(length: float, spacing: float, dim: int = 2) -> PointCloud:
    """Cell-centred partition of a segment along x centred at the origin.

    Normals point along +y; in 3-D the segment lies in the z=0 plane.
    """
    _check_positive(length=length, spacing=spacing)
    if dim not in (2, 3):
        raise ParameterError(f"dim must be 2 or 3, got {dim}")
    n = _cells(length, spacing)
    cell = length / n
    x = -length / 2 + (np.arange(n) + 0.5) * cell
    points = np.zeros((n, dim))
    points[:, 0] = x
    normals = np.zeros((n, dim))
    normals[:, 1] = 1.0
    boundary = np.maximum(length / 2 - np.abs(x), 0.0)
    return PointCloud(points, normals, np.full(n, cell), boundary, dim=dim, manifold_dim=1)


def sample_frame(outer: float, inner: float, spacing: float) -> PointCloud:
    """Square frame in z=0 with the given outer and inner (hole) edges.

    The frame is split into four rectangular strips, each cell-centred, so the
    weights add up to ``outer**2 - inner**2`` exactly.
    """
    _check_positive(outer=outer, inner=inner, spacing=spacing)
    if inner >= outer:
        raise ParameterError(f"inner edge {inner} must be smaller than outer edge {outer}")
    band = (outer - inner) / 2
    strips = [
        (sample_rectangle(outer, band, spacing), (0.0, (inner + band) / 2)),
        (sample_rectangle(outer, band, spacing), (0.0, -(inner + band) / 2)),
        (sample_rectangle(band, inner, spacing), ((inner + band) / 2, 0.0)),
        (sample_rectangle(band, inner, spacing), (-(inner + band) / 2, 0.0)),
    ]
    points = np.concatenate([s.points + [dx, dy, 0.0] for s, (dx, dy) in strips])
    weights = np.concatenate([s.weights for s, _ in strips])
    x, y = points[:, 0], points[:, 1]
    to_outer = np.minimum(outer / 2 - np.abs(x), outer / 2 - np.abs(y))
    to_inner = np.hypot(np.maximum(np.abs(x) - inner / 2, 0.0), np.maximum(np.abs(y) - inner / 2, 0.0))
    normals = np.tile([0.0, 0.0, 1.0], (x.size, 1))
    boundary = np.maximum(np.minimum(to_outer, to_inner), 0.0)
    return PointCloud(points, normals, weights, boundary, dim=3)


def _shift(cloud: PointCloud, offset: Tuple[float, ...]) -> PointCloud:
    return cloud.transformed(np.eye(cloud.dim), np.asarray(offset, dtype=float))


def _regular_polygon(radius: float, sides: int) -> np.ndarray:
    """Regular polygon in z=0 with the same area as a disc of ``radius``."""
    circumradius = radius * math.sqrt(2 * math.pi / (sides * math.sin(2 * math.pi / sides)))
    angles = 2 * math.pi * np.arange(sides) / sides
    return np.column_stack([circumradius * np.cos(angles), circumradius * np.sin(angles), np.zeros(sides)])


def _square(edge: float) -> np.ndarray:
    half = edge / 2
    return np.array([[-half, -half, 0.0], [half, -half, 0.0], [half, half, 0.0], [-half, half, 0.0]])


def _observer_offset(spec: GeometrySpec) -> Tuple[float, float, float]:
    """Placement of the observer relative to the source for 3-D shapes."""
    if spec.shape in (Shape.PARALLEL_DISCS, Shape.PARALLEL_PLATES):
        return (spec.h, 0.0, spec.d)
    if spec.shape == Shape.SLANTED_PLATES:
        return (spec.a + spec.d * math.cos(spec.phi), 0.0, spec.d * math.sin(spec.phi))
    if spec.shape == Shape.COPLANAR_SQUARES:
        return (2 * spec.a, 2 * spec.a, 0.0)
    if spec.shape == Shape.PARALLEL_LINES:
        return (spec.h, spec.d, 0.0)
    return (0.0, 0.0, 0.0)


def separation(spec: GeometrySpec) -> float:
    """Smallest distance between the two continuous domains of a catalog shape."""
    a, d, h = spec.a, spec.d, abs(spec.h)
    if spec.shape == Shape.PARALLEL_DISCS:
        return math.hypot(d, max(0.0, h - 2 * a))
    if spec.shape in (Shape.PARALLEL_PLATES, Shape.PARALLEL_LINES):
        return math.hypot(d, max(0.0, h - a))
    if spec.shape == Shape.SLANTED_PLATES:
        dx = max(0.0, d * math.cos(spec.phi))
        return math.hypot(dx, d * math.sin(spec.phi))
    if spec.shape == Shape.COPLANAR_SQUARES:
        return math.sqrt(2) * a
    return math.hypot(spec.h, spec.frame_gap)


def _sample_domains(
    spec: GeometrySpec, spacing: float, disc_method: Optional[str] = None
) -> Tuple[PointCloud, PointCloud]:
    """Sample source and observer of a catalog shape at the given spacing."""
    offset = _observer_offset(spec)
    dim = spec.kernel_dim

    if spec.shape == Shape.PARALLEL_DISCS:
        disc = sample_disc(spec.a, spacing, method=disc_method or spec.sampling)
        return disc, _shift(disc, offset)

    if spec.shape in (Shape.PARALLEL_PLATES, Shape.SLANTED_PLATES):
        plate = sample_rectangle(spec.a, spec.a, spacing)
        return plate, _shift(plate, offset)

    if spec.shape == Shape.COPLANAR_SQUARES:
        square = sample_rectangle(spec.a, spec.a, spacing)
        if dim == 2:
            square = _flatten(square)
            return square, _shift(square, offset[:2])
        return square, _shift(square, offset)

    if spec.shape == Shape.PARALLEL_LINES:
        line = sample_segment(spec.a, spacing, dim=dim)
        return line, _shift(line, offset[:dim])

    plate = _shift(sample_rectangle(spec.a, spec.a, spacing), (0.0, 0.0, spec.h))
    frame = sample_frame(3 * spec.a, spec.a + 2 * spec.frame_gap, spacing)
    return plate, frame


def _flatten(cloud: PointCloud) -> PointCloud:
    """Drop z from an in-plane 3-D surface; normals become the in-plane +x+y diagonal."""
    normals = np.tile([math.sqrt(0.5), math.sqrt(0.5)], (cloud.size, 1))
    return PointCloud(cloud.points[:, :2], normals, cloud.weights, cloud.boundary_dist, dim=2)


def _outlines(spec: GeometrySpec, polygon_sides: int) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    if spec.kernel_dim != 3:
        return None
    offset = np.asarray(_observer_offset(spec))
    if spec.shape == Shape.PARALLEL_DISCS:
        polygon = _regular_polygon(spec.a, polygon_sides)
        return polygon, polygon + offset
    if spec.shape in (Shape.PARALLEL_PLATES, Shape.SLANTED_PLATES, Shape.COPLANAR_SQUARES):
        square = _square(spec.a)
        return square, square + offset
    return None


def _quadrature_spacing(spec: GeometrySpec, n: int) -> float:
    """λ-independent spacing for the line-of-sight integrals."""
    if spec.shape == Shape.PARALLEL_LINES:
        return spec.a / (4 * n)
    return spec.a / n


def _cross_section(spec: GeometrySpec, wavelength: float) -> Optional[ScenePair]:
    """2-D equivalent scene used by the mutual shadow length predictor."""
    common = {"delta": spec.delta, "wavelength": wavelength, "dim": 2}
    a, d, h = spec.a, spec.d, spec.h

    if spec.shape == Shape.PARALLEL_LINES:
        if spec.kernel_dim == 2:
            return None
        lines = spec.with_updates(**common)
    elif spec.shape == Shape.PARALLEL_DISCS:
        lines = GeometrySpec(shape=Shape.PARALLEL_LINES, a=2 * a, d=d, h=h, **common)
    elif spec.shape == Shape.PARALLEL_PLATES:
        lines = GeometrySpec(shape=Shape.PARALLEL_LINES, a=a, d=d, h=h, **common)
    elif spec.shape == Shape.SLANTED_PLATES:
        lines = GeometrySpec(
            shape=Shape.PARALLEL_LINES,
            a=a,
            d=d * math.sin(spec.phi),
            h=a + d * math.cos(spec.phi),
            **common,
        )
    elif spec.shape == Shape.COPLANAR_SQUARES:
        # front-corner diagonals perpendicular to the diagonal shift
        lines = GeometrySpec(
            shape=Shape.PARALLEL_LINES, a=math.sqrt(2) * a, d=2 * math.sqrt(2) * a, h=0.0, **common
        )
    else:
        return _slab_cross_section(spec, wavelength)

    if separation(lines) <= MIN_SEPARATION_FRACTION * wavelength:
        logger.warning(f"No usable cross-section for {spec.shape.value}: segments touch")
        return None
    return build_scene(lines)


def _slab_cross_section(spec: GeometrySpec, wavelength: float) -> ScenePair:
    """x-z cut of the plate-and-frame slab: centre segment over two frame segments."""
    a, gap = spec.a, spec.frame_gap
    band = a - gap

    def sample(spacing: float) -> Tuple[PointCloud, PointCloud]:
        plate = _shift(sample_segment(a, spacing), (0.0, spec.h))
        strip = sample_segment(band, spacing)
        centre = a / 2 + gap + band / 2
        left, right = _shift(strip, (-centre, 0.0)), _shift(strip, (centre, 0.0))
        frame = PointCloud(
            points=np.concatenate([left.points, right.points]),
            normals=np.concatenate([left.normals, right.normals]),
            weights=np.concatenate([left.weights, right.weights]),
            boundary_dist=np.concatenate([left.boundary_dist, right.boundary_dist]),
            dim=2,
            manifold_dim=1,
        )
        return plate, frame

    source, observer = sample(wavelength / spec.delta)
    return ScenePair(
        source=source,
        observer=observer,
        wavelength=wavelength,
        dim=2,
        quadrature_sampler=lambda n: sample(a / (4 * n)),
    )


def build_scene(
    spec: GeometrySpec,
    wavelength: Optional[float] = None,
    polygon_sides: int = 64,
    with_cross_section: bool = True,
) -> ScenePair:
    """Build the sampled source/observer pair of a catalog geometry.

    Args:
        spec: Catalog geometry.
        wavelength: Wavelength in meters; falls back to ``spec.wavelength``.
        polygon_sides: Sides of the equal-area polygon standing in for discs
            in the plane-wave sweep.
        with_cross_section: Attach the 2-D equivalent scene used by the
            length predictor.

    Returns:
        ScenePair sampled at spacing λ/δ.

    Raises:
        ParameterError: If no wavelength is available or the spec is invalid.
        OverlapError: If the domains intersect or are closer than λ/100.
    """
    wavelength = wavelength if wavelength is not None else spec.wavelength
    if wavelength is None or not wavelength > 0:
        raise ParameterError("A positive wavelength is required to build a scene")

    gap = separation(spec)
    if gap <= MIN_SEPARATION_FRACTION * wavelength:
        raise OverlapError(
            f"{spec.shape.value} domains are {gap:.3g} m apart; at least "
            f"{MIN_SEPARATION_FRACTION * wavelength:.3g} m (λ/100) is required"
        )

    spacing = wavelength / spec.delta
    source, observer = _sample_domains(spec, spacing)

    def sampler(n: int) -> Tuple[PointCloud, PointCloud]:
        return _sample_domains(spec, _quadrature_spacing(spec, n), disc_method="rings")

    cross_section = _cross_section(spec, wavelength) if with_cross_section else None
    scene = ScenePair(
        source=source,
        observer=observer,
        wavelength=wavelength,
        dim=spec.kernel_dim,
        spec=spec,
        outlines=_outlines(spec, polygon_sides),
        cross_section=cross_section,
        quadrature_sampler=sampler,
    )
    logger.debug(
        f"Built {spec.shape.value} scene: {source.size} source and {observer.size} observer points "
        f"at spacing {spacing:.4g} m"
    )
    return scene

