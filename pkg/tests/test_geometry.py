"""Tests for domain sampling and the geometry catalog."""

import json
import math

import numpy as np
import pytest
from pydantic import ValidationError

from shadowrank.errors import OverlapError, ParameterError
from shadowrank.geometry import (
    GeometrySpec,
    PointCloud,
    ScenePair,
    Shape,
    build_scene,
    sample_disc,
    sample_frame,
    sample_rectangle,
    sample_segment,
    separation,
)
from tests.helpers import rotation_matrix


class TestSamplers:
    """Test cases for the point samplers."""

    def test_disc_rings_midpoint_radii(self):
        """Test ring radii and total weight of a coarse disc."""
        cloud = sample_disc(1.0, 0.5)
        radii = np.unique(np.round(np.hypot(cloud.points[:, 0], cloud.points[:, 1]), 12))
        assert radii.tolist() == [0.25, 0.75]
        assert cloud.measure == pytest.approx(math.pi, rel=1e-6)

    def test_disc_single_ring(self):
        """Test that a spacing larger than the radius gives one ring."""
        cloud = sample_disc(1.0, 2.5)
        radii = np.hypot(cloud.points[:, 0], cloud.points[:, 1])
        assert np.allclose(radii, 0.5)
        assert cloud.measure == pytest.approx(math.pi, rel=1e-6)

    def test_disc_weight_sum(self):
        """Test the weight sum of a finely sampled disc."""
        cloud = sample_disc(2.0, 0.1)
        assert cloud.measure == pytest.approx(4 * math.pi, rel=1e-6)
        assert np.all(cloud.weights > 0)
        assert np.all(cloud.boundary_dist >= 0)
        assert np.allclose(np.linalg.norm(cloud.normals, axis=1), 1.0, atol=1e-12)

    def test_disc_grid_method(self):
        """Test uniform grid sampling keeps only interior cells and exact area."""
        cloud = sample_disc(1.0, 0.1, method="grid")
        assert np.all(np.hypot(cloud.points[:, 0], cloud.points[:, 1]) < 1.0)
        assert cloud.measure == pytest.approx(math.pi, rel=1e-12)
        assert np.allclose(cloud.weights, cloud.weights[0])

    def test_disc_invalid_inputs(self):
        """Test parameter errors on non-positive inputs and unknown methods."""
        with pytest.raises(ParameterError):
            sample_disc(0.0, 0.1)
        with pytest.raises(ParameterError):
            sample_disc(1.0, -0.1)
        with pytest.raises(ParameterError):
            sample_disc(1.0, 0.1, method="spiral")

    def test_rectangle_examples(self):
        """Test cell counts and weights of small rectangles."""
        square = sample_rectangle(1.0, 1.0, 0.5)
        assert square.size == 4
        assert np.allclose(square.weights, 0.25)

        strip = sample_rectangle(1.0, 2.0, 0.5)
        assert strip.size == 8
        assert strip.measure == pytest.approx(2.0)

        fine = sample_rectangle(1.0, 1.0, 0.3)
        assert fine.size == 16
        assert abs(fine.measure - 1.0) <= 1e-12

    def test_rectangle_boundary_distance(self):
        """Test boundary distances of cell centres."""
        cloud = sample_rectangle(1.0, 1.0, 0.5)
        assert np.allclose(cloud.boundary_dist, 0.25)

    def test_segment(self):
        """Test segment sampling in two and three dimensions."""
        line = sample_segment(1.0, 0.0625)
        assert line.size == 16
        assert line.manifold_dim == 1
        assert line.measure == pytest.approx(1.0)
        assert np.allclose(line.normals, [0.0, 1.0])
        assert line.boundary_dist.min() == pytest.approx(0.03125)

        line_3d = sample_segment(1.0, 0.25, dim=3)
        assert line_3d.points.shape == (4, 3)
        assert np.allclose(line_3d.points[:, 2], 0.0)

    def test_frame(self):
        """Test the four-strip frame covers exactly the frame area."""
        frame = sample_frame(3.0, 2.0, 0.25)
        assert frame.size == 80
        assert frame.measure == pytest.approx(5.0, rel=1e-12)
        inside_hole = (np.abs(frame.points[:, 0]) < 1.0) & (np.abs(frame.points[:, 1]) < 1.0)
        assert not np.any(inside_hole)

    def test_frame_rejects_inverted_edges(self):
        """Test that the hole must be smaller than the frame."""
        with pytest.raises(ParameterError):
            sample_frame(2.0, 3.0, 0.25)


class TestPointCloud:
    """Test cases for PointCloud validation and motions."""

    def test_rejects_non_unit_normals(self):
        """Test that normals must have unit length."""
        with pytest.raises(ParameterError):
            PointCloud(
                points=[[0.0, 0.0]],
                normals=[[0.0, 2.0]],
                weights=[1.0],
                boundary_dist=[0.0],
                dim=2,
            )

    def test_rejects_non_positive_weights(self):
        """Test that weights must be positive."""
        with pytest.raises(ParameterError):
            PointCloud(points=[[0.0, 0.0]], normals=[[0.0, 1.0]], weights=[0.0], boundary_dist=[0.0], dim=2)

    def test_arrays_are_read_only(self):
        """Test that the stored arrays cannot be modified."""
        cloud = sample_segment(1.0, 0.25)
        with pytest.raises(ValueError):
            cloud.points[0, 0] = 5.0

    def test_transformed_keeps_measure(self):
        """Test that a rigid motion keeps weights and unit normals."""
        cloud = sample_rectangle(1.0, 1.0, 0.25)
        moved = cloud.transformed(rotation_matrix([1.0, 1.0, 0.0], 0.7), np.array([1.0, -2.0, 3.0]))
        assert moved.measure == pytest.approx(cloud.measure)
        assert np.allclose(np.linalg.norm(moved.normals, axis=1), 1.0, atol=1e-12)

    def test_scaled(self):
        """Test scaling of a surface."""
        cloud = sample_rectangle(1.0, 1.0, 0.25).scaled(2.0)
        assert cloud.measure == pytest.approx(4.0)
        assert cloud.boundary_dist.min() == pytest.approx(0.25)


class TestGeometrySpec:
    """Test cases for GeometrySpec validation and serialization."""

    def test_from_dict_rejects_invalid_values(self):
        """Test parameter errors for invalid geometry values."""
        for data in (
            {"shape": "parallel-discs", "a": 0.0, "d": 1.0},
            {"shape": "parallel-discs", "a": 1.0, "d": -1.0},
            {"shape": "parallel-discs", "a": 1.0, "d": 1.0, "delta": 1.5},
            {"shape": "triangle", "a": 1.0},
            {"shape": "parallel-discs", "a": 1.0, "colour": "red"},
            {"shape": "parallel-discs", "a": 1.0, "dim": 2},
        ):
            with pytest.raises(ParameterError):
                GeometrySpec.from_dict(data)

    def test_model_validation_error(self):
        """Test that the model itself raises pydantic validation errors."""
        with pytest.raises(ValidationError):
            GeometrySpec(shape="parallel-plates", a=1.0, sampling="hex")

    def test_lambda_alias(self):
        """Test the JSON form uses the lambda key."""
        spec = GeometrySpec.from_json('{"shape": "parallel-lines", "a": 1, "d": 1, "lambda": 0.25}')
        assert spec.wavelength == 0.25
        assert json.loads(spec.to_json())["lambda"] == 0.25
        assert GeometrySpec.from_dict(spec.to_dict()) == spec

    def test_from_json_rejects_non_objects(self):
        """Test parse errors for invalid JSON text."""
        with pytest.raises(ParameterError):
            GeometrySpec.from_json("[1, 2]")
        with pytest.raises(ParameterError):
            GeometrySpec.from_json("{shape")

    def test_kernel_dim_defaults(self):
        """Test default kernel dimensionality per shape."""
        assert GeometrySpec(shape="parallel-lines", a=1.0).kernel_dim == 2
        assert GeometrySpec(shape="parallel-discs", a=1.0).kernel_dim == 3
        assert GeometrySpec(shape="coplanar-squares", a=1.0, dim=2).kernel_dim == 2

    def test_case_id(self):
        """Test filesystem-safe case identifiers."""
        spec = GeometrySpec(shape="parallel-discs", a=2.5, d=2.5)
        assert spec.case_id() == "parallel_discs_a2p5_d2p5_3d"
        grid = spec.with_updates(sampling="grid")
        assert grid.case_id().endswith("_grid")
        assert grid.case_id() != spec.case_id()

    def test_frame_gap_default(self):
        """Test the plate-and-frame buffer defaults to half the plate edge."""
        assert GeometrySpec(shape="plate-and-frame", a=4.0, h=1.0).frame_gap == 2.0
        assert GeometrySpec(shape="plate-and-frame", a=4.0, h=1.0, gap=1.0).frame_gap == 1.0

    def test_catalog_size(self):
        """Test that all six shapes are listed."""
        assert len(Shape) == 6


class TestBuildScene:
    """Test cases for build_scene."""

    def test_parallel_discs_point_count(self):
        """Test point counts of two unit discs at λ/δ = 0.1 spacing."""
        spec = GeometrySpec(shape="parallel-discs", a=1.0, d=1.0, wavelength=0.4, delta=4)
        scene = build_scene(spec)
        expected = math.pi / 0.1 ** 2
        assert abs(scene.source.size - expected) <= 0.1 * expected
        assert scene.observer.size == scene.source.size
        assert np.allclose(scene.observer.points[:, 2], 1.0)
        assert scene.dim == 3

    def test_parallel_lines(self):
        """Test two unit segments at λ = 0.25 and δ = 4."""
        spec = GeometrySpec(shape="parallel-lines", a=1.0, d=1.0, h=0.0, wavelength=0.25, delta=4)
        scene = build_scene(spec)
        assert scene.shape == (16, 16)
        assert scene.source.measure == pytest.approx(1.0)
        assert scene.observer.measure == pytest.approx(1.0)
        assert np.allclose(scene.observer.points[:, 1], 1.0)
        assert scene.cross_section is None

    def test_touching_domains_rejected(self):
        """Test overlap errors for touching or nearly touching domains."""
        with pytest.raises(OverlapError):
            build_scene(GeometrySpec(shape="parallel-discs", a=1.0, d=0.0, wavelength=0.4))
        with pytest.raises(OverlapError):
            build_scene(GeometrySpec(shape="parallel-discs", a=1.0, d=0.003, wavelength=0.4))

    def test_wavelength_required(self):
        """Test that a wavelength must come from the spec or the call."""
        spec = GeometrySpec(shape="parallel-plates", a=1.0, d=1.0)
        with pytest.raises(ParameterError):
            build_scene(spec)
        assert build_scene(spec, wavelength=0.5).wavelength == 0.5

    def test_spacing_bound(self):
        """Test that neighbouring samples are at most λ/δ apart."""
        spec = GeometrySpec(shape="parallel-plates", a=1.0, d=1.0, wavelength=0.3, delta=4)
        scene = build_scene(spec)
        x = np.unique(np.round(scene.source.points[:, 0], 12))
        assert np.max(np.diff(x)) <= 0.3 / 4 + 1e-12

    def test_slanted_placement(self):
        """Test the observer centre of slanted plates."""
        phi = math.pi / 4
        spec = GeometrySpec(shape="slanted-plates", a=2.0, d=2.0, phi=phi, wavelength=0.5)
        scene = build_scene(spec)
        expected = [2.0 + 2.0 * math.cos(phi), 0.0, 2.0 * math.sin(phi)]
        assert np.allclose(scene.observer.centroid, expected)
        assert separation(spec) == pytest.approx(2.0)

    def test_coplanar_squares_in_two_dimensions(self):
        """Test the 2-D coplanar squares live in the plane."""
        spec = GeometrySpec(shape="coplanar-squares", a=1.0, wavelength=0.25, dim=2)
        scene = build_scene(spec)
        assert scene.dim == 2
        assert scene.source.points.shape[1] == 2
        assert np.allclose(scene.observer.centroid, [2.0, 2.0])

    def test_coplanar_cross_section(self):
        """Test the front-corner segments standing in for coplanar squares."""
        spec = GeometrySpec(shape="coplanar-squares", a=1.0, wavelength=0.25)
        cross = build_scene(spec).cross_section
        assert cross is not None
        assert cross.spec.shape == Shape.PARALLEL_LINES
        assert cross.spec.a == pytest.approx(math.sqrt(2))
        assert cross.spec.d == pytest.approx(2 * math.sqrt(2))

    def test_disc_cross_section(self):
        """Test discs are cut along their diameter."""
        spec = GeometrySpec(shape="parallel-discs", a=1.0, d=0.5, wavelength=0.5)
        cross = build_scene(spec).cross_section
        assert cross.dim == 2
        assert cross.spec.a == pytest.approx(2.0)
        assert cross.spec.d == pytest.approx(0.5)

    def test_plate_and_frame(self):
        """Test the slab plate sits at height h inside the frame hole."""
        spec = GeometrySpec(shape="plate-and-frame", a=2.0, h=0.5, wavelength=0.5)
        scene = build_scene(spec)
        assert np.allclose(scene.source.points[:, 2], 0.5)
        assert scene.source.measure == pytest.approx(4.0)
        assert scene.observer.measure == pytest.approx(9 * 4.0 - 4 * 4.0)
        assert scene.outlines is None
        assert scene.cross_section is not None
        assert scene.cross_section.dim == 2

    def test_outlines_for_convex_domains(self):
        """Test that disc and plate scenes carry sweep outlines."""
        discs = build_scene(GeometrySpec(shape="parallel-discs", a=1.0, d=1.0, wavelength=0.5), polygon_sides=32)
        assert discs.outlines[0].shape == (32, 3)
        plates = build_scene(GeometrySpec(shape="parallel-plates", a=1.0, d=1.0, wavelength=0.5))
        assert plates.outlines[1].shape == (4, 3)


class TestScenePair:
    """Test cases for ScenePair construction and motions."""

    def setup_method(self):
        """Set up test fixtures."""
        self.spec = GeometrySpec(shape="parallel-plates", a=1.0, d=1.0, h=0.5, wavelength=0.5)
        self.scene = build_scene(self.spec)

    def test_dimension_mismatch(self):
        """Test that source, observer and scene dims must agree."""
        line = sample_segment(1.0, 0.25)
        plate = sample_rectangle(1.0, 1.0, 0.25)
        with pytest.raises(ParameterError):
            ScenePair(source=line, observer=plate, wavelength=1.0, dim=2)

    def test_shared_point_rejected(self):
        """Test that coincident samples are an overlap."""
        line = sample_segment(1.0, 0.25)
        with pytest.raises(OverlapError):
            ScenePair(source=line, observer=line, wavelength=1.0, dim=2)

    def test_rigid_motion_keeps_distances(self):
        """Test that a rigid motion keeps the minimum distance."""
        moved = self.scene.transformed(rotation_matrix([0.3, -1.0, 2.0], 1.1), np.array([5.0, 0.0, -1.0]))
        assert moved.min_distance() == pytest.approx(self.scene.min_distance(), rel=1e-12)
        assert moved.shape == self.scene.shape

    def test_swapped(self):
        """Test exchanging source and observer."""
        swapped = self.scene.swapped()
        assert swapped.source is self.scene.observer
        assert swapped.observer is self.scene.source
        assert np.allclose(swapped.outlines[0], self.scene.outlines[1])

    def test_with_wavelength(self):
        """Test changing the wavelength keeps the samples."""
        other = self.scene.with_wavelength(0.25)
        assert other.wavenumber == pytest.approx(2 * math.pi / 0.25)
        assert other.source is self.scene.source
