"""Tests for localization maps, DFT bands and scaling studies."""

import logging
import math
from types import SimpleNamespace

import numpy as np
import pytest

from shadowrank.analysis import (
    EDGE_RATIO_CAP,
    Group,
    SpectralBand,
    band_energy_fraction,
    default_edge_band,
    edge_concentration,
    fit_loglog_slope,
    group_columns,
    localization_map,
    mode_dft,
    predict_band,
    scaling_study,
)
from shadowrank.errors import (
    EmptyBandError,
    GeometryError,
    MissingVectorsError,
    NonUniformSamplingError,
    ParameterError,
)
from shadowrank.geometry import GeometrySpec, build_scene
from shadowrank.kernel import assemble_dense
from shadowrank.shadow import shadow_lines_closed_form
from shadowrank.spectrum import SpectrumMethod, SpectrumResult, svd_dense


def spectrum_with_vectors(u_cols, sigmas=None, tol_floor=1e-15) -> SpectrumResult:
    n = u_cols.shape[1]
    sigmas = np.linspace(1.0, 0.5, n) if sigmas is None else sigmas
    return SpectrumResult(
        sigmas=sigmas, U_cols=u_cols, V_cols=None, method=SpectrumMethod.DENSE, seed=None, tol_floor=tol_floor
    )


def plane_waves(x: np.ndarray, wavenumbers) -> np.ndarray:
    """Unit-norm columns exp(-jκx) on uniformly spaced samples."""
    return np.exp(-1j * np.outer(x, wavenumbers)) / math.sqrt(x.size)


class TestGroupColumns:
    """Test cases for splitting singular vectors into groups."""

    def setup_method(self):
        """Set up test fixtures."""
        self.spectrum = spectrum_with_vectors(np.eye(4), np.array([1.0, 0.5, 1e-3, 1e-4]), tol_floor=1e-10)

    def test_aperture_and_remainder(self):
        """Test the rounded prediction splits the columns."""
        assert group_columns(self.spectrum, Group.APERTURE, 1.6, 1e-5) == (0, 2)
        assert group_columns(self.spectrum, Group.REMAINDER, 1.6, 1e-5) == (2, 4)
        assert group_columns(self.spectrum, "remainder", 1.6, 1e-5, remainder_size=1) == (2, 3)

    def test_empty_groups(self):
        """Test empty groups are rejected."""
        with pytest.raises(ParameterError):
            group_columns(self.spectrum, Group.REMAINDER, 4.0, 1e-5)
        with pytest.raises(ParameterError):
            group_columns(self.spectrum, Group.APERTURE, 0.2, 1e-5)
        with pytest.raises(ParameterError):
            group_columns(self.spectrum, Group.APERTURE, -1.0, 1e-5)


class TestLocalizationMap:
    """Test cases for localization maps and edge concentration."""

    def setup_method(self):
        """Set up test fixtures."""
        self.scene = build_scene(GeometrySpec(shape="parallel-lines", a=1.0, d=1.0, wavelength=0.25))
        self.spectrum = svd_dense(assemble_dense(self.scene))
        self.knee_pred = shadow_lines_closed_form(1.0, 1.0, 0.0, 0.25).dof

    def test_mean_squares_sum_to_one(self):
        """Test unit singular vectors give per-point mean squares summing to one."""
        for group in (Group.APERTURE, Group.REMAINDER):
            lmap = localization_map(self.spectrum, self.scene, group, self.knee_pred, 1e-6)
            assert math.fsum(lmap.mean_squares) == pytest.approx(1.0)
            assert lmap.values.max() == pytest.approx(0.0)
            assert lmap.values.min() >= -1.0
            assert lmap.points.shape == (16, 2)
        assert lmap.columns[0] == round(self.knee_pred)

    def test_smoothing(self):
        """Test neighbourhood averaging keeps one value per point."""
        lmap = localization_map(self.spectrum, self.scene, Group.APERTURE, self.knee_pred, 1e-6, smoothing=True)
        assert lmap.values.shape == (16,)
        assert np.all(np.isfinite(lmap.values))

    def test_missing_vectors(self):
        """Test spectra without U columns are rejected."""
        bare = SpectrumResult(
            sigmas=self.spectrum.sigmas,
            U_cols=None,
            V_cols=None,
            method=SpectrumMethod.RANDOMIZED,
            seed=1,
            tol_floor=1e-12,
        )
        with pytest.raises(MissingVectorsError):
            localization_map(bare, self.scene, Group.APERTURE, self.knee_pred, 1e-6)

    def test_edge_concentration_of_edge_vectors(self):
        """Test vectors living on the end points hit the ratio cap."""
        order = [0, 15] + list(range(1, 15))
        spectrum = spectrum_with_vectors(np.eye(16)[:, order])
        lmap = localization_map(spectrum, self.scene, Group.APERTURE, 2.0, 1e-6)
        assert edge_concentration(lmap, self.scene) == EDGE_RATIO_CAP

    def test_edge_concentration_of_flat_vectors(self):
        """Test vectors of uniform magnitude give a ratio of one."""
        spectrum = spectrum_with_vectors(np.fft.fft(np.eye(16)) / 4)
        lmap = localization_map(spectrum, self.scene, Group.APERTURE, 3.0, 1e-6)
        assert edge_concentration(lmap, self.scene) == pytest.approx(1.0)

    def test_empty_edge_band(self):
        """Test bands holding every point or none."""
        lmap = localization_map(self.spectrum, self.scene, Group.APERTURE, self.knee_pred, 1e-6)
        with pytest.raises(EmptyBandError):
            edge_concentration(lmap, self.scene, band_width=10.0)
        with pytest.raises(EmptyBandError):
            edge_concentration(lmap, self.scene, band_width=0.001)
        with pytest.raises(ParameterError):
            edge_concentration(lmap, self.scene, band_width=0.0)

    def test_default_edge_band(self):
        """Test λ for curves and max(λ, 0.05a) for surfaces."""
        assert default_edge_band(self.scene) == 0.25
        plates = build_scene(GeometrySpec(shape="parallel-plates", a=20.0, d=20.0, wavelength=0.5, delta=2))
        assert default_edge_band(plates) == pytest.approx(1.0)


class TestModeDft:
    """Test cases for DFT analysis of line modes."""

    def setup_method(self):
        """Set up test fixtures."""
        self.scene = build_scene(GeometrySpec(shape="parallel-lines", a=1.0, d=1.0, wavelength=0.25))
        x = self.scene.observer.points[:, 0]
        self.wavenumbers = [2 * math.pi * p for p in [3] + [p for p in range(-8, 8) if p != 3]]
        self.spectrum = spectrum_with_vectors(plane_waves(x, self.wavenumbers))

    def test_plane_wave_peak(self):
        """Test exp(-jκx) peaks at k_x = -κ."""
        modes = mode_dft(self.spectrum, self.scene, 1.0, 1e-6)
        peak = int(np.argmax(np.abs(modes.coefficients[:, 0])))
        assert modes.k_x[peak] == pytest.approx(-6 * math.pi)
        assert modes.resolution == pytest.approx(2 * math.pi)
        assert np.all(np.diff(modes.k_x) > 0)
        assert np.abs(modes.coefficients[peak, 0]) == pytest.approx(1.0)

    def test_group_energy(self):
        """Test per-group energy is averaged over the group's columns."""
        modes = mode_dft(self.spectrum, self.scene, 1.0, 1e-6)
        assert math.fsum(modes.group_energy[Group.APERTURE]) == pytest.approx(1.0)
        assert math.fsum(modes.group_energy[Group.REMAINDER]) == pytest.approx(1.0)

    def test_band_energy_fraction(self):
        """Test the aperture energy sits inside a band around its peak."""
        modes = mode_dft(self.spectrum, self.scene, 1.0, 1e-6)
        fractions = band_energy_fraction(modes, SpectralBand(-20.0, -15.0))
        assert fractions[Group.APERTURE] == pytest.approx(1.0)
        assert fractions[Group.REMAINDER] < 0.5

    def test_transform_preserves_norms(self):
        """Test each DFT column carries the energy of its singular vector."""
        scene = build_scene(GeometrySpec(shape="parallel-lines", a=4.0, d=4.0, wavelength=1.0))
        spectrum = svd_dense(assemble_dense(scene))
        modes = mode_dft(spectrum, scene, shadow_lines_closed_form(4.0, 4.0, 0.0).dof, 1e-6)
        columns = modes.coefficients.shape[1]
        assert columns > 0
        expected = np.linalg.norm(spectrum.U_cols[:, :columns], axis=0)
        assert np.allclose(np.linalg.norm(modes.coefficients, axis=0), expected, rtol=0, atol=1e-12)

    def test_non_uniform_sampling(self):
        """Test surfaces are not accepted as lines."""
        discs = build_scene(GeometrySpec(shape="parallel-discs", a=0.5, d=0.5, wavelength=0.5))
        spectrum = spectrum_with_vectors(np.eye(discs.observer.size))
        with pytest.raises(NonUniformSamplingError):
            mode_dft(spectrum, discs, 1.0, 1e-6)


class TestPredictBand:
    """Test cases for the geometric scanning band."""

    def test_aligned_lines(self):
        """Test aligned segments at d = a span ±k/√2."""
        scene = build_scene(GeometrySpec(shape="parallel-lines", a=1.0, d=1.0, wavelength=1.0))
        band = predict_band(scene)
        k = 2 * math.pi
        assert band.k_lo == pytest.approx(-k / math.sqrt(2))
        assert band.k_hi == pytest.approx(k / math.sqrt(2))
        assert band.width == pytest.approx(2 * k / math.sqrt(2))

    def test_shifted_lines(self):
        """Test a lateral shift moves the band to one side."""
        scene = build_scene(GeometrySpec(shape="parallel-lines", a=1.0, d=1.0, h=2.0, wavelength=1.0))
        band = predict_band(scene)
        assert band.k_hi < 0
        assert band.contains(np.array([band.k_lo, band.k_hi])).all()

    def test_surfaces_rejected(self):
        """Test band prediction needs segments."""
        scene = build_scene(GeometrySpec(shape="parallel-plates", a=1.0, d=1.0, wavelength=0.5))
        with pytest.raises(GeometryError):
            predict_band(scene)


class TestScaling:
    """Test cases for log-log slopes and scaling studies."""

    def test_fit_loglog_slope(self):
        """Test a pure power law."""
        x = np.array([1.0, 2.0, 4.0, 8.0])
        assert fit_loglog_slope(x, 3 * x ** 1.5) == pytest.approx(1.5)

    def test_fit_errors(self):
        """Test invalid inputs to the fit."""
        with pytest.raises(ParameterError):
            fit_loglog_slope([1.0], [1.0])
        with pytest.raises(ParameterError):
            fit_loglog_slope([1.0, 2.0], [0.0, 1.0])
        with pytest.raises(ParameterError):
            fit_loglog_slope([2.0, 2.0], [1.0, 3.0])

    @staticmethod
    def fake_case(spec: GeometrySpec) -> SimpleNamespace:
        """Case whose rank is three times its size and whose predicted knee equals its size."""
        size = int(spec.a)
        sigmas = np.concatenate([np.ones(3 * size), [1e-9]])
        return SimpleNamespace(
            ka=2 * math.pi * spec.a,
            knee_pred=float(size),
            knee_detected=size,
            spectrum=SpectrumResult(
                sigmas=sigmas, U_cols=None, V_cols=None, method=SpectrumMethod.DENSE, seed=None, tol_floor=1e-15
            ),
        )

    def test_linear_width_growth(self):
        """Test a remainder width proportional to ka gives slope one."""
        family = [GeometrySpec(shape="parallel-lines", a=a, d=a, wavelength=1.0) for a in (4.0, 8.0, 16.0)]
        study = scaling_study(family, 1e-6, case_runner=self.fake_case)
        assert study.slope == pytest.approx(1.0)
        assert [row.remainder_width for row in study.rows] == [8, 16, 32]
        assert study.table()[0]["rank"] == 12

    def test_two_sizes_warn(self, caplog):
        """Test two sizes still fit a slope with a warning."""
        family = [GeometrySpec(shape="parallel-lines", a=a, d=a, wavelength=1.0) for a in (4.0, 8.0)]
        with caplog.at_level(logging.WARNING):
            study = scaling_study(family, 1e-6, case_runner=self.fake_case)
        assert study.slope == pytest.approx(1.0)
        assert "only two sizes" in caplog.text

    def test_single_size_rejected(self):
        """Test a one-size family cannot be fitted."""
        family = [GeometrySpec(shape="parallel-lines", a=4.0, d=4.0, wavelength=1.0)]
        with pytest.raises(ParameterError):
            scaling_study(family, 1e-6, case_runner=self.fake_case)
