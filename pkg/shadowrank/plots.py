"""SVG rendering of singular-value curves, localization maps and mode spectra."""

import logging
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from jinja2 import Environment, FileSystemLoader

from .analysis import Group, LocalizationMap, ModeSpectrum, SpectralBand

logger = logging.getLogger(__name__)

TEMPLATES_DIR = Path(__file__).parent / "templates"

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"]

# Sequential colour stops from low (-1) to high (0).
_HEAT_STOPS = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)]


def heat_color(value: float) -> str:
    """Colour for a normalized log value in [-1, 0]."""
    t = min(1.0, max(0.0, value + 1.0)) * (len(_HEAT_STOPS) - 1)
    i = min(int(t), len(_HEAT_STOPS) - 2)
    f = t - i
    rgb = [round(a + (b - a) * f) for a, b in zip(_HEAT_STOPS[i], _HEAT_STOPS[i + 1])]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def _nice_ticks(lo: float, hi: float, count: int = 6) -> List[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    magnitude = 10 ** math.floor(math.log10(raw))
    step = min((m * magnitude for m in (1, 2, 5, 10) if m * magnitude >= raw), default=raw)
    first = math.ceil(lo / step) * step
    return [first + i * step for i in range(int((hi - first) / step + 1e-9) + 1)]


class SvgPlotter:
    """Renders plots through the package's jinja2 SVG templates."""

    def __init__(self, templates_dir: Optional[Union[str, Path]] = None, width: int = 640, height: int = 420):
        """Initialize the plotter.

        Args:
            templates_dir: Directory holding the ``*.svg.jinja2`` templates.
            width: Image width in pixels.
            height: Image height in pixels.
        """
        self.templates_dir = Path(templates_dir) if templates_dir else TEMPLATES_DIR
        if not self.templates_dir.exists():
            raise FileNotFoundError(f"SVG templates not found: {self.templates_dir}")
        self.env = Environment(
            loader=FileSystemLoader(str(self.templates_dir)),
            autoescape=True,
            trim_blocks=True,
            lstrip_blocks=True,
        )
        self.width = width
        self.height = height
        self.frame = {"left": 70, "right": width - 20, "top": 35, "bottom": height - 50}

    def _scale(self, lo: float, hi: float, axis: str):
        f = self.frame
        span = hi - lo if hi > lo else 1.0
        if axis == "x":
            return lambda v: f["left"] + (v - lo) / span * (f["right"] - f["left"])
        return lambda v: f["bottom"] - (v - lo) / span * (f["bottom"] - f["top"])

    def line_plot(
        self,
        series: Sequence[Tuple[str, np.ndarray, np.ndarray]],
        title: str,
        x_label: str,
        y_label: str,
        markers: Sequence[float] = (),
        bands: Sequence[Tuple[float, float]] = (),
        y_range: Optional[Tuple[float, float]] = None,
    ) -> str:
        """Render labelled ``(label, x, y)`` series with optional vertical markers and shaded bands."""
        xs = np.concatenate([np.asarray(x, dtype=float) for _, x, _ in series])
        ys = np.concatenate([np.asarray(y, dtype=float) for _, _, y in series])
        finite = np.isfinite(ys)
        x_lo, x_hi = float(xs.min()), float(xs.max())
        y_lo, y_hi = y_range or (float(ys[finite].min()), float(ys[finite].max()))
        sx, sy = self._scale(x_lo, x_hi, "x"), self._scale(y_lo, y_hi, "y")

        series_list = []
        for i, (label, x, y) in enumerate(series):
            y = np.clip(np.asarray(y, dtype=float), y_lo, y_hi)
            points = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if math.isfinite(b))
            series_list.append({"label": label, "color": PALETTE[i % len(PALETTE)], "points": points})

        template = self.env.get_template("line_plot.svg.jinja2")
        return template.render(
            width=self.width,
            height=self.height,
            frame=self.frame,
            title=title,
            x_label=x_label,
            y_label=y_label,
            series_list=series_list,
            markers=[{"pos": sx(m), "color": "#444444"} for m in markers if x_lo <= m <= x_hi],
            bands=[
                {"x0": sx(max(lo, x_lo)), "x1": sx(min(hi, x_hi)), "color": "#2ca02c"}
                for lo, hi in bands
                if hi >= x_lo and lo <= x_hi
            ],
            x_ticks=[{"pos": sx(t), "label": f"{t:g}"} for t in _nice_ticks(x_lo, x_hi)],
            y_ticks=[{"pos": sy(t), "label": f"{t:g}"} for t in _nice_ticks(y_lo, y_hi)],
        )

    def sv_curves(self, curves: Dict[str, np.ndarray], knee_pred: Optional[float] = None, title: str = "") -> str:
        """Normalized singular-value curves in decades against the index."""
        series = []
        for label, sigmas in curves.items():
            sigmas = np.asarray(sigmas, dtype=float)
            with np.errstate(divide="ignore"):
                y = np.log10(sigmas / sigmas[0])
            series.append((label, np.arange(1, sigmas.size + 1), y))
        markers = [knee_pred] if knee_pred is not None else []
        finite = np.concatenate([s[2][np.isfinite(s[2])] for s in series])
        y_lo = max(-16.0, float(finite.min())) if finite.size else -16.0
        return self.line_plot(series, title, "n", "log10(sigma_n / sigma_1)", markers, y_range=(y_lo, 0.0))

    def mode_plot(self, modes: ModeSpectrum, band: Optional[SpectralBand] = None, title: str = "") -> str:
        """Group mean-square DFT energy against the lateral wavenumber."""
        series = []
        for group in (Group.APERTURE, Group.REMAINDER):
            energy = modes.group_energy[group]
            with np.errstate(divide="ignore"):
                series.append((group.value, modes.k_x, np.log10(energy / energy.max())))
        bands = [(band.k_lo, band.k_hi)] if band is not None else []
        return self.line_plot(series, title, "k_x (rad/m)", "log10(mean square)", bands=bands, y_range=(-4.0, 0.0))

    def heatmap(self, lmap: LocalizationMap, title: str = "") -> str:
        """Top view (x, y) of a localization map."""
        x, y = lmap.points[:, 0], lmap.points[:, 1]
        plot_w, plot_h = self.width - 120, self.height - 80
        span = max(np.ptp(x), np.ptp(y), 1e-12)
        pitch = span / max(1.0, math.sqrt(len(x)))
        scale = min(plot_w, plot_h) / (span + pitch)
        size = max(1.0, pitch * scale)
        cells = [
            {
                "x": 40 + (xi - x.min()) * scale,
                "y": 40 + (y.max() - yi) * scale,
                "size": size,
                "color": heat_color(v),
            }
            for xi, yi, v in zip(x, y, lmap.values)
        ]
        stops = 20
        legend_h = (self.height - 80) / stops
        legend = [
            {"y": 40 + i * legend_h, "h": legend_h + 0.5, "color": heat_color(-i / (stops - 1))}
            for i in range(stops)
        ]
        template = self.env.get_template("heatmap.svg.jinja2")
        return template.render(width=self.width, height=self.height, title=title, cells=cells, legend=legend)
