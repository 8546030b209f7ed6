"""shadowrank - mutual shadow predictors and spectra of wave-interaction blocks."""

__version__ = "0.1.0"
__author__ = "matburt"
__email__ = "mat@matburt.net"
__description__ = "Predict and verify the singular-value structure of wave-interaction blocks"

# Import main classes for easier access
from .config import Config
from .geometry import GeometrySpec, PointCloud, ScenePair, build_scene
from .shadow import ShadowEstimate, governing_estimate, predict_knee
from .kernel import InteractionBlock, assemble_block
from .spectrum import RankReport, SpectrumResult, compute_spectrum
from .pipeline import CaseResult, PipelineSettings, analyze_case

__all__ = [
    "Config",
    "GeometrySpec",
    "PointCloud",
    "ScenePair",
    "build_scene",
    "ShadowEstimate",
    "governing_estimate",
    "predict_knee",
    "InteractionBlock",
    "assemble_block",
    "RankReport",
    "SpectrumResult",
    "compute_spectrum",
    "CaseResult",
    "PipelineSettings",
    "analyze_case",
    "__version__",
    "__author__",
    "__email__",
    "__description__",
]
