"""3-D imaging by active incoherent Fourier interferometry and LFM pulse compression.

Cross-range (azimuth/elevation) structure comes from cross-correlating
receivers under spatially incoherent noise illumination; down-range
structure comes from matched filtering a known LFM pulse train that is
transmitted at the same time.
"""

from .compression import (
    MatchedFilterOutput,
    RadarDataCube,
    build_data_cube,
    compress_channels,
    matched_filter,
)
from .config import ConfigError, ScenarioConfig, load_config
from .constants import SPEED_OF_LIGHT
from .geometry import (
    ArrayGeometry,
    Element,
    ResolutionReport,
    SamplingFunction,
    compute_baselines,
    compute_psf,
    direction_grid,
    random_lattice_array,
    resolution_and_fov,
    uniform_linear_array,
)
from .images import ImageGrid
from .interferometry import (
    VisibilitySet,
    analytic_visibility,
    analytic_visibility_set,
    estimate_visibilities_per_range_bin,
    estimate_visibilities_raw,
    range_azimuth_image,
    reconstruct_image,
)
from .pipeline import RunReport, run_pipeline
from .scene import ChannelData, PointTarget, Scene, apply_delay, synthesize_received
from .waveform import (
    LfmSpec,
    NoiseSpec,
    SampledWaveform,
    build_pulse_train,
    generate_lfm,
    generate_noise,
    lfm_train,
)

__all__ = [
    "ArrayGeometry", "ChannelData", "ConfigError", "Element", "ImageGrid", "LfmSpec",
    "MatchedFilterOutput", "NoiseSpec", "PointTarget", "RadarDataCube", "ResolutionReport",
    "RunReport", "SPEED_OF_LIGHT", "SampledWaveform", "SamplingFunction", "ScenarioConfig",
    "Scene", "VisibilitySet", "analytic_visibility", "analytic_visibility_set", "apply_delay",
    "build_data_cube", "build_pulse_train", "compress_channels", "compute_baselines",
    "compute_psf", "direction_grid", "estimate_visibilities_per_range_bin",
    "estimate_visibilities_raw", "generate_lfm", "generate_noise", "lfm_train", "load_config",
    "matched_filter", "random_lattice_array", "range_azimuth_image", "reconstruct_image",
    "resolution_and_fov", "run_pipeline", "synthesize_received", "uniform_linear_array",
]

__version__ = "0.1.0"
