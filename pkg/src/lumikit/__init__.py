"""lumikit: physics-based illuminant tooling.

Preset derivation on the Planckian locus, flat-light augmentation with edge
map export, the masked reconstruction loss kernel, a white-balance based
illuminant evaluation harness, 2AFC preference scaling, and a
text-embedding probe.
"""

from .color import (
    CMF_SHA256,
    IDENTITY_PRESET_ID,
    PRESET_IDS,
    PRESETS,
    Chromaticity,
    ColorTemperature,
    IlluminantPreset,
    IlluminantRgb,
    LabColor,
    angular_error,
    chromaticity_to_illuminant_rgb,
    cmf_table,
    kelvin_to_chromaticity,
    lab_mse,
    linear_srgb_to_lab,
    planck_spectral_radiance,
    preset_to_illuminant_rgb,
    srgb_decode,
    srgb_encode,
)
from .config import ToolConfig
from .errors import DegenerateImageError, LumikitError, ValidationError
from .evaluation import (
    MetricsRecord,
    MetricsReport,
    WbMethod,
    estimate_illuminant,
    evaluate_manifest,
    parse_wb_method,
    ssim,
    white_balance,
)
from .loss import (
    DEFAULT_LAMBDA,
    MrlParams,
    RegionFixture,
    lambda_sweep,
    mrl,
    mrl_gradient,
    read_tensor,
    residual_map,
    write_tensor,
)
from .probe import (
    ClusterConfig,
    EmbeddingItem,
    EmbeddingSet,
    ProbeReport,
    load_embeddings,
    pca_project,
    run_probe_suite,
    silhouette_score,
    write_embeddings,
)
from .relight import (
    AugmentationManifest,
    ManifestRecord,
    PromptTemplate,
    apply_flat_light,
    canny_edges,
    downsample_mask,
    edge_disagreement,
    generate_variants,
)
from .study import (
    PreferenceMatrix,
    StudyResult,
    bootstrap_scales,
    norm_cdf,
    norm_ppf,
    run_study,
    thurstone_case_v,
)

__version__ = "0.1.0"

__all__ = [
    "AugmentationManifest",
    "CMF_SHA256",
    "Chromaticity",
    "ClusterConfig",
    "ColorTemperature",
    "DEFAULT_LAMBDA",
    "DegenerateImageError",
    "EmbeddingItem",
    "EmbeddingSet",
    "IDENTITY_PRESET_ID",
    "IlluminantPreset",
    "IlluminantRgb",
    "LabColor",
    "LumikitError",
    "ManifestRecord",
    "MetricsRecord",
    "MetricsReport",
    "MrlParams",
    "PRESETS",
    "PRESET_IDS",
    "PreferenceMatrix",
    "ProbeReport",
    "PromptTemplate",
    "RegionFixture",
    "StudyResult",
    "ToolConfig",
    "ValidationError",
    "WbMethod",
    "angular_error",
    "apply_flat_light",
    "bootstrap_scales",
    "canny_edges",
    "chromaticity_to_illuminant_rgb",
    "cmf_table",
    "downsample_mask",
    "edge_disagreement",
    "estimate_illuminant",
    "evaluate_manifest",
    "generate_variants",
    "kelvin_to_chromaticity",
    "lab_mse",
    "lambda_sweep",
    "linear_srgb_to_lab",
    "load_embeddings",
    "mrl",
    "mrl_gradient",
    "norm_cdf",
    "norm_ppf",
    "parse_wb_method",
    "pca_project",
    "planck_spectral_radiance",
    "preset_to_illuminant_rgb",
    "read_tensor",
    "residual_map",
    "run_probe_suite",
    "run_study",
    "silhouette_score",
    "srgb_decode",
    "srgb_encode",
    "ssim",
    "thurstone_case_v",
    "white_balance",
    "write_embeddings",
    "write_tensor",
    "__version__",
]
