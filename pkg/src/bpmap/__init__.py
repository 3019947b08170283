"""bpmap: causality detection in non-autonomous dynamical systems.

Implements convergent cross mapping (CCM) and bivariate partial mapping
(BPM). A non-autonomous system is first made autonomous by promoting the
time-varying drive to a state variable theta (a skew product system);
BPM then embeds the effect variable interleaved with theta and scores
cross-map estimates with the partial correlation given theta, removing
the drive's confounding influence that plain CCM misattributes to the
variables themselves.
"""

from .data import Dataset, TimeSeries, dataset_meta, load_csv, save_csv
from .detector import (
    CausalityVerdict,
    ConvergenceCurve,
    ConvergenceThresholds,
    DetectionConfig,
    PairwiseResult,
    assess,
    default_L_grid,
    run_direction,
    run_pairwise,
)
from .embedding import (
    DimensionBoundWarning,
    EmbeddingConfig,
    ShadowManifold,
    check_dimension_bound,
    embed_bivariate,
    embed_univariate,
)
from .crossmap import (
    CrossMapResult,
    LibrarySample,
    NeighborSet,
    cross_map_estimate,
    cross_map_series,
    find_neighbors,
    simplex_weights,
)
from .stats import CorrelationResult, partial_corr, pearson, skill
from .systems import (
    SystemSpec,
    ThetaSpec,
    simulate,
    spec_from_json,
    spec_to_json,
    staircase_theta,
    step_theta,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "TimeSeries",
    "dataset_meta",
    "load_csv",
    "save_csv",
    "CausalityVerdict",
    "ConvergenceCurve",
    "ConvergenceThresholds",
    "DetectionConfig",
    "PairwiseResult",
    "assess",
    "default_L_grid",
    "run_direction",
    "run_pairwise",
    "DimensionBoundWarning",
    "EmbeddingConfig",
    "ShadowManifold",
    "check_dimension_bound",
    "embed_bivariate",
    "embed_univariate",
    "CrossMapResult",
    "LibrarySample",
    "NeighborSet",
    "cross_map_estimate",
    "cross_map_series",
    "find_neighbors",
    "simplex_weights",
    "CorrelationResult",
    "partial_corr",
    "pearson",
    "skill",
    "SystemSpec",
    "ThetaSpec",
    "simulate",
    "spec_from_json",
    "spec_to_json",
    "staircase_theta",
    "step_theta",
    "errors",
    "__version__",
]
