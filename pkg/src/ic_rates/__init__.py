"""Achievable rates of two-user interference channels with finite QAM inputs.

The package estimates the mutual-information terms behind the strong- and
very-strong-interference rate regions, searches transmitter-side rotations,
locates very-strong thresholds on |h|, and drives deterministic parameter
sweeps from the command line.
"""

from .constellation import (
    Constellation,
    RotatedAlphabet,
    UnsupportedAlphabetError,
    make_qam,
    min_pairwise_distance,
    min_superposition_distance,
    periodicity,
    rotate,
    sets_match,
    superposition,
)
from .mi import (
    EstimatorConfig,
    Method,
    MIEstimate,
    ReceiverModel,
    mi_cross,
    mi_joint,
    mi_joint_direct,
    mi_single,
)
from .region import (
    ChannelConfig,
    RateRegion,
    RegionTerms,
    Topology,
    finite_region,
    finite_region_terms,
    gaussian_region,
    max_sum_rate,
    receiver_model,
    region_from_terms,
    vertices,
)
from .rotation import (
    ObjectiveKind,
    RotationResult,
    canonical_psi,
    effective_angles,
    optimize_rotation,
)
from .sweep import (
    CSV_HEADER,
    RotationMode,
    SweepConfigError,
    SweepRecord,
    SweepSpec,
    cache_key,
    compute_point,
    derive_seed,
    read_csv,
    resolve_alphabet,
    run_sweep,
    spec_from_json,
    write_csv,
)
from .vsi import (
    NoThresholdError,
    ThresholdQuery,
    ThresholdResult,
    find_threshold,
    gaussian_vsi,
    vsi_condition,
)
from .cli import cli_main

__version__ = "0.1.0"

__all__ = [
    "Constellation",
    "RotatedAlphabet",
    "UnsupportedAlphabetError",
    "make_qam",
    "min_pairwise_distance",
    "min_superposition_distance",
    "periodicity",
    "rotate",
    "sets_match",
    "superposition",
    "EstimatorConfig",
    "Method",
    "MIEstimate",
    "ReceiverModel",
    "mi_cross",
    "mi_joint",
    "mi_joint_direct",
    "mi_single",
    "ChannelConfig",
    "RateRegion",
    "RegionTerms",
    "Topology",
    "finite_region",
    "finite_region_terms",
    "gaussian_region",
    "max_sum_rate",
    "receiver_model",
    "region_from_terms",
    "vertices",
    "ObjectiveKind",
    "RotationResult",
    "canonical_psi",
    "effective_angles",
    "optimize_rotation",
    "CSV_HEADER",
    "RotationMode",
    "SweepConfigError",
    "SweepRecord",
    "SweepSpec",
    "cache_key",
    "compute_point",
    "derive_seed",
    "read_csv",
    "resolve_alphabet",
    "run_sweep",
    "spec_from_json",
    "write_csv",
    "NoThresholdError",
    "ThresholdQuery",
    "ThresholdResult",
    "find_threshold",
    "gaussian_vsi",
    "vsi_condition",
    "cli_main",
]
