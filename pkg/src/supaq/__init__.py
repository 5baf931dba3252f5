"""Quantum-channel capacity radii, Bregman coreset clustering, and superactivation sweeps."""

__version__ = "0.1.0"

from .exceptions import (
    CombinatorialLimitError,
    DegenerateConfigurationError,
    DimensionMismatchError,
    InvalidChannelError,
    InvalidStateError,
    ParameterError,
    SingularInputError,
    SupaqError,
    UnsupportedCopyCountError,
)
from .states import (
    BlochVector,
    DensityMatrix,
    Ensemble,
    audit_bloch_closed_form,
    bloch_to_density,
    bregman_divergence,
    density_to_bloch,
    matrix_log2,
    mix,
    relative_entropy,
    relative_entropy_bloch,
    von_neumann_entropy,
)
from .channels import (
    AffineQubitMap,
    KrausChannel,
    affine_map,
    channel_from_dict,
    complementary,
    depolarizing_channel,
    erasure_channel,
    flagged_convex,
    identity_channel,
    load_channel,
    save_channel,
    tensor,
)
from .ball import InfoBall, circumcenter3, farthest_point, minimax_ball
from .clustering import (
    DEFAULT_DOMAIN,
    MedianSet,
    MuSimilarDomain,
    WeightedStateSet,
    bicriteria,
    brute_force_kmedian,
    build_coreset,
    centroid,
    clamp_to_domain,
    cluster,
    divergence_matrix,
    kmedian_error,
    weighted_error,
)
from .capacity import (
    CapacityResult,
    OptimizerConfig,
    coherent_information,
    finite_n_capacity,
    holevo_capacity,
    holevo_difference,
    holevo_quantity,
    private_capacity_lb,
    private_info,
    quantum_capacity_lb,
    superball_radius,
)
from .superactivation import (
    PAIR_RADIUS_REPORTED,
    REPORTED_PRIVATE_RADIUS,
    REPORTED_WEIGHT_AT_P004,
    SUPERACTIVATION_GATE,
    CombinationReport,
    SweepConfig,
    SweepReport,
    SweepRow,
    combination_radius,
    detect_domain,
    horodecki_private_lb,
    smith_yard_bound,
    sweep,
)
from .estimators import BregmanKMedian, SmallestEnclosingBall, as_state_stack

__all__ = [
    "__version__",
    # exceptions
    "SupaqError",
    "InvalidStateError",
    "DimensionMismatchError",
    "SingularInputError",
    "InvalidChannelError",
    "DegenerateConfigurationError",
    "ParameterError",
    "CombinatorialLimitError",
    "UnsupportedCopyCountError",
    # states
    "DensityMatrix",
    "BlochVector",
    "Ensemble",
    "bloch_to_density",
    "density_to_bloch",
    "von_neumann_entropy",
    "relative_entropy",
    "relative_entropy_bloch",
    "bregman_divergence",
    "matrix_log2",
    "mix",
    "audit_bloch_closed_form",
    # channels
    "KrausChannel",
    "AffineQubitMap",
    "identity_channel",
    "depolarizing_channel",
    "erasure_channel",
    "complementary",
    "tensor",
    "flagged_convex",
    "affine_map",
    "load_channel",
    "save_channel",
    "channel_from_dict",
    # ball
    "InfoBall",
    "minimax_ball",
    "farthest_point",
    "circumcenter3",
    # clustering
    "MuSimilarDomain",
    "DEFAULT_DOMAIN",
    "WeightedStateSet",
    "MedianSet",
    "clamp_to_domain",
    "divergence_matrix",
    "kmedian_error",
    "weighted_error",
    "bicriteria",
    "build_coreset",
    "cluster",
    "centroid",
    "brute_force_kmedian",
    # capacity
    "OptimizerConfig",
    "CapacityResult",
    "holevo_quantity",
    "holevo_capacity",
    "coherent_information",
    "holevo_difference",
    "private_info",
    "quantum_capacity_lb",
    "private_capacity_lb",
    "finite_n_capacity",
    "superball_radius",
    # superactivation
    "SweepConfig",
    "SweepReport",
    "SweepRow",
    "CombinationReport",
    "smith_yard_bound",
    "horodecki_private_lb",
    "combination_radius",
    "sweep",
    "detect_domain",
    "PAIR_RADIUS_REPORTED",
    "SUPERACTIVATION_GATE",
    "REPORTED_PRIVATE_RADIUS",
    "REPORTED_WEIGHT_AT_P004",
    # estimators
    "SmallestEnclosingBall",
    "BregmanKMedian",
    "as_state_stack",
]
