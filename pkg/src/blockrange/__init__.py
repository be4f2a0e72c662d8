"""Numerical ranges of matrices and essential numerical ranges of block
diagonal operators, with a hull-free regrouping of the blocks."""

from .blockop import (
    BUILTIN_TAILS,
    BlockOperatorSpec,
    BuiltinTail,
    LimsupResult,
    PeriodicTail,
    VanishingTail,
    limsup_ranges,
    tail_union,
)
from .convex2d import (
    ConvexRegion,
    ConvexWeights,
    PointCloud,
    convex_hull,
    extreme_points,
    grid_angles,
    hausdorff,
    intersect_regions,
    nested_conv_exchange,
)
from .errors import (
    BlockRangeError,
    DegenerateGeometry,
    EmptyInput,
    EmptyIntersection,
    HorizonTooSmall,
    InconsistentResult,
    IndexBelowK,
    NoConvergence,
    NonConvergence,
    NotNested,
    NotUnit,
    ParseError,
    ScanExhausted,
    ValidationError,
)
from .essrange import (
    EssentialRangeResult,
    diagonal_essential_range,
    essential_numerical_range,
    translate_spec,
)
from .linalg import (
    ComplexMatrix,
    HermEigResult,
    hermitian_part,
    max_eigenpair,
    rayleigh,
)
from .numrange import (
    NumericalRangeResult,
    block_numerical_range,
    boundary_point,
    numerical_range,
)
from .oracle import (
    EssentialSample,
    inner_approximate,
    membership,
    sample_essential_value,
)
from .regroup import (
    Decomposition,
    GroupSelection,
    TranslationChoice,
    choose_translation,
    group_region,
    identity_decomposition,
    regroup,
    verify_conv_free,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_TAILS",
    "BlockOperatorSpec",
    "BlockRangeError",
    "BuiltinTail",
    "ComplexMatrix",
    "ConvexRegion",
    "ConvexWeights",
    "Decomposition",
    "DegenerateGeometry",
    "EmptyInput",
    "EmptyIntersection",
    "EssentialRangeResult",
    "EssentialSample",
    "GroupSelection",
    "HermEigResult",
    "HorizonTooSmall",
    "InconsistentResult",
    "IndexBelowK",
    "LimsupResult",
    "NoConvergence",
    "NonConvergence",
    "NotNested",
    "NotUnit",
    "NumericalRangeResult",
    "ParseError",
    "PeriodicTail",
    "PointCloud",
    "ScanExhausted",
    "TranslationChoice",
    "ValidationError",
    "VanishingTail",
    "block_numerical_range",
    "boundary_point",
    "choose_translation",
    "convex_hull",
    "diagonal_essential_range",
    "essential_numerical_range",
    "extreme_points",
    "grid_angles",
    "group_region",
    "hausdorff",
    "hermitian_part",
    "identity_decomposition",
    "inner_approximate",
    "intersect_regions",
    "limsup_ranges",
    "max_eigenpair",
    "membership",
    "nested_conv_exchange",
    "numerical_range",
    "rayleigh",
    "regroup",
    "sample_essential_value",
    "tail_union",
    "translate_spec",
    "verify_conv_free",
]
