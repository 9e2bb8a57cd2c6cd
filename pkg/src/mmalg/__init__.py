"""Workbench for exact bilinear matrix-multiplication programs.

Construct programs (classical, the rank-7 2x2 scheme, shifted-partner
aggregation), verify them exactly or probabilistically, derive new ones by
duality, tensor product, and equivalence transforms, and run them
recursively on concrete matrices - including block inversion and the
multiplication/inversion reductions.  All arithmetic is exact.
"""

from .errors import (
    BadArgument,
    BadField,
    BadTransform,
    DimensionError,
    ExponentUndefined,
    FormatError,
    InvalidAlgorithm,
    MmalgError,
    PivotFailure,
    SingularMatrix,
)
from .exact_algebra import (
    Matrix,
    ModularScalar,
    PrimeField,
    QQ,
    Rational,
    RationalField,
    dump_matrix,
    format_matrix,
    is_prime,
    load_matrix,
    mat_classical_multiply,
    mat_inverse,
    parse_matrix,
    random_matrix,
)
from .bilinear_core import (
    DEFAULT_PRIME,
    BilinearAlgorithm,
    CostReport,
    DimensionTriple,
    KnownRankBounds,
    RankBound,
    VerificationReport,
    apply_elementary,
    dump_algorithm,
    exponent,
    format_algorithm,
    generic_lower_bound,
    known_bounds,
    load_algorithm,
    parse_algorithm,
    sanity_rank_lower_bound,
    verify_brent,
    verify_trilinear_random,
)
from .generators import classical, pan_aggregation, strassen_222
from .transforms import (
    DualityPermutation,
    EquivalenceTransform,
    apply_equivalence,
    dual,
    dump_transform,
    format_transform,
    load_transform,
    parse_transform,
    random_equivalence,
    squareify,
    tensor_product,
)
from .recursion import (
    RecursionConfig,
    cost_model,
    multiply_via_inversion,
    recursive_invert,
    recursive_multiply,
)

__version__ = "0.1.0"

__all__ = [
    "BadArgument", "BadField", "BadTransform", "DimensionError",
    "ExponentUndefined", "FormatError", "InvalidAlgorithm", "MmalgError",
    "PivotFailure", "SingularMatrix",
    "Matrix", "ModularScalar", "PrimeField", "QQ", "Rational", "RationalField",
    "dump_matrix", "format_matrix", "is_prime", "load_matrix",
    "mat_classical_multiply", "mat_inverse", "parse_matrix", "random_matrix",
    "DEFAULT_PRIME", "BilinearAlgorithm", "CostReport", "DimensionTriple",
    "KnownRankBounds", "RankBound", "VerificationReport", "apply_elementary",
    "dump_algorithm", "exponent", "format_algorithm", "generic_lower_bound",
    "known_bounds", "load_algorithm", "parse_algorithm",
    "sanity_rank_lower_bound", "verify_brent", "verify_trilinear_random",
    "classical", "pan_aggregation", "strassen_222",
    "DualityPermutation", "EquivalenceTransform", "apply_equivalence", "dual",
    "dump_transform", "format_transform", "load_transform", "parse_transform",
    "random_equivalence", "squareify", "tensor_product",
    "RecursionConfig", "cost_model", "multiply_via_inversion",
    "recursive_invert", "recursive_multiply",
]
