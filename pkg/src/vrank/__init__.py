"""Visible rank of {0, *} stencils: exact solvers, certificates, tensor
operations, seeded family generators, GF(p) witnesses, and spanoid duality."""

from .engine import (
    DiagonalCertificate,
    VrankResult,
    greedy_lower_bound,
    is_visibly_full_rank,
    triangularize,
    visible_rank_bounds,
    visible_rank_exact,
    visibly_independent,
    zero_rectangle_bound,
)
from .families import (
    Family,
    FamilyParams,
    ProbeReport,
    ValidationReport,
    gen_drgp,
    gen_lcc,
    gen_lrc,
    gen_tensor_gap,
    generate,
    lcc_zero_rectangle_probe,
    validate_family,
)
from .gf import (
    MinrankResult,
    WitnessMatrix,
    gf_rank,
    low_rank_witness,
    minrank_bruteforce,
    tensor_witness,
    validate_witness,
)
from .spanoid import (
    RankNullityReport,
    SpanoidRankResult,
    SymmetricSpanoid,
    canonical_stencil,
    rank_nullity_check,
    span_closure,
    spanoid_rank,
)
from .stencil import (
    PermutationPair,
    Stencil,
    StencilError,
    count_star_diagonals,
    max_matching_size,
    parse_stencil,
    permute,
    read_stencil,
    substencil,
    to_grid,
    to_json_doc,
    write_stencil,
)
from .tensor import (
    CapacityEstimate,
    DistinctRankResult,
    capacity_lower_bound,
    diagonal_tensor_certificate,
    distinct_rank_exact,
    is_distinctly_full_rank,
    tensor_certificate,
    tensor_power,
    tensor_power_vrank,
    tensor_product,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityEstimate",
    "DiagonalCertificate",
    "DistinctRankResult",
    "Family",
    "FamilyParams",
    "MinrankResult",
    "PermutationPair",
    "ProbeReport",
    "RankNullityReport",
    "SpanoidRankResult",
    "Stencil",
    "StencilError",
    "SymmetricSpanoid",
    "ValidationReport",
    "VrankResult",
    "WitnessMatrix",
    "canonical_stencil",
    "capacity_lower_bound",
    "count_star_diagonals",
    "diagonal_tensor_certificate",
    "distinct_rank_exact",
    "gen_drgp",
    "gen_lcc",
    "gen_lrc",
    "gen_tensor_gap",
    "generate",
    "gf_rank",
    "greedy_lower_bound",
    "is_distinctly_full_rank",
    "is_visibly_full_rank",
    "lcc_zero_rectangle_probe",
    "low_rank_witness",
    "max_matching_size",
    "minrank_bruteforce",
    "parse_stencil",
    "permute",
    "rank_nullity_check",
    "read_stencil",
    "span_closure",
    "spanoid_rank",
    "substencil",
    "tensor_certificate",
    "tensor_power",
    "tensor_power_vrank",
    "tensor_product",
    "tensor_witness",
    "to_grid",
    "to_json_doc",
    "triangularize",
    "validate_family",
    "validate_witness",
    "visible_rank_bounds",
    "visible_rank_exact",
    "visibly_independent",
    "write_stencil",
    "zero_rectangle_bound",
]
