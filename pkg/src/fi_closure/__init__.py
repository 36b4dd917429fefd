"""Exact equations and bounded-rank completion for symmetric tensor images."""

from .completion import CompletionResult, complete, complete_product, rank_cap
from .equations import (
    CanonicalEquation,
    Membership,
    MembershipWitness,
    canonical_generators,
    canonicalize,
    is_member,
    orbit_instances,
    strict_witness,
)
from .equivariant import (
    Component,
    EquivariantMap,
    MatrixPoint,
    factor_model_preset,
    monomial_decompositions,
    parse_map,
    pushforward,
    rank_bound,
)
from .linalg import determinant, inverse, matrix_rank
from .poly import MATRIX_X, TENSOR_Y, Injection, Polynomial, act, compose, evaluate
from .tensor import (
    DIAGONAL,
    FlatteningView,
    OffDiagTensor,
    RankDecomposition,
    ShiftProfile,
    densify,
    flatten,
    off_diag_from_entries,
    off_diag_minor,
    pad_embed,
    project,
    shift_profile,
)
from .verify import VerifyReport, run_verify

__all__ = [
    "CanonicalEquation",
    "CompletionResult",
    "Component",
    "DIAGONAL",
    "EquivariantMap",
    "FlatteningView",
    "Injection",
    "MATRIX_X",
    "MatrixPoint",
    "Membership",
    "MembershipWitness",
    "OffDiagTensor",
    "Polynomial",
    "RankDecomposition",
    "ShiftProfile",
    "TENSOR_Y",
    "VerifyReport",
    "act",
    "canonical_generators",
    "canonicalize",
    "complete",
    "complete_product",
    "compose",
    "densify",
    "determinant",
    "evaluate",
    "factor_model_preset",
    "flatten",
    "inverse",
    "is_member",
    "matrix_rank",
    "monomial_decompositions",
    "off_diag_from_entries",
    "off_diag_minor",
    "orbit_instances",
    "pad_embed",
    "parse_map",
    "project",
    "pushforward",
    "rank_bound",
    "rank_cap",
    "run_verify",
    "shift_profile",
    "strict_witness",
]

__version__ = "0.1.0"
