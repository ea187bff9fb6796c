"""Strict positive definiteness of isotropic kernels on the torus S^1 x S^1."""

__version__ = "0.1.0"

from .intlat import Coset, Subgroup, avoiding_rect_lattice, canonicalize, coset_intersect, decompose_to_square
from .support import (
    CircleSupport, MinTail, NoTail, Outcome, Periodic, SupportSpec, decide_spd, decide_spd_bounded,
    decide_spd_circle, intersection_sampler, member,
)
from .kernel import ChebKernel, LaurentKernel, PointConfig, eval_kr, fit_coefficients, gram, schoenberg_norm
from .certify import (
    check_null_equivalence, exp_sums, general_lattice_config, juru_config, min_eigen,
    verify_spd_empirical, witness_for_support,
)
from .zeroset import build_table, detect_structure, verify_not_all_zero

__all__ = [
    "Coset", "Subgroup", "avoiding_rect_lattice", "canonicalize", "coset_intersect", "decompose_to_square",
    "CircleSupport", "MinTail", "NoTail", "Outcome", "Periodic", "SupportSpec", "decide_spd",
    "decide_spd_bounded", "decide_spd_circle", "intersection_sampler", "member",
    "ChebKernel", "LaurentKernel", "PointConfig", "eval_kr", "fit_coefficients", "gram", "schoenberg_norm",
    "check_null_equivalence", "exp_sums", "general_lattice_config", "juru_config", "min_eigen",
    "verify_spd_empirical", "witness_for_support",
    "build_table", "detect_structure", "verify_not_all_zero",
]
