"""Exact verification of connection, curvature and torsion triples over the rationals."""

from .families import (
    MeusersParams,
    constant_curvature_triple,
    meusers_predictions,
    meusers_triple,
)
from .filtration import (
    Filtration,
    direct_equations_verdict,
    joint_stabilizer_filtration,
    membership,
    membership_direct,
    membership_variant,
    stabilizer_filtration,
)
from .kstructures import KAlgebra, SUStructure, membership_k, model_su, verify_su_structure
from .linalg import Subspace, char_poly, distinct_eigenvalue_count, intersect, kernel, rank, rref, wedge_to_endo
from .skew import LiePair, LiePairError, assemble_g, triple_from_lie_pair
from .spencer import (
    build_comodule,
    spencer_coboundary,
    spencer_cohomology,
    verify_contact,
    verify_contact_defn,
)
from .tensor import Tensor
from .triples import (
    Triple,
    approximate_curvature,
    bianchi_residuals,
    circledast,
    nabla_r,
    pullback,
    ricci,
    scale,
    star_action,
    twisted_d,
)

__version__ = "0.1.0"

__all__ = [
    "approximate_curvature",
    "assemble_g",
    "bianchi_residuals",
    "build_comodule",
    "char_poly",
    "circledast",
    "constant_curvature_triple",
    "direct_equations_verdict",
    "distinct_eigenvalue_count",
    "Filtration",
    "intersect",
    "joint_stabilizer_filtration",
    "KAlgebra",
    "kernel",
    "LiePair",
    "LiePairError",
    "membership",
    "membership_direct",
    "membership_k",
    "membership_variant",
    "meusers_predictions",
    "meusers_triple",
    "MeusersParams",
    "model_su",
    "nabla_r",
    "pullback",
    "rank",
    "ricci",
    "rref",
    "scale",
    "spencer_coboundary",
    "spencer_cohomology",
    "stabilizer_filtration",
    "star_action",
    "Subspace",
    "SUStructure",
    "Tensor",
    "Triple",
    "triple_from_lie_pair",
    "twisted_d",
    "verify_contact",
    "verify_contact_defn",
    "verify_su_structure",
    "wedge_to_endo",
]
