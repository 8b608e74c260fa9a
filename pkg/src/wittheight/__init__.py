"""Exact heights and Witt decompositions of quadratic spaces over Q."""

from .bilinear_space import (BilinearSpace, IsotropyOutcome, SymBilinearForm, evaluate,
                             find_isotropic, make_hyperbolic_pair, ortho_basis, radical,
                             regular_split, siegel_basis, singular_zero)
from .exact_linalg import Subspace, grassmann, intersect, kernel
from .heights import (BoundCertificate, BoundVal, certify, compare, height_sq, inhom_height_sq,
                      matrix_height_sq, subspace_height_sq)
from .isometry import (Isometry, Reflection, cartan_dieudonne, find_cd_vector, invariant_subspace,
                       is_isometry, random_isometry, reflection, small_reflection)
from .witt_engine import (WittDecomposition, max_totally_isotropic, verify_decomposition,
                          witt_decompose, witt_index)

__version__ = "0.1.0"

__all__ = [
    "BilinearSpace", "BoundCertificate", "BoundVal", "IsotropyOutcome", "Isometry", "Reflection",
    "Subspace", "SymBilinearForm", "WittDecomposition", "cartan_dieudonne", "certify", "compare",
    "evaluate", "find_cd_vector", "find_isotropic", "grassmann", "height_sq", "inhom_height_sq",
    "intersect", "invariant_subspace", "is_isometry", "kernel", "make_hyperbolic_pair",
    "matrix_height_sq", "max_totally_isotropic", "ortho_basis", "radical", "random_isometry",
    "reflection", "regular_split", "siegel_basis", "singular_zero", "small_reflection",
    "subspace_height_sq", "verify_decomposition", "witt_decompose", "witt_index",
]
