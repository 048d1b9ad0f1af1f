"""Exact bilinear pairings of free sheaf modules on finite topological spaces."""

from .errors import AlgebraError
from .linalg import (SubmoduleBasis, image_basis, kernel_basis, rank, smith_normal_form,
                     solve)
from .matrix import Matrix
from .pairing import (OrthogonalResult, Pairing, Side, canonical_pairing, left_kernel,
                      orthogonal, radical, right_kernel)
from .rings import QQ, ZZ, Scalar
from .sheaf import SheafModule, check_all_covers, check_sheaf_axioms, validate_presheaf
from .topology import FiniteSpace, catalog, validate_topology
from .witt import HyperbolicPlane, WittResult, find_partner, hyperbolic_decomposition, verify_witt

__all__ = [
    "AlgebraError", "SubmoduleBasis", "image_basis", "kernel_basis", "rank", "smith_normal_form",
    "solve", "Matrix", "OrthogonalResult", "Pairing", "Side", "canonical_pairing", "left_kernel",
    "orthogonal", "radical", "right_kernel", "QQ", "ZZ", "Scalar", "SheafModule",
    "check_all_covers", "check_sheaf_axioms", "validate_presheaf", "FiniteSpace", "catalog",
    "validate_topology", "HyperbolicPlane", "WittResult", "find_partner",
    "hyperbolic_decomposition", "verify_witt",
]
