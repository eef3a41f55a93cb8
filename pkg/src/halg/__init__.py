"""halg: exact-arithmetic homotopy algebra toolkit.

Graded spaces with odd pairings, tensor/symmetric coalgebra machinery,
structure-relation certifiers, homotopy transfer with loop corrections,
Maurer-Cartan obstruction theory, deformation cohomology and open-closed
correspondences — all over exact scalars (rationals or a prime field).
"""

__version__ = "0.1.0"

from .scalars import Field, FpElement, RATIONALS
from .graded import Element, GradedSpace, SymplecticData, build_symplectic, contract_dual_pair, koszul_sign

__all__ = [
    "Field",
    "FpElement",
    "RATIONALS",
    "Element",
    "GradedSpace",
    "SymplecticData",
    "build_symplectic",
    "contract_dual_pair",
    "koszul_sign",
    "__version__",
]
