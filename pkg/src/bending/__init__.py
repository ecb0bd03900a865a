"""Bending deformations of hyperbolic structures and their Hilbert geometry.

Submodules:

- ``projective``: points, hyperplanes, maps and cross-ratios in RP^d.
- ``hyperbolic``: the paraboloid model, the parabolic group and bending elements.
- ``domains``, ``hilbert``: convex domains and their Hilbert/Busemann geometry.
- ``cusps``: standard and bent cusp models, witnesses, simplices and volumes.
- ``representation``, ``classify``: bent representations and cusp classification.
"""

from .classify import PeripheralData, classify, horoball_sandwich
from .cusps import CuspLattice, cusp_simplex, cusp_volume_estimate
from .domains import BentDomain, Ellipsoid, Paraboloid, Polytope
from .errors import BendingError
from .hilbert import busemann_volume, finsler_norm, hilbert_distance
from .projective import ProjectiveMap, ProjectivePoint, cross_ratio
from .representation import BendingData, bend

__all__ = [
    "BendingData", "BendingError", "BentDomain", "CuspLattice", "Ellipsoid", "Paraboloid",
    "PeripheralData", "Polytope", "ProjectiveMap", "ProjectivePoint", "bend", "busemann_volume",
    "classify", "cross_ratio", "cusp_simplex", "cusp_volume_estimate", "finsler_norm",
    "hilbert_distance", "horoball_sandwich",
]
__version__ = "0.1.0"
