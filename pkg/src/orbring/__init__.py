"""Exact Chen-Ruan orbifold cohomology rings of symmetric quotients of
abelian surfaces and their kernel varieties, with optional discrete torsion."""

__version__ = "0.1.0"

from .combinatorics import CaseTag, Partition, Permutation, age, epsilon, orbit_join
from .ring import OrbifoldElement, OrbifoldRing, ResourceBoundError, build_ring

__all__ = [
    "CaseTag",
    "OrbifoldElement",
    "OrbifoldRing",
    "Partition",
    "Permutation",
    "ResourceBoundError",
    "age",
    "build_ring",
    "epsilon",
    "orbit_join",
]
