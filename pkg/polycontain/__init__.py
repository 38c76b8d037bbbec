"""
polycontain: certified containment between H-polytopes, AH-polytopes and
zonotopes by linear programming, with Hausdorff bounds and order reduction
built on top.
"""

from polycontain.containment import CheckResult, ContainmentQuery, check, contains, max_scaling
from polycontain.errors import PolycontainError
from polycontain.geometry import AHPolytope, HPolytope, Zonotope

__version__ = "1.0.0"

__all__ = [
    "AHPolytope",
    "CheckResult",
    "ContainmentQuery",
    "HPolytope",
    "PolycontainError",
    "Zonotope",
    "check",
    "contains",
    "max_scaling",
]
