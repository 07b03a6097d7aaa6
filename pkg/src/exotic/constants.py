from __future__ import annotations

import math
import sys
from typing import Final

from .utils import StrEnum

SCHEMA_VERSION: Final = 1
"""Version stamped into every persisted document as ``"schema"``."""

EPSILON: Final = sys.float_info.epsilon
LOG_FLOAT_MAX: Final = math.log(sys.float_info.max)

DEFAULT_TOLERANCE: Final = 1e-10
"""Generic comparison tolerance for normalized Hermitian coefficients."""
CHORDAL_TOLERANCE: Final = 1e-9
FUCHSIAN_TOLERANCE: Final = 1e-12
"""
Below this value of ``4cos²(π/n) - (s-1)(t-1)`` a quadrilateral datum is
treated as Fuchsian.
"""

LUNCHBOX_T_MAX: Final = (5 + math.sqrt(39)) / 3
"""Upper end of the lunchbox parameter interval (lower end is 1)."""
TOTALLY_GEODESIC_T: Final = 2.0


class Orientation(StrEnum):
    HOLOMORPHIC = "holo"
    ANTIHOLOMORPHIC = "anti"


class Classification(StrEnum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"
    LOXODROMIC = "loxodromic"


class CausalType(StrEnum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    LIGHTLIKE = "lightlike"


class Branch(StrEnum):
    """Which root of the corner-angle quadratic fixes the offset of C₂/C₄."""

    OUTER = "outer"
    INNER = "inner"
