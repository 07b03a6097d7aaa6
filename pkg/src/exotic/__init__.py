"""
exotic-circles
~~~~~~~~~~~~~~

Quasifuchsian reflection groups of right-angled quadrilaterals, the exotic
circle through the repelling fixed point of a bending element, orbit and limit
set enumeration, and deterministic SVG rendering.
"""

from importlib.metadata import PackageNotFoundError, version

from .constants import (
    Branch as Branch,
    Classification as Classification,
    Orientation as Orientation,
)
from .exceptions import (
    CheckFailedError as CheckFailedError,
    ClassificationError as ClassificationError,
    ClosureUncertifiedError as ClosureUncertifiedError,
    DecoupleNotFoundError as DecoupleNotFoundError,
    DegenerateError as DegenerateError,
    DynamicRangeError as DynamicRangeError,
    ExoticError as ExoticError,
    GeometricRegimeError as GeometricRegimeError,
    NotDiscreteDatumError as NotDiscreteDatumError,
    SchemaError as SchemaError,
    SolverError as SolverError,
    TruncatedOrbitError as TruncatedOrbitError,
)
from .geometry import (
    GenCircle as GenCircle,
    MoebiusMap as MoebiusMap,
    apply_circle as apply_circle,
    apply_point as apply_point,
    circle_distance as circle_distance,
    classify as classify,
    compose as compose,
    fixed_points as fixed_points,
    inversion_in as inversion_in,
    inversive_distance as inversive_distance,
)
from .groups import (
    approximate_limit_set as approximate_limit_set,
    closure_check as closure_check,
    enumerate_orbit as enumerate_orbit,
    find_t0 as find_t0,
    solve_quadrilateral as solve_quadrilateral,
    verify_accumulation as verify_accumulation,
    verify_exotic_tangency as verify_exotic_tangency,
)
from .models import (
    GeneratorSet as GeneratorSet,
    OrbitConfig as OrbitConfig,
    QuadGroupData as QuadGroupData,
)
from .render import (
    Layer as Layer,
    Scene as Scene,
    Viewport as Viewport,
    render_svg as render_svg,
)

try:
    __version__ = version("exotic-circles")
except PackageNotFoundError:
    __version__ = "0.0.0"

del PackageNotFoundError, version
