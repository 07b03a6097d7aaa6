from .lorentz import (
    LorentzVec as LorentzVec,
    PlaneNormal as PlaneNormal,
    circle_to_normal as circle_to_normal,
    minkowski_inner as minkowski_inner,
    normal_to_circle as normal_to_circle,
    reflect as reflect,
)
from .moebius import (
    FixedPoints as FixedPoints,
    GenCircle as GenCircle,
    MoebiusMap as MoebiusMap,
    apply_circle as apply_circle,
    apply_point as apply_point,
    circle_through as circle_through,
    classify as classify,
    compose as compose,
    fixed_points as fixed_points,
    inversion_in as inversion_in,
    inversive_distance as inversive_distance,
    translation_length as translation_length,
)
from .sphere import (
    INFINITY as INFINITY,
    SphereCircle as SphereCircle,
    chordal_distance as chordal_distance,
    circle_distance as circle_distance,
    fit_sphere_circle as fit_sphere_circle,
)
