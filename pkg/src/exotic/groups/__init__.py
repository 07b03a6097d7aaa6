from .lunchbox import (
    LunchboxParams as LunchboxParams,
    closed_form_t0 as closed_form_t0,
    find_t0 as find_t0,
    verify_exotic_tangency as verify_exotic_tangency,
)
from .orbit import (
    OrbitSet as OrbitSet,
    PointCloud as PointCloud,
    approximate_limit_set as approximate_limit_set,
    closure_check as closure_check,
    enumerate_orbit as enumerate_orbit,
)
from .quadgroup import (
    exotic_circle as exotic_circle,
    generator_set as generator_set,
    limit_circle as limit_circle,
    solve_quadrilateral as solve_quadrilateral,
    verify_accumulation as verify_accumulation,
)
