"""
Quasifuchsian reflection groups of a quadrilateral with corner angles ``π/n``
and the exotic circle through the repelling fixed point of ``η̃``.

Normalization: ``C₁``/``C₃`` have centres ``±1`` and radius ``r₁₃``,
``C₂``/``C₄`` have centres ``±bi`` and radius ``r₂₄``. The inversive distances
``s`` and ``t`` fix ``r₁₃ = sqrt(2/(s+1))`` and ``r₂₄ = b·sqrt(2/(t+1))``; the
corner angle is then a quadratic condition on ``b``.
"""

from __future__ import annotations

import cmath
import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import TYPE_CHECKING, Annotated, Final, final

from pydantic import Field, validate_call

from exotic.constants import (
    EPSILON,
    FUCHSIAN_TOLERANCE,
    LOG_FLOAT_MAX,
    Branch,
)
from exotic.exceptions import (
    DegenerateError,
    DynamicRangeError,
    NotDiscreteDatumError,
    SolverError,
)
from exotic.geometry.moebius import (
    GenCircle,
    MoebiusMap,
    apply_circle,
    apply_point,
    circle_through,
    compose,
    fixed_points,
    inversion_in,
    inversive_distance,
)
from exotic.geometry.sphere import (
    chordal_distance,
    circle_distance,
    is_infinite,
    stereographic,
)
from exotic.models.generators import GeneratorSet
from exotic.models.quad import QuadGroupData, fuchsian_defect_value
from exotic.models.reports import (
    AccumulationReport,
    AccumulationStep,
    CheckResult,
    LimitSetSummary,
)

if TYPE_CHECKING:
    from exotic.groups.orbit import PointCloud
    from exotic.types import ComplexPoint

_logger = logging.getLogger(__name__)

CONSTRAINT_TOLERANCE: Final = 1e-9
DEFAULT_K_MAX: Final = 12
DEFAULT_ACCUMULATION_TOLERANCE: Final = 1e-6
DEFAULT_BOUNDARY_DEPTH: Final = 10
RATIO_TOLERANCE: Final = 0.05
RATIO_CHECK_K: Final = 10
STABILIZER_TOLERANCE: Final = 1e-9
MOVED_THRESHOLD: Final = 1e-6
LIMIT_FIT_TOLERANCE: Final = 1e-3

_INCIDENCE_TOLERANCE: Final = 1e-8
_PHASE_TOLERANCE: Final = 1e-12
_RESOLUTION_FACTOR: Final = 64
_FUCHSIAN_MESSAGE: Final = "exotic circle degenerates to limit set"


def _solve_offset(
    r13: float, beta: float, cos_angle: float, branch: Branch, *, fuchsian: bool
) -> float:
    """
    Root of the corner condition ``(1 - β²)b² - 2r₁₃β·cos(π/n)·b + (1 - r₁₃²) = 0``.

    The discriminant equals ``defect / ((s + 1)(t + 1))``, so both roots are
    real and positive for a discrete datum. The inner root is taken from the
    product of the roots.
    """
    half_slope = r13 * beta * cos_angle
    leading = 1.0 - beta * beta
    if fuchsian:
        return half_slope / leading
    discriminant = half_slope * half_slope - leading * (1.0 - r13 * r13)
    outer = half_slope + math.sqrt(max(discriminant, 0.0))
    if branch is Branch.OUTER:
        return outer / leading
    return (1.0 - r13 * r13) / outer


def fuchsian_defect(d: QuadGroupData, /) -> float:
    return d.fuchsian_defect


@validate_call
def solve_quadrilateral(
    n: Annotated[int, Field(ge=3)],
    s: Annotated[float, Field(gt=1)],
    t: Annotated[float, Field(gt=1)],
    branch: Branch = Branch.OUTER,
) -> QuadGroupData:
    """
    Builds the quadrilateral datum for ``(n, s, t)``.

    Raises :class:`NotDiscreteDatumError` when ``(s-1)(t-1) > 4cos²(π/n)``
    and :class:`SolverError` when the constructed circles miss a constraint.
    """
    defect = fuchsian_defect_value(n, s, t)
    if defect < -FUCHSIAN_TOLERANCE:
        raise NotDiscreteDatumError(n, s, t, defect)
    fuchsian = abs(defect) <= FUCHSIAN_TOLERANCE

    r13 = math.sqrt(2.0 / (s + 1.0))
    beta = math.sqrt(2.0 / (t + 1.0))
    cos_angle = math.cos(math.pi / n)
    b = _solve_offset(r13, beta, cos_angle, branch, fuchsian=fuchsian)
    r24 = beta * b

    c1 = GenCircle.from_center_radius(1.0, r13)
    c2 = GenCircle.from_center_radius(1j * b, r24)
    c3 = GenCircle.from_center_radius(-1.0, r13)
    c4 = GenCircle.from_center_radius(-1j * b, r24)
    residuals = {
        "corner_12": inversive_distance(c1, c2) - cos_angle,
        "corner_23": inversive_distance(c2, c3) - cos_angle,
        "corner_34": inversive_distance(c3, c4) - cos_angle,
        "corner_41": inversive_distance(c4, c1) - cos_angle,
        "s": inversive_distance(c1, c3) - s,
        "t": inversive_distance(c2, c4) - t,
    }
    if max(abs(r) for r in residuals.values()) > CONSTRAINT_TOLERANCE:
        msg = "quadrilateral constraints not met"
        raise SolverError(msg, residuals=residuals)

    tau1, tau2, tau3, tau4 = (inversion_in(c) for c in (c1, c2, c3, c4))
    xi = compose(tau3, tau1)
    eta = compose(tau4, tau2)

    # fixed points are snapped onto the symmetry axes they lie on exactly
    _, eta_repelling = fixed_points(eta)
    p = 1j * math.copysign(b * math.sqrt(1.0 - beta * beta), eta_repelling.imag)
    _, xi_repelling = fixed_points(xi)
    q = complex(math.copysign(math.sqrt(1.0 - r13 * r13), xi_repelling.real))

    exotic_c: GenCircle | None = None
    limit_c: GenCircle | None = None
    if not fuchsian:
        exotic_c = circle_through(q, -q, p)
        limit_c = _FrameOrbit(eta, exotic_c).limit()

    data = QuadGroupData(
        n=n, s=s, t=t, branch=branch, offset=b, radius13=r13, radius24=r24,
        c1=c1, c2=c2, c3=c3, c4=c4,
        tau1=tau1, tau2=tau2, tau3=tau3, tau4=tau4,
        xi=xi, eta=eta,
        p=p, p_prime=-p, q=q, q_prime=-q,
        exotic_c=exotic_c, limit_c=limit_c,
    )  # fmt: skip
    _logger.info(
        "Solved quadrilateral n=%d s=%r t=%r (%s): b=%.12g, defect=%.3e%s",
        n, s, t, branch, b, defect, ", Fuchsian" if fuchsian else "",
    )  # fmt: skip
    return data


def exotic_circle(d: QuadGroupData, /) -> GenCircle:
    if d.exotic_c is None:
        raise DegenerateError(_FUCHSIAN_MESSAGE)
    return d.exotic_c


def limit_circle(d: QuadGroupData, /) -> GenCircle:
    if d.limit_c is None:
        raise DegenerateError(_FUCHSIAN_MESSAGE)
    return d.limit_c


@final
class _FrameOrbit:
    """
    Forward images ``mᵏ·C`` of a circle ``C`` through the repelling fixed point
    of a hyperbolic map ``m``, evaluated where ``m`` is a dilation.

    The frame ``S(z) = (z - p_rep)/(z - p_att)`` conjugates ``m`` to ``z ↦ μz``.
    ``S·C`` passes through ``0``, so its constant term is exactly zero and the
    k-th image is ``(A·|μ|⁻ᵏ, B·e^{ikφ}, 0)``.
    """

    __slots__ = ("_frame_inverse", "_hat", "modulus", "phase")

    def __init__(self, m: MoebiusMap, circle: GenCircle, /) -> None:
        attracting, repelling = fixed_points(m)
        if is_infinite(attracting) or is_infinite(repelling):
            msg = "frame requires finite fixed points"
            raise DegenerateError(msg)
        frame = MoebiusMap(1.0, -repelling, 1.0, -attracting)
        self._frame_inverse = frame.inverse()
        hat = apply_circle(frame, circle)
        if abs(hat.D) > _INCIDENCE_TOLERANCE:
            msg = f"circle misses the repelling fixed point (residual {hat.D!r})"
            raise DegenerateError(msg)
        self._hat = GenCircle(hat.A, hat.B, 0.0)

        multiplier = 1.0 / (m.c * repelling + m.d) ** 2
        self.modulus = abs(multiplier)
        phase = cmath.phase(multiplier)
        self.phase = 0.0 if abs(phase) <= _PHASE_TOLERANCE else phase

    def image(self, k: int, /) -> GenCircle:
        return apply_circle(
            self._frame_inverse,
            GenCircle(
                self._hat.A * self.modulus ** (-k),
                self._hat.B * cmath.exp(1j * k * self.phase),
                0.0,
            ),
        )

    def limit(self) -> GenCircle:
        return apply_circle(self._frame_inverse, GenCircle(0.0, self._hat.B, 0.0))


def boundary_orbit(
    d: QuadGroupData, depth: int = DEFAULT_BOUNDARY_DEPTH, /
) -> list[ComplexPoint]:
    """
    ``⟨τ₁, τ₃⟩·p`` for reduced words of length ``≤ depth``, followed by ``q`` and
    ``q′``: the depth-bounded approximation of ``Λ ∩ C``.
    """
    points: list[ComplexPoint] = [d.p]
    for pair in ((d.tau1, d.tau3), (d.tau3, d.tau1)):
        z = d.p
        for reflection in itertools.islice(itertools.cycle(pair), depth):
            z = apply_point(reflection, z)
            points.append(z)
    points.extend((d.q, d.q_prime))
    return points


def isolation_radius(d: QuadGroupData, depth: int = DEFAULT_BOUNDARY_DEPTH, /) -> float:
    """Chordal distance from ``p`` to the rest of the approximated ``Λ ∩ C``."""
    return min(
        distance
        for z in boundary_orbit(d, depth)[1:]
        if (distance := chordal_distance(d.p, z)) > 0.0
    )


def _check_dynamic_range(k_max: int, modulus: float, first: float) -> None:
    """
    Rejects ``k_max`` when ``|μ|^k_max`` overflows binary64, and also when the
    predicted ``d(k_max)`` falls below ``64·eps``, where ``circle_distance``
    can no longer resolve a strict decrease.
    """
    if k_max * math.log(modulus) >= LOG_FLOAT_MAX:
        msg = f"dynamic range exceeded: |μ|^{k_max} overflows binary64"
        raise DynamicRangeError(msg)
    predicted = first * modulus ** (-(k_max - 1))
    if predicted < _RESOLUTION_FACTOR * EPSILON:
        msg = (
            f"dynamic range exceeded: d(k={k_max}) ≈ {predicted:.3e} "
            "is below binary64 resolution"
        )
        raise DynamicRangeError(msg)


@validate_call
def verify_accumulation(
    d: QuadGroupData,
    k_max: Annotated[int, Field(ge=3)] = DEFAULT_K_MAX,
    tol: Annotated[float, Field(gt=0)] = DEFAULT_ACCUMULATION_TOLERANCE,
    *,
    boundary_depth: Annotated[int, Field(ge=1)] = DEFAULT_BOUNDARY_DEPTH,
    workers: Annotated[int, Field(ge=1)] | None = None,
) -> AccumulationReport:
    """
    Measures how ``η̃ᵏ·C`` and ``η̃⁻ᵏτ₂·C`` approach ``C′`` and how isolated
    ``p`` is in ``Λ ∩ C``.
    """
    c = exotic_circle(d)
    c_prime = limit_circle(d)
    forward = _FrameOrbit(d.eta, c)
    backward = _FrameOrbit(d.eta.inverse(), apply_circle(d.tau2, c))

    first = circle_distance(forward.image(1), c_prime)
    _check_dynamic_range(k_max, forward.modulus, first)

    ks = range(1, k_max + 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        distances = list(pool.map(lambda k: circle_distance(forward.image(k), c_prime), ks))
        odd = list(pool.map(lambda k: circle_distance(backward.image(k), c_prime), ks))

    ratios = [later / earlier for earlier, later in itertools.pairwise(distances)]
    expected_ratio = 1.0 / forward.modulus
    ratio_k = min(RATIO_CHECK_K, k_max)
    ratio_error = abs(ratios[ratio_k - 2] / expected_ratio - 1.0)
    radius = isolation_radius(d, boundary_depth)

    checks = {
        "distances_positive": CheckResult.above(min(distances), 0.0),
        "distances_decreasing": CheckResult.flag(
            all(b < a for a, b in itertools.pairwise(distances[1:]))
        ),
        "odd_distances_decreasing": CheckResult.flag(
            all(b < a for a, b in itertools.pairwise(odd[1:]))
        ),
        "contraction_ratio": CheckResult.within(ratio_error, RATIO_TOLERANCE),
        "converged": CheckResult.below(distances[-1], tol),
        "limit_stabilized_by_eta": CheckResult.within(
            circle_distance(apply_circle(d.eta, c_prime), c_prime), STABILIZER_TOLERANCE
        ),
        "limit_stabilized_by_tau2": CheckResult.within(
            circle_distance(apply_circle(d.tau2, c_prime), c_prime), STABILIZER_TOLERANCE
        ),
        "limit_stabilized_by_tau4": CheckResult.within(
            circle_distance(apply_circle(d.tau4, c_prime), c_prime), STABILIZER_TOLERANCE
        ),
        "eta_moves_exotic_circle": CheckResult.above(
            circle_distance(apply_circle(d.eta, c), c), MOVED_THRESHOLD
        ),
        "p_isolated": CheckResult.above(radius, 0.0),
    }
    report = AccumulationReport(
        distances=[AccumulationStep(k=k, distance=x) for k, x in zip(ks, distances)],
        odd_distances=[AccumulationStep(k=k, distance=x) for k, x in zip(ks, odd)],
        ratios=ratios,
        expected_ratio=expected_ratio,
        tolerance=tol,
        converged=distances[-1] < tol,
        isolation_radius=radius,
        boundary_depth=boundary_depth,
        checks=checks,
    )
    _logger.info(
        "Accumulation up to k=%d: final distance %.3e, ratio error %.2e",
        k_max, distances[-1], ratio_error,
    )  # fmt: skip
    return report


def generator_set(d: QuadGroupData, /) -> GeneratorSet:
    """The four reflections as an orbit generating set labelled ``t1``..``t4``."""
    return GeneratorSet(d.reflections, d.labels)


def summarize_limit_set(d: QuadGroupData, cloud: PointCloud, /) -> LimitSetSummary:
    """Best-fit circle deviation of a limit set sample and whether ``p`` sits on it."""
    if cloud.size < 3:
        return LimitSetSummary(
            points=cloud.size,
            truncated=cloud.truncated,
            fuchsian=d.is_fuchsian,
            fit_deviation=0.0,
        )
    circle, deviation = cloud.fit()
    p_distance = float(circle.distance(stereographic(d.p))[0])
    return LimitSetSummary(
        points=cloud.size,
        truncated=cloud.truncated,
        fuchsian=d.is_fuchsian,
        fit_deviation=deviation,
        p_on_fit_circle=p_distance <= LIMIT_FIT_TOLERANCE,
    )
