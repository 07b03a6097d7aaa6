"""
The one-parameter family of "lunchbox" polyhedra and the computation of the
parameter ``t₀ ≈ 1.202`` at which the plane orthogonal to Faces 2, 4, 7 and 8
becomes tangent at infinity to the totally geodesic plane ``P̃′``.

With ``u = sqrt((t + 1)/2)`` everything below is an explicit function of ``t``:
face normals, the normal of ``P̃′``, the candidate normal ``x`` of ``P̃`` and the
polynomial chain that reduces ``⟨x, x⟩ = 1`` to a cubic in ``t``.

Long polynomials are kept as ascending coefficient tuples and evaluated with
Horner's scheme.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, Annotated, Final, NamedTuple, final

import numpy as np
import sympy as sp
from numpy.polynomial import polynomial as npoly
from pydantic import Field, validate_call

from exotic.constants import DEFAULT_TOLERANCE, LUNCHBOX_T_MAX, TOTALLY_GEODESIC_T
from exotic.exceptions import GeometricRegimeError, SolverError
from exotic.geometry.lorentz import (
    LorentzVec,
    PlaneNormal,
    minkowski_inner,
    normal_to_circle,
)
from exotic.geometry.moebius import inversive_distance
from exotic.models.reports import CheckResult, TangencyReport, TangencyResiduals
from exotic.utils import relative_residual

if TYPE_CHECKING:
    from typing_extensions import Self

_logger = logging.getLogger(__name__)

H_COEFFICIENTS: Final = (-625.0, -2330.0, -3237.0, 916.0, 20.0, 72.0)
"""Quintic factor ``h(t)``, ascending powers."""
CUBIC_COEFFICIENTS: Final = (-325.0, 200.0, -28.0, 72.0)
F_COEFFICIENTS: Final = (-625.0, 11153.0, -53284.0, 65632.0, -38720.0, 22144.0, -9216.0)
"""``f`` as a polynomial in ``u²``."""
G_COEFFICIENTS: Final = (900.0, -7092.0, 9072.0, -4032.0, 1152.0)
"""``g / u`` as a polynomial in ``u²``."""
P3_COEFFICIENTS: Final = (-625.0, 944.0, -976.0, 576.0)
P5_COEFFICIENTS: Final = (-625.0, 3586.0, -6585.0, 3112.0, -1360.0, 576.0)
RADICAND_COEFFICIENTS: Final = (-6.0, 29.0, 16.0)
"""``(u² + 2)(16u² - 3)`` in ``u²``."""
RADICAND_MISPRINT_COEFFICIENTS: Final = (-6.0, -29.0, 16.0)

ROOT_INTERVAL: Final = (1.0, 2.0)
BISECTION_WIDTH: Final = 1e-14
_NEWTON_STEPS: Final = 2
_REGIME_SLACK: Final = 1e-12
_GUARD_TOLERANCE: Final = 1e-12
_H_SAMPLES: Final = 1000

_SQRT3: Final = math.sqrt(3.0)


def _horner(coefficients: tuple[float, ...], x: float, /) -> float:
    return float(npoly.polyval(x, coefficients))


@final
class LunchboxParams(NamedTuple):
    t: float
    u: float
    v: float

    @classmethod
    def from_t(cls, t: float, /) -> Self:
        if not 1.0 < t < LUNCHBOX_T_MAX:
            msg = f"outside geometric regime: t = {t!r} not in (1, {LUNCHBOX_T_MAX:.6f})"
            raise GeometricRegimeError(msg)
        u = math.sqrt((t + 1.0) / 2.0)
        usq = u * u
        v = (3.0 * u + math.sqrt((usq + 2.0) * (16.0 * usq - 3.0))) / (8.0 * usq - 2.0)
        return cls(t, u, v)

    @property
    def q(self) -> float:
        """``sqrt(u² - 1)``, the common denominator of the normals."""
        return math.sqrt(self.u * self.u - 1.0)

    @property
    def w(self) -> float:
        return math.sqrt(self.u * self.u + 2.0)

    @property
    def radicand(self) -> float:
        """``4u² + 4v² - 3 - 4u²v²``, clamped at zero within rounding."""
        usq, vsq = self.u * self.u, self.v * self.v
        value = 4.0 * usq + 4.0 * vsq - 3.0 - 4.0 * usq * vsq
        if value < -_REGIME_SLACK * max(1.0, 4.0 * usq * vsq):
            msg = f"outside geometric regime: 4u² + 4v² - 3 - 4u²v² = {value!r}"
            raise GeometricRegimeError(msg)
        return max(value, 0.0)

    @property
    def is_totally_geodesic(self) -> bool:
        return abs(self.t - TOTALLY_GEODESIC_T) <= DEFAULT_TOLERANCE


@final
class PlaneNormalSolution(NamedTuple):
    x0: float
    x2: float
    x3: float
    tangencyResidual: float
    unitResidual: float
    x2_displayed: float

    @property
    def vector(self) -> LorentzVec:
        return LorentzVec(self.x0, 0.0, self.x2, self.x3)


@final
class FaceNormals(NamedTuple):
    n2: LorentzVec
    n4: LorentzVec
    n7: LorentzVec
    n8: LorentzVec


def face_normals(p: LunchboxParams, /) -> FaceNormals:
    root = math.sqrt(p.radicand)
    denominator = 2.0 * p.u * p.u - 2.0
    guard = -1.0 + p.u * root
    if abs(guard) <= _GUARD_TOLERANCE:
        msg = f"outside geometric regime: -1 + u·sqrt(R) vanishes at t = {p.t!r}"
        raise GeometricRegimeError(msg)

    n2_0 = (p.u - root) / denominator
    n2_3 = guard / denominator
    n7_0 = (p.u * p.u * _SQRT3 - p.w) / denominator
    n7_3 = (p.u * p.w - p.u * _SQRT3) / denominator
    return FaceNormals(
        LorentzVec(n2_0, p.v, 0.0, n2_3),
        LorentzVec(n2_0, -p.v, 0.0, n2_3),
        LorentzVec(n7_0, -_SQRT3 / 2.0, _SQRT3 / 2.0, n7_3),
        LorentzVec(n7_0, _SQRT3 / 2.0, _SQRT3 / 2.0, n7_3),
    )


def pprime_normal(p: LunchboxParams, /) -> LorentzVec:
    q = p.q
    if q == 0.0:
        msg = "P̃′ normal is undefined at u = 1 (t = 1)"
        raise GeometricRegimeError(msg)
    return LorentzVec(1.0 / q, 0.0, 0.0, -p.u / q)


def solve_plane_normal(p: LunchboxParams, /) -> PlaneNormalSolution:
    """
    Closed-form ``x`` orthogonal to the four face normals with ``⟨x, P̃′⟩ = 1``.

    ``x₂`` carries the sign that makes ``x`` orthogonal to Faces 7 and 8; the
    printed closed form has the opposite sign and is kept as ``x2_displayed``.
    """
    root = math.sqrt(p.radicand)
    q = p.q
    x0 = (1.0 - p.u * root) / q
    x3 = (root - p.u) / q
    x2 = (p.w - p.u * _SQRT3 * root) / (_SQRT3 * q)
    return PlaneNormalSolution(
        x0=x0,
        x2=x2,
        x3=x3,
        tangencyResidual=-x0 / q - x3 * p.u / q - 1.0,
        unitResidual=-x0 * x0 + x2 * x2 + x3 * x3 - 1.0,
        x2_displayed=-x2,
    )


def orthogonality_residuals(
    p: LunchboxParams, x: LorentzVec, /
) -> tuple[float, float, float, float]:
    n2, n4, n7, n8 = face_normals(p)
    return (
        minkowski_inner(x, n2),
        minkowski_inner(x, n4),
        minkowski_inner(x, n7),
        minkowski_inner(x, n8),
    )


def h_poly(t: float, /) -> float:
    return _horner(H_COEFFICIENTS, t)


def h_second_derivative(t: float, /) -> float:
    return _horner(tuple(npoly.polyder(H_COEFFICIENTS, 2)), t)


def cubic(t: float, /) -> float:
    return _horner(CUBIC_COEFFICIENTS, t)


def cubic_derivative(t: float, /) -> float:
    return _horner(tuple(npoly.polyder(CUBIC_COEFFICIENTS)), t)


def f_poly(u: float, /) -> float:
    return _horner(F_COEFFICIENTS, u * u)


def g_poly(u: float, /) -> float:
    return u * _horner(G_COEFFICIENTS, u * u)


@final
class FactorIdentityAudit(NamedTuple):
    residual: float
    """Largest relative residual along the chain, ``+29u²`` radicand."""
    plus_residual: float
    minus_residual: float
    matching_variant: str


def factor_identity_audit(t: float, /) -> FactorIdentityAudit:
    """
    Evaluates each link of the reduction of ``⟨x, x⟩ = 1`` to the cubic and
    tells which sign of the ``29u²`` term in ``f² - g²·(16u⁴ ± 29u² - 6)``
    agrees with the factored form.
    """
    p = LunchboxParams.from_t(t)
    usq = p.u * p.u
    radicand = p.radicand
    wsq = usq + 2.0
    lhs = 9.0 * radicand**2 + wsq**2 + 6.0 * radicand * wsq - 12.0 * usq * wsq * radicand

    f, g = f_poly(p.u), g_poly(p.u)
    s_plus = _horner(RADICAND_COEFFICIENTS, usq)
    s_minus = _horner(RADICAND_MISPRINT_COEFFICIENTS, usq)
    scale = 4.0 * usq - 1.0
    via_fg = (usq - 1.0) / scale**4 * (f + g * math.sqrt(s_plus))

    factored = scale**4 * _horner(P3_COEFFICIENTS, usq) * _horner(P5_COEFFICIENTS, usq)
    in_t = 0.25 * (1.0 + 2.0 * t) ** 4 * cubic(t) * h_poly(t)
    plus = relative_residual(f * f - g * g * s_plus, factored)
    minus = relative_residual(f * f - g * g * s_minus, factored)

    residual = max(
        relative_residual(lhs, via_fg),
        plus,
        relative_residual(factored, in_t),
    )
    return FactorIdentityAudit(
        residual=residual,
        plus_residual=plus,
        minus_residual=minus,
        matching_variant="+29u²" if plus <= minus else "-29u²",
    )


def factor_identity_check(t: float, /) -> float:
    return factor_identity_audit(t).residual


@final
class RootBracket(NamedTuple):
    root: float
    lower: float
    upper: float


def bisect_cubic(width: float = BISECTION_WIDTH, /) -> RootBracket:
    lower, upper = ROOT_INTERVAL
    f_lower, f_upper = cubic(lower), cubic(upper)
    if f_lower * f_upper > 0.0:
        msg = "cubic has no sign change on the root interval"
        raise SolverError(msg, residuals={"lower": f_lower, "upper": f_upper})
    steps = 0
    while upper - lower > width:
        middle = 0.5 * (lower + upper)
        if middle in (lower, upper):
            break
        f_middle = cubic(middle)
        if f_middle == 0.0:
            lower = upper = middle
            break
        if (f_middle < 0.0) == (f_lower < 0.0):
            lower, f_lower = middle, f_middle
        else:
            upper = middle
        steps += 1
    _logger.debug("Bisection finished after %d steps: [%r, %r]", steps, lower, upper)
    return RootBracket(0.5 * (lower + upper), lower, upper)


def count_cubic_roots(lower: float = 1.0, upper: float = 2.0, /) -> int:
    """Exact count of real roots of the cubic in ``[lower, upper]`` (Sturm sequence)."""
    t = sp.Symbol("t")
    poly = sp.Poly(
        sum(sp.Integer(int(c)) * t**k for k, c in enumerate(CUBIC_COEFFICIENTS)), t
    )
    return int(poly.count_roots(sp.Rational(lower), sp.Rational(upper)))


@validate_call
def find_t0(
    *, width: Annotated[float, Field(gt=0, lt=1)] = BISECTION_WIDTH
) -> float:
    """Root of the cubic in ``(1, 2)``: bisection, then Newton polish inside the bracket."""
    bracket = bisect_cubic(width)
    root = bracket.root
    for _ in range(_NEWTON_STEPS):
        slope = cubic_derivative(root)
        candidate = root - cubic(root) / slope
        if not bracket.lower <= candidate <= bracket.upper:
            break
        root = candidate
    return root


def closed_form_t0() -> float:
    """Cardano's formula for the real root of ``72t³ - 28t² + 200t - 325``."""
    radical = 25515.0 * math.sqrt(773.0)
    return float(
        (7.0 - np.cbrt((radical - 654761.0) / 2.0) + np.cbrt((radical + 654761.0) / 2.0))
        / 54.0
    )


def h_negative_on_interval(samples: int = _H_SAMPLES, /) -> bool:
    grid = np.linspace(*ROOT_INTERVAL, samples)
    return bool(np.all(npoly.polyval(grid, H_COEFFICIENTS) < 0.0))


@validate_call
def verify_exotic_tangency(
    t0: Annotated[float, Field(gt=1, lt=LUNCHBOX_T_MAX)] | None = None,
    *,
    tolerance: Annotated[float, Field(gt=0)] = 1e-9,
    circle_tolerance: Annotated[float, Field(gt=0)] = 1e-8,
) -> TangencyReport:
    """
    Checks at ``t0`` (default: the computed root) that ``x`` is a unit normal
    orthogonal to Faces 2, 4, 7 and 8 and that ``P̃`` and ``P̃′`` are tangent at
    infinity, both in E³,¹ and on the Riemann sphere.
    """
    bracket = bisect_cubic()
    t0_bisection = find_t0()
    t0_closed_form = closed_form_t0()
    t = t0_bisection if t0 is None else t0

    p = LunchboxParams.from_t(t)
    solution = solve_plane_normal(p)
    x = solution.vector
    orthogonality = orthogonality_residuals(p, x)
    prime = pprime_normal(p)

    x_hat = PlaneNormal.from_vector(x)
    circle_tangency = (
        inversive_distance(normal_to_circle(x_hat), normal_to_circle(PlaneNormal(prime)))
        - 1.0
    )
    displayed = LorentzVec(x.x0, 0.0, solution.x2_displayed, x.x3)
    displayed_fits = (
        max(abs(r) for r in orthogonality_residuals(p, displayed)) <= tolerance
    )
    roots = count_cubic_roots(*ROOT_INTERVAL)
    h_at_t = h_poly(t)

    checks = {
        f"orthogonality_{face}": CheckResult.within(value, tolerance)
        for face, value in zip((2, 4, 7, 8), orthogonality)
    }
    checks |= {
        "unit": CheckResult.within(solution.unitResidual, tolerance),
        "tangency": CheckResult.within(abs(minkowski_inner(x, prime)) - 1.0, tolerance),
        "circle_tangency": CheckResult.within(circle_tangency, circle_tolerance),
        "closed_form_agreement": CheckResult.within(t0_bisection - t0_closed_form, 1e-12),
        "unique_root": CheckResult.flag(roots == 1),
        "h_negative": CheckResult.below(h_at_t, 0.0),
    }
    report = TangencyReport(
        t=t,
        t0_bisection=t0_bisection,
        t0_closed_form=t0_closed_form,
        bracket=(bracket.lower, bracket.upper),
        residuals=TangencyResiduals(
            orthogonality=orthogonality,
            unit=solution.unitResidual,
            tangency=solution.tangencyResidual,
            circle_tangency=circle_tangency,
        ),
        h_endpoint_values=(h_poly(1.0), h_poly(2.0)),
        h_at_t=h_at_t,
        roots_in_interval=roots,
        x=tuple(x),
        x2_displayed=solution.x2_displayed,
        x2_sign_consistent=displayed_fits,
        checks=checks,
    )
    _logger.info(
        "Tangency at t = %.15g: unit residual %.3e, %s",
        t, solution.unitResidual, "passed" if report.passed else "failed",
    )  # fmt: skip
    return report
