from __future__ import annotations

import math
from typing import Annotated, Any, final

from pydantic import (
    BaseModel,
    Field,
    NonNegativeFloat,
    NonNegativeInt,
    PositiveInt,
    computed_field,
)

from exotic.constants import SCHEMA_VERSION
from exotic.exceptions import CheckFailedError


@final
class CheckResult(BaseModel, frozen=True):
    passed: bool
    residual: float
    tolerance: float

    @classmethod
    def within(cls, residual: float, tolerance: float, /) -> CheckResult:
        """Passes when ``|residual| <= tolerance`` and the residual is finite."""
        return cls(
            passed=math.isfinite(residual) and abs(residual) <= tolerance,
            residual=residual,
            tolerance=tolerance,
        )

    @classmethod
    def above(cls, value: float, bound: float, /) -> CheckResult:
        return cls(passed=value > bound, residual=value, tolerance=bound)

    @classmethod
    def below(cls, value: float, bound: float, /) -> CheckResult:
        return cls(passed=value < bound, residual=value, tolerance=bound)

    @classmethod
    def flag(cls, passed: bool, /) -> CheckResult:  # noqa: FBT001
        return cls(passed=passed, residual=0.0 if passed else 1.0, tolerance=0.0)


class _CheckedReport(BaseModel, frozen=True):
    checks: dict[str, CheckResult]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks.values())

    def failed_checks(self) -> list[str]:
        return [name for name, check in self.checks.items() if not check.passed]

    def raise_for_failures(self) -> None:
        if failed := self.failed_checks():
            raise CheckFailedError(failed)


@final
class TangencyResiduals(BaseModel, frozen=True):
    orthogonality: tuple[float, float, float, float]
    """``⟨x, n⟩`` for the Face 2, 4, 7 and 8 normals, in that order."""
    unit: float
    tangency: float
    circle_tangency: float
    """``inversive_distance(∂P̃, ∂P̃′) - 1`` for the normalized vector."""


@final
class TangencyReport(_CheckedReport, frozen=True):
    t: float
    t0_bisection: float
    t0_closed_form: float
    bracket: tuple[float, float]
    residuals: TangencyResiduals
    h_endpoint_values: tuple[float, float]
    h_at_t: float
    roots_in_interval: NonNegativeInt
    """Real roots of the cubic in ``[1, 2]`` counted exactly; certification needs 1."""
    x: tuple[float, float, float, float]
    x2_displayed: float
    x2_sign_consistent: bool


@final
class AccumulationStep(BaseModel, frozen=True):
    k: PositiveInt
    distance: NonNegativeFloat


@final
class AccumulationReport(_CheckedReport, frozen=True):
    distances: list[AccumulationStep]
    """Chordal Hausdorff distances ``d(η̃ᵏ·C, C′)``."""
    odd_distances: list[AccumulationStep]
    """Chordal Hausdorff distances ``d(η̃⁻ᵏτ₂·C, C′)``."""
    ratios: list[float]
    expected_ratio: float
    tolerance: float
    converged: bool
    isolation_radius: NonNegativeFloat
    boundary_depth: PositiveInt


@final
class ClosureReport(_CheckedReport, frozen=True):
    sample_size: NonNegativeInt
    misses: NonNegativeInt
    """Images of retained items absent from the retained set."""
    pruned_misses: NonNegativeInt
    """Misses explained by an image below the diameter threshold."""
    epsilon: float


@final
class LimitSetSummary(BaseModel, frozen=True):
    points: NonNegativeInt
    truncated: bool
    fuchsian: bool
    fit_deviation: NonNegativeFloat
    """Largest chordal distance from a limit point to the best-fit circle."""
    p_on_fit_circle: bool | None = None


@final
class RunReport(BaseModel, frozen=True, populate_by_name=True):
    schema_version: Annotated[int, Field(SCHEMA_VERSION, alias="schema")]
    command: str
    inputs: dict[str, Any] = {}
    outputs: list[str] = []
    checks: dict[str, CheckResult] = {}
    payload: dict[str, Any] = {}
    wall_time: NonNegativeFloat = 0.0
    exit_code: int = 0
    error: str | None = None

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)
