from __future__ import annotations

import math
from typing import Annotated, final

from pydantic import BaseModel, Field, PositiveFloat, computed_field

from exotic.constants import FUCHSIAN_TOLERANCE, Branch
from exotic.geometry.moebius import GenCircle, MoebiusMap

from .custom_types import Point


def fuchsian_defect_value(n: int, s: float, t: float, /) -> float:
    """``4cos²(π/n) - (s - 1)(t - 1)``; zero exactly for Fuchsian data."""
    return 4.0 * math.cos(math.pi / n) ** 2 - (s - 1.0) * (t - 1.0)


@final
class QuadGroupData(BaseModel, frozen=True, populate_by_name=True):
    """
    Right-angled-at-infinity quadrilateral ``R`` bounded by four circles with
    corner angles ``π/n``, together with its reflection group data.

    ``C₁``/``C₃`` are centred at ``±1`` and ``C₂``/``C₄`` at ``±bi``, so
    ``p``/``p′`` lie on the imaginary axis and ``q``/``q′`` on the real axis.
    """

    n: Annotated[int, Field(ge=3)]
    s: Annotated[float, Field(gt=1)]
    t: Annotated[float, Field(gt=1)]
    branch: Branch = Branch.OUTER
    offset: Annotated[PositiveFloat, Field(alias="b")]
    """Imaginary offset ``b`` of the centres of ``C₂``/``C₄``."""
    radius13: PositiveFloat
    radius24: PositiveFloat

    c1: Annotated[GenCircle, Field(alias="C1")]
    c2: Annotated[GenCircle, Field(alias="C2")]
    c3: Annotated[GenCircle, Field(alias="C3")]
    c4: Annotated[GenCircle, Field(alias="C4")]
    tau1: MoebiusMap
    tau2: MoebiusMap
    tau3: MoebiusMap
    tau4: MoebiusMap
    xi: MoebiusMap
    """``ξ̃``: reflection in ``C₁`` followed by reflection in ``C₃``."""
    eta: MoebiusMap
    """``η̃``: reflection in ``C₂`` followed by reflection in ``C₄``."""

    p: Point
    """Repelling fixed point of ``η̃``."""
    p_prime: Annotated[Point, Field(alias="pPrime")]
    q: Point
    q_prime: Annotated[Point, Field(alias="qPrime")]

    exotic_c: Annotated[GenCircle | None, Field(None, alias="exoticC")]
    limit_c: Annotated[GenCircle | None, Field(None, alias="limitC")]

    @computed_field  # type: ignore[prop-decorator]
    @property
    def fuchsian_defect(self) -> float:
        return fuchsian_defect_value(self.n, self.s, self.t)

    @property
    def is_fuchsian(self) -> bool:
        return abs(self.fuchsian_defect) <= FUCHSIAN_TOLERANCE

    @property
    def circles(self) -> tuple[GenCircle, GenCircle, GenCircle, GenCircle]:
        return (self.c1, self.c2, self.c3, self.c4)

    @property
    def reflections(self) -> tuple[MoebiusMap, MoebiusMap, MoebiusMap, MoebiusMap]:
        return (self.tau1, self.tau2, self.tau3, self.tau4)

    @property
    def labels(self) -> tuple[str, str, str, str]:
        return ("t1", "t2", "t3", "t4")
