from __future__ import annotations

import pytest

from exotic.geometry import GenCircle
from exotic.groups import solve_quadrilateral
from exotic.models import QuadGroupData


@pytest.fixture
def unit_circle() -> GenCircle:
    return GenCircle.unit_circle()


@pytest.fixture(scope="module")
def exotic_datum() -> QuadGroupData:
    """``(3, 2, 1.5)``: strictly inside the discreteness bound."""
    return solve_quadrilateral(3, 2.0, 1.5)


@pytest.fixture(scope="module")
def fuchsian_datum() -> QuadGroupData:
    """``(3, 2, 2)``: ``(s - 1)(t - 1) = 4cos²(π/3)``."""
    return solve_quadrilateral(3, 2.0, 2.0)
