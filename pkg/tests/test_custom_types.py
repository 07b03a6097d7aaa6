from __future__ import annotations

import pytest
from pydantic import BaseModel, TypeAdapter, ValidationError

from exotic.constants import Orientation
from exotic.geometry import INFINITY, GenCircle, MoebiusMap, inversion_in
from exotic.models import Point


@pytest.fixture(scope="module")
def point_adapter() -> TypeAdapter[Point]:
    return TypeAdapter(Point)


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        ([1.0, 2.0], 1 + 2j),
        ((0, -1), -1j),
        (3, 3 + 0j),
        (0.5 + 0.5j, 0.5 + 0.5j),
        ("inf", INFINITY),
        (" INF ", INFINITY),
    ],
)
def test_point_validate(
    value: object, expected: complex, point_adapter: TypeAdapter[Point]
) -> None:
    assert point_adapter.validate_python(value) == expected


@pytest.mark.parametrize("value", ["1+2j", [1.0], [1.0, 2.0, 3.0], True, None])
def test_point_invalid(value: object, point_adapter: TypeAdapter[Point]) -> None:
    with pytest.raises(ValidationError):
        point_adapter.validate_python(value)


def test_point_dump(point_adapter: TypeAdapter[Point]) -> None:
    assert point_adapter.dump_python(1 - 2j) == [1.0, -2.0]
    assert point_adapter.dump_python(INFINITY) == "inf"
    assert point_adapter.dump_json(INFINITY) == b'"inf"'


class TestGenCircleField:
    @pytest.fixture(autouse=True)
    def setup(self) -> None:
        self.ta = TypeAdapter(GenCircle)

    def test_from_mapping(self) -> None:
        circle = self.ta.validate_python({"A": 2.0, "B_re": 0.0, "B_im": 0.0, "D": -2.0})
        assert circle == GenCircle.unit_circle()

    def test_instance_passes_through(self) -> None:
        circle = GenCircle.real_axis()
        assert self.ta.validate_python(circle) is circle

    @pytest.mark.parametrize(
        "value",
        [
            {"A": 1.0, "B_re": 0.0, "B_im": 0.0, "D": 1.0},
            {"A": 1.0, "B_re": 0.0},
            [1.0, 0.0, 0.0, -1.0],
        ],
    )
    def test_invalid(self, value: object) -> None:
        with pytest.raises(ValidationError):
            self.ta.validate_python(value)

    def test_dump(self) -> None:
        assert self.ta.dump_python(GenCircle.unit_circle()) == {
            "A": 1.0, "B_re": 0.0, "B_im": 0.0, "D": -1.0,
        }  # fmt: skip


class TestMoebiusMapField:
    @pytest.fixture(autouse=True)
    def setup(self) -> None:
        self.ta = TypeAdapter(MoebiusMap)

    def test_from_mapping(self) -> None:
        m = self.ta.validate_python({
            "matrix": [[[0.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]],
            "orientation": "anti",
        })  # fmt: skip
        assert m.orientation is Orientation.ANTIHOLOMORPHIC
        assert m.is_close(inversion_in(GenCircle.unit_circle()))

    def test_orientation_defaults_to_holomorphic(self) -> None:
        m = self.ta.validate_python({"matrix": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]]})
        assert m.is_holomorphic

    def test_singular(self) -> None:
        with pytest.raises(ValidationError):
            self.ta.validate_python({"matrix": [[[1, 0], [2, 0]], [[2, 0], [4, 0]]]})

    def test_in_model(self) -> None:
        class Pair(BaseModel):
            first: MoebiusMap
            second: MoebiusMap | None = None

        pair = Pair.model_validate({"first": MoebiusMap.IDENTITY.to_dict()})
        assert pair.first == MoebiusMap.IDENTITY
        assert pair.model_dump()["first"]["orientation"] == "holo"
