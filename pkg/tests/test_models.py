from __future__ import annotations

import json
from pathlib import Path
from typing import Final
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from exotic.constants import Orientation
from exotic.exceptions import SchemaError
from exotic.geometry import GenCircle, MoebiusMap, compose, inversion_in
from exotic.models import (
    GeneratorSet,
    OrbitConfig,
    load_generator_file,
    parse_generator_file,
)
from exotic.models.reports import CheckResult, RunReport, TangencyResiduals

UNIT: Final = '{"A": 1, "B_re": 0, "B_im": 0, "D": -1}'
VALID_DOCUMENT: Final = f"""{{
  "schema": 1,
  "generators": [
    {{"kind": "inversion", "circle": {UNIT}}},
    {{"kind": "mobius", "matrix": [[[2, 0], [0, 0]], [[0, 0], [0.5, 0]]]}}
  ],
  "labels": ["s", "d"],
  "seed": {{"A": 0, "B_re": 1, "B_im": 0, "D": -2}}
}}"""


def _document(*generators: str, extra: str = "") -> str:
    body = ",\n".join(f"    {g}" for g in generators)
    return f'{{\n  "schema": 1,{extra}\n  "generators": [\n{body}\n  ]\n}}'


class TestParseGeneratorFile:
    def test_valid(self) -> None:
        generators, document = parse_generator_file(VALID_DOCUMENT)
        assert generators.labels == ("s", "d")
        assert generators.involutions == (True, False)
        assert generators.generators[0].is_close(inversion_in(GenCircle.unit_circle()))
        assert generators.generators[1].is_close(MoebiusMap(2, 0, 0, 0.5))
        assert document.seed is not None
        assert document.seed.is_line

    def test_default_labels(self) -> None:
        generators, document = parse_generator_file(
            _document(f'{{"kind": "inversion", "circle": {UNIT}}}')
        )
        assert document.labels is None
        assert generators.labels == ("g1",)

    def test_malformed_json(self) -> None:
        with pytest.raises(SchemaError, match="line 3: malformed JSON") as e:
            parse_generator_file('{\n  "schema": 1,\n  "generators": [,]\n}')
        assert e.value.line == 3
        assert e.value.exit_code == 3

    def test_unknown_kind_reports_line(self) -> None:
        text = _document(
            f'{{"kind": "inversion", "circle": {UNIT}}}',
            '{"kind": "rotation", "angle": 1.0}',
        )
        with pytest.raises(SchemaError, match="line 5: generators.1") as e:
            parse_generator_file(text)
        assert e.value.line == 5

    def test_degenerate_circle_reports_line(self) -> None:
        text = _document(
            f'{{"kind": "inversion", "circle": {UNIT}}}',
            f'{{"kind": "inversion", "circle": {UNIT}}}',
            '{"kind": "inversion", "circle": {"A": 1, "B_re": 0, "B_im": 0, "D": 1}}',
        )
        with pytest.raises(SchemaError, match="not a real circle") as e:
            parse_generator_file(text)
        assert e.value.line == 6

    def test_unsupported_schema(self) -> None:
        text = _document(f'{{"kind": "inversion", "circle": {UNIT}}}').replace(
            '"schema": 1', '"schema": 2'
        )
        with pytest.raises(SchemaError, match="unsupported schema 2"):
            parse_generator_file(text)

    def test_empty_generators(self) -> None:
        with pytest.raises(SchemaError, match="generators"):
            parse_generator_file('{"schema": 1, "generators": []}')

    def test_label_count(self) -> None:
        text = _document(
            f'{{"kind": "inversion", "circle": {UNIT}}}', extra='\n  "labels": ["a", "b"],'
        )
        with pytest.raises(SchemaError, match="2 labels given for 1 generators"):
            parse_generator_file(text)

    def test_anti_holomorphic_must_be_involution(self) -> None:
        text = _document(
            '{"kind": "mobius", "matrix": [[[1, 0], [1, 0]], [[0, 0], [1, 0]]], "orientation": "anti"}'
        )
        with pytest.raises(SchemaError, match="is not an involution") as e:
            parse_generator_file(text)
        assert e.value.line is None

    def test_missing_file(self, tmp_path: Path) -> None:
        with pytest.raises(SchemaError, match="cannot read generator file"):
            load_generator_file(tmp_path / "missing.json")

    def test_load(self, tmp_path: Path) -> None:
        path = tmp_path / "gens.json"
        path.write_text(VALID_DOCUMENT, encoding="utf-8")
        generators, _ = load_generator_file(path)
        assert len(generators) == 2


class TestGeneratorSet:
    def test_document_round_trip(self) -> None:
        circles = [GenCircle.from_center_radius(1.0, 0.5), GenCircle.imaginary_axis()]
        original = GeneratorSet(
            [*(inversion_in(c) for c in circles), MoebiusMap(1, 1j, 0, 1)], ["a", "b", "c"]
        )
        document = original.to_document()
        assert [g["kind"] for g in document["generators"]] == ["inversion", "inversion", "mobius"]

        restored, _ = parse_generator_file(json.dumps(document))
        assert restored.labels == original.labels
        for a, b in zip(restored.generators, original.generators):
            assert a.is_close(b, tol=1e-12)
            assert a.orientation == b.orientation

    def test_from_circles_and_mirrors(self) -> None:
        circles = [GenCircle.unit_circle(), GenCircle.real_axis()]
        generators = GeneratorSet.from_circles(circles)
        assert generators.labels == ("g1", "g2")
        for mirror, circle in zip(generators.mirrors(), circles):
            assert mirror.is_close(circle)

    def test_mirrors_skip_holomorphic(self) -> None:
        generators = GeneratorSet([MoebiusMap(1, 1, 0, 1), inversion_in(GenCircle.unit_circle())])
        assert generators.mirrors() == [GenCircle.unit_circle()]

    def test_empty(self) -> None:
        with pytest.raises(ValueError, match="must not be empty"):
            GeneratorSet([])

    def test_label_mismatch(self) -> None:
        with pytest.raises(ValueError, match="1 labels given for 2 generators"):
            GeneratorSet([MoebiusMap.IDENTITY, MoebiusMap(1, 1, 0, 1)], ["x"])

    def test_glide_reflection_rejected(self) -> None:
        glide = compose(MoebiusMap.conjugation(), MoebiusMap(1, 1, 0, 1))
        assert glide.orientation is Orientation.ANTIHOLOMORPHIC
        with pytest.raises(ValueError, match="'g1' is not an involution"):
            GeneratorSet([glide])

    def test_repr(self) -> None:
        generators = GeneratorSet.from_circles([GenCircle.unit_circle()], ["t"])
        assert repr(generators) == "GeneratorSet(labels=['t'])"


class TestOrbitConfig:
    def test_defaults(self) -> None:
        config = OrbitConfig()
        assert config.max_depth == 12
        assert config.min_diameter == 1e-4
        assert config.dedup_epsilon == 1e-9
        assert config.max_items == 5_000_000
        assert config.workers == 1

    def test_aliases(self) -> None:
        config = OrbitConfig.model_validate({"maxDepth": 3, "minDiameter": 0.01})
        assert config.max_depth == 3
        assert config.echo() == {
            "maxDepth": 3,
            "minDiameter": 0.01,
            "dedupEpsilon": 1e-9,
            "maxItems": 5_000_000,
        }
        assert "workers" not in OrbitConfig(workers=4).echo()

    @pytest.mark.parametrize(
        "values",
        [{"max_depth": -1}, {"min_diameter": 2.0}, {"dedup_epsilon": 0.0}, {"max_items": 0}, {"workers": 0}],
    )
    def test_bounds(self, values: dict[str, float]) -> None:
        with pytest.raises(ValidationError):
            OrbitConfig(**values)

    def test_frozen(self) -> None:
        with pytest.raises(ValidationError):
            OrbitConfig().max_depth = 2  # type: ignore[misc]

    def test_from_env(self) -> None:
        with patch(
            "exotic.models.config.env_overrides",
            return_value={"max_depth": "5", "workers": "3"},
        ):
            config = OrbitConfig.from_env(workers=2, max_items=None)
        assert config.max_depth == 5
        assert config.workers == 2
        assert config.max_items == OrbitConfig.DEFAULT_MAX_ITEMS


class TestReports:
    @pytest.mark.parametrize(
        ("check", "passed"),
        [
            (CheckResult.within(1e-12, 1e-9), True),
            (CheckResult.within(-1e-12, 1e-9), True),
            (CheckResult.within(float("nan"), 1e-9), False),
            (CheckResult.above(0.5, 0.0), True),
            (CheckResult.below(0.5, 0.0), False),
            (CheckResult.flag(False), False),
        ],
    )
    def test_check_result(self, check: CheckResult, passed: bool) -> None:  # noqa: FBT001
        assert check.passed is passed

    def test_run_report_json(self) -> None:
        report = RunReport(
            command="solve-t0",
            checks={"unit": CheckResult.within(0.0, 1e-9)},
            payload={"residuals": TangencyResiduals(
                orthogonality=(0.0, 0.0, 0.0, 0.0), unit=0.0, tangency=0.0, circle_tangency=0.0
            ).model_dump()},
        )  # fmt: skip
        data = json.loads(report.to_json())
        assert data["schema"] == 1
        assert data["command"] == "solve-t0"
        assert data["checks"]["unit"] == {"passed": True, "residual": 0.0, "tolerance": 1e-9}
        assert data["exit_code"] == 0
        assert data["error"] is None
