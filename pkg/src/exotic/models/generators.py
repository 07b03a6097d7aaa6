from __future__ import annotations

import json
import re
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any, Final, Literal, TypeAlias, final

from pydantic import BaseModel, Field, ValidationError, model_validator

from exotic.constants import SCHEMA_VERSION, Orientation
from exotic.exceptions import DegenerateError, SchemaError
from exotic.geometry.moebius import GenCircle, MoebiusMap, inversion_in

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from typing_extensions import Self

INVOLUTION_TOLERANCE: Final = 1e-10
_KIND_PATTERN: Final = re.compile(r'"kind"\s*:')


@final
class InversionSpec(BaseModel, frozen=True):
    kind: Literal["inversion"]
    circle: GenCircle

    def to_map(self) -> MoebiusMap:
        return inversion_in(self.circle)


@final
class MobiusSpec(BaseModel, frozen=True):
    kind: Literal["mobius"]
    matrix: tuple[
        tuple[tuple[float, float], tuple[float, float]],
        tuple[tuple[float, float], tuple[float, float]],
    ]
    orientation: Orientation = Orientation.HOLOMORPHIC

    def to_map(self) -> MoebiusMap:
        return MoebiusMap.from_dict(self.model_dump())


GeneratorSpec: TypeAlias = Annotated[
    InversionSpec | MobiusSpec, Field(discriminator="kind")
]


@final
class GeneratorFile(BaseModel, frozen=True, populate_by_name=True):
    """On-disk generator set; ``labels`` default to ``g1, g2, ...``."""

    schema_version: Annotated[int, Field(SCHEMA_VERSION, alias="schema")]
    generators: Annotated[list[GeneratorSpec], Field(min_length=1)]
    labels: list[str] | None = None
    seed: GenCircle | None = None

    @model_validator(mode="after")
    def _check_labels(self) -> Self:
        if self.schema_version != SCHEMA_VERSION:
            msg = f"unsupported schema {self.schema_version}, expected {SCHEMA_VERSION}"
            raise ValueError(msg)
        if self.labels is not None and len(self.labels) != len(self.generators):
            msg = (
                f"{len(self.labels)} labels given for "
                f"{len(self.generators)} generators"
            )
            raise ValueError(msg)
        return self


@final
class GeneratorSet:
    """Finite generating set of a group acting on circles, with word labels."""

    __slots__ = ("generators", "involutions", "labels")

    def __init__(
        self, generators: Iterable[MoebiusMap], labels: Iterable[str] | None = None
    ) -> None:
        self.generators = tuple(generators)
        if not self.generators:
            msg = "a generator set must not be empty"
            raise ValueError(msg)
        self.labels = (
            tuple(labels)
            if labels is not None
            else tuple(f"g{i}" for i in range(1, len(self.generators) + 1))
        )
        if len(self.labels) != len(self.generators):
            msg = f"{len(self.labels)} labels given for {len(self.generators)} generators"
            raise ValueError(msg)
        self.involutions = tuple(
            g.is_involution(tol=INVOLUTION_TOLERANCE) for g in self.generators
        )
        for label, g, involution in zip(self.labels, self.generators, self.involutions):
            if not g.is_holomorphic and not involution:
                msg = f"anti-holomorphic generator {label!r} is not an involution"
                raise ValueError(msg)

    def __len__(self) -> int:
        return len(self.generators)

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(labels={list(self.labels)!r})"

    @classmethod
    def from_circles(
        cls, circles: Sequence[GenCircle], labels: Iterable[str] | None = None
    ) -> Self:
        return cls((inversion_in(c) for c in circles), labels)

    def mirrors(self) -> list[GenCircle]:
        """Mirror circles of the anti-holomorphic involutions, in generator order."""
        return [
            GenCircle.from_reflection(g)
            for g, involution in zip(self.generators, self.involutions)
            if involution and not g.is_holomorphic
        ]

    @classmethod
    def from_document(cls, document: GeneratorFile, /) -> Self:
        return cls((spec.to_map() for spec in document.generators), document.labels)

    def to_document(self) -> dict[str, Any]:
        generators: list[dict[str, Any]] = []
        for g in self.generators:
            if not g.is_holomorphic and g.is_involution(tol=INVOLUTION_TOLERANCE):
                circle = GenCircle.from_reflection(g).to_dict()
                generators.append({"kind": "inversion", "circle": circle})
            else:
                generators.append({"kind": "mobius", **g.to_dict()})
        return {"schema": SCHEMA_VERSION, "generators": generators, "labels": list(self.labels)}


def _line_of_generator(text: str, index: int, /) -> int | None:
    for position, match in enumerate(_KIND_PATTERN.finditer(text)):
        if position == index:
            return text.count("\n", 0, match.start()) + 1
    return None


def parse_generator_file(text: str, /) -> tuple[GeneratorSet, GeneratorFile]:
    """Parses a generator-set document, reporting 1-based line numbers on errors."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON: {e.msg}", line=e.lineno) from None

    try:
        document = GeneratorFile.model_validate(raw)
    except ValidationError as e:
        error = e.errors()[0]
        location = error["loc"]
        line = (
            _line_of_generator(text, location[1])
            if len(location) > 1 and location[0] == "generators" and isinstance(location[1], int)
            else None
        )
        where = ".".join(str(part) for part in location)
        raise SchemaError(f"{where}: {error['msg']}", line=line) from None

    try:
        generators = GeneratorSet.from_document(document)
    except (ValueError, DegenerateError) as e:
        raise SchemaError(str(e)) from None
    return generators, document


def load_generator_file(path: str | Path, /) -> tuple[GeneratorSet, GeneratorFile]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise SchemaError(f"cannot read generator file {str(path)!r}: {e.strerror}") from None
    return parse_generator_file(text)
