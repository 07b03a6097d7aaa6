from __future__ import annotations

from typing import TYPE_CHECKING, Annotated, Any, ClassVar, final

from pydantic import BaseModel, Field

from exotic.settings import env_overrides

if TYPE_CHECKING:
    from typing_extensions import Self


@final
class OrbitConfig(BaseModel, frozen=True, populate_by_name=True):
    """Limits of a breadth-first orbit enumeration."""

    DEFAULT_MAX_DEPTH: ClassVar[int] = 12
    DEFAULT_MIN_DIAMETER: ClassVar[float] = 1e-4
    DEFAULT_DEDUP_EPSILON: ClassVar[float] = 1e-9
    DEFAULT_MAX_ITEMS: ClassVar[int] = 5_000_000
    DEFAULT_WORKERS: ClassVar[int] = 1

    max_depth: Annotated[int, Field(DEFAULT_MAX_DEPTH, ge=0, alias="maxDepth")]
    """Word length bound; ``0`` keeps only the seeds."""
    min_diameter: Annotated[
        float, Field(DEFAULT_MIN_DIAMETER, ge=0, lt=2, alias="minDiameter")
    ]
    """Circles with a smaller chordal diameter are pruned from the frontier."""
    dedup_epsilon: Annotated[
        float, Field(DEFAULT_DEDUP_EPSILON, gt=0, alias="dedupEpsilon")
    ]
    max_items: Annotated[int, Field(DEFAULT_MAX_ITEMS, ge=1, alias="maxItems")]
    workers: Annotated[int, Field(DEFAULT_WORKERS, ge=1)]

    @classmethod
    def from_env(cls, **overrides: Any) -> Self:
        """
        Defaults, overridden by ``EXOTIC_MAX_DEPTH``-style environment variables,
        overridden by the non-``None`` keyword arguments.
        """
        values: dict[str, Any] = dict(env_overrides(cls.model_fields))
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.model_validate(values)

    def echo(self) -> dict[str, Any]:
        """Settings that determine the enumerated orbit; ``workers`` is left out."""
        return self.model_dump(by_alias=True, exclude={"workers"})
