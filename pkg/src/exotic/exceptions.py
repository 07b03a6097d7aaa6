from __future__ import annotations

from typing import TYPE_CHECKING, Any, ClassVar, final

if TYPE_CHECKING:
    from collections.abc import Mapping


class ExoticError(Exception):
    """Base class for all exotic-circles exceptions."""

    exit_code: ClassVar = 1

    _by_exit_code: ClassVar[dict[int, list[type[ExoticError]]]] = {}

    def __init_subclass__(cls, exit_code: int | None = None, **kwargs: Any) -> None:
        if exit_code is not None:
            cls.exit_code = exit_code
        ExoticError._by_exit_code.setdefault(cls.exit_code, []).append(cls)
        super().__init_subclass__(**kwargs)

    @staticmethod
    def exit_code_for(error: BaseException, /) -> int:
        return error.exit_code if isinstance(error, ExoticError) else 1

    @classmethod
    def classes_for(cls, exit_code: int, /) -> tuple[type[ExoticError], ...]:
        return tuple(cls._by_exit_code.get(exit_code, ()))


@final
class DecoupleNotFoundError(ExoticError):
    def __init__(self) -> None:
        super().__init__(
            "Reading settings from the environment needs python-decouple; "
            "run `pip install python-decouple` or install exotic-circles[env]"
        )


class DegenerateError(ExoticError):
    """A geometric object collapses (coincident points, identity map, point-circle)."""


class ClassificationError(ExoticError):
    pass


@final
class NotDiscreteDatumError(ExoticError, exit_code=3):
    def __init__(self, n: int, s: float, t: float, defect: float, /) -> None:
        self.n = n
        self.s = s
        self.t = t
        self.defect = defect
        super().__init__(
            "not a discrete quadrilateral datum: "
            f"(s-1)(t-1) = {(s - 1) * (t - 1)!r} exceeds 4cos²(π/{n}) "
            f"(defect {defect!r})"
        )


@final
class SolverError(ExoticError):
    def __init__(self, message: str, /, residuals: Mapping[str, float]) -> None:
        self.residuals = dict(residuals)
        details = ", ".join(f"{k}={v:.3e}" for k, v in self.residuals.items())
        super().__init__(f"{message} (residuals: {details})")


class DynamicRangeError(ExoticError):
    pass


class GeometricRegimeError(ExoticError, exit_code=3):
    pass


@final
class ClosureUncertifiedError(ExoticError):
    def __init__(self) -> None:
        super().__init__("cannot certify closure: the orbit was truncated")


@final
class SchemaError(ExoticError, exit_code=3):
    def __init__(self, message: str, /, *, line: int | None = None) -> None:
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@final
class CheckFailedError(ExoticError, exit_code=2):
    def __init__(self, failed: list[str], /) -> None:
        self.failed = failed
        super().__init__(f"checks failed: {', '.join(failed)}")


# fmt: off
class TruncatedOrbitError(ExoticError, exit_code=4): ...
# fmt: on
