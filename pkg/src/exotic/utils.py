from __future__ import annotations

import math
import reprlib
import sys
from enum import Enum
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Final, TypeVar

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator
    from types import FrameType

    _ClassT = TypeVar("_ClassT", bound=type)


class StrEnum(str, Enum):
    """``enum.StrEnum`` for Python 3.10: members print as their value."""

    _value_: str

    def __str__(self) -> str:
        return self._value_


def format_number(value: float, /, digits: int = 9) -> str:
    """
    Locale-independent fixed significant-digit formatting.
    Negative zero is printed as ``0``.
    """
    if not math.isfinite(value):
        msg = f"Cannot format non-finite value {value!r}"
        raise ValueError(msg)
    text = f"{value:.{digits}g}"
    return "0" if text == "-0" else text


def relative_residual(lhs: float, rhs: float, /, *, scale: float = 1.0) -> float:
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), scale)


_LIBRARY_PACKAGES: Final = ("exotic", "numpy", "pydantic", "scipy")


@lru_cache(maxsize=1)
def _library_roots() -> tuple[str, ...]:
    """Resolved source locations of the packages whose frames warnings skip."""
    roots: list[str] = []
    for name in _LIBRARY_PACKAGES:
        module = sys.modules.get(name)
        origin = getattr(module, "__file__", None)
        if origin is None:
            continue
        path = Path(origin).resolve()
        package = path.name == "__init__.py"
        roots.append(f"{path.parent.as_posix()}/" if package else path.as_posix())
    return tuple(roots)


def _outward(frame: FrameType | None) -> Iterator[FrameType]:
    while frame is not None:
        yield frame
        frame = frame.f_back


def find_user_stacklevel() -> int:
    """
    ``stacklevel`` for :func:`warnings.warn` that points at the first caller
    outside this package and its numerical dependencies. Falls back to 1.
    """
    try:
        caller = sys._getframe(1)
    except ValueError:
        return 1

    roots = _library_roots()
    for level, frame in enumerate(_outward(caller), start=1):
        filename = frame.f_code.co_filename
        if not filename or filename.startswith("<"):
            continue
        if not Path(filename).resolve().as_posix().startswith(roots):
            return level
    return 1


class _Unset:
    def __repr__(self) -> str:
        return "<unset>"


_UNSET: Final = _Unset()

_abbreviated = reprlib.Repr()
_abbreviated.maxstring = 40
_abbreviated.maxother = 40


def representation(*fields: str) -> Callable[[_ClassT], _ClassT]:
    """
    Installs ``__repr__`` as ``Name(field=value, ...)``; long values are
    abbreviated with :mod:`reprlib` and missing attributes print as ``<unset>``.
    """

    def decorate(cls: _ClassT) -> _ClassT:
        def __repr__(self: object) -> str:
            shown = ", ".join(
                f"{name}={_abbreviated.repr(getattr(self, name, _UNSET))}" for name in fields
            )
            return f"{type(self).__name__}({shown})"

        cls.__repr__ = __repr__  # type: ignore[assignment]
        return cls

    return decorate
