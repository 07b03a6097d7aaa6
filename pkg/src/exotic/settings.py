from __future__ import annotations

import logging
from collections import UserString
from typing import TYPE_CHECKING, Final, cast

from .exceptions import DecoupleNotFoundError

if TYPE_CHECKING:
    from collections.abc import Iterable

_logger = logging.getLogger(__name__)

ENV_PREFIX: Final = "EXOTIC_"


class env(UserString):  # noqa: N801
    """Name of an environment variable carrying an orbit setting."""

    __slots__ = ()

    @classmethod
    def for_field(cls, name: str, /) -> env:
        """``max_depth`` -> ``env("EXOTIC_MAX_DEPTH")``."""
        return cls(f"{ENV_PREFIX}{name.upper()}")


def read_env(key: str | env, /) -> str | None:
    try:
        import decouple  # noqa: PLC0415  # pyright: ignore[reportMissingImports]
    except ModuleNotFoundError:
        raise DecoupleNotFoundError from None
    return cast("str | None", decouple.config(str(key), default=None))


def env_overrides(fields: Iterable[str], /) -> dict[str, str]:
    """Raw environment values for the given field names, keyed by field name."""
    found: dict[str, str] = {}
    for name in fields:
        key = env.for_field(name)
        if (value := read_env(key)) is not None:
            _logger.debug("Using %s from the environment", key)
            found[name] = value
    return found
