from __future__ import annotations

from typing import Annotated, Any, TypeAlias

from pydantic import PlainSerializer, PlainValidator

from exotic.geometry.sphere import INFINITY, canonical_point, is_infinite

_INFINITY_TOKEN = "inf"


def parse_point(value: Any, /) -> complex:
    """Accepts a complex, a real, an ``[re, im]`` pair or the string ``"inf"``."""
    if isinstance(value, str):
        if value.strip().lower() == _INFINITY_TOKEN:
            return INFINITY
        msg = f"Invalid point {value!r}: only {_INFINITY_TOKEN!r} is accepted as a string"
        raise ValueError(msg)
    if isinstance(value, complex | float | int) and not isinstance(value, bool):
        return canonical_point(complex(value))
    if isinstance(value, list | tuple) and len(value) == 2:
        real, imag = (float(x) for x in value)
        return canonical_point(complex(real, imag))
    msg = f"Invalid point {value!r}: expected [re, im] or {_INFINITY_TOKEN!r}"
    raise ValueError(msg)


def dump_point(z: complex, /) -> list[float] | str:
    return _INFINITY_TOKEN if is_infinite(z) else [z.real, z.imag]


Point: TypeAlias = Annotated[
    complex,
    PlainValidator(parse_point),
    PlainSerializer(dump_point),
]
"""Riemann sphere point, serialized as ``[re, im]`` or ``"inf"``."""
