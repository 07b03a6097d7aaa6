from __future__ import annotations

from typing import Any, TypeAlias

import numpy as np
import numpy.typing as npt

ComplexPoint: TypeAlias = complex
"""A point of the Riemann sphere; infinity is the canonical ``INFINITY`` value."""

FloatArray: TypeAlias = npt.NDArray[np.float64]
ComplexArray: TypeAlias = npt.NDArray[np.complex128]
IntArray: TypeAlias = npt.NDArray[np.int64]
BoolArray: TypeAlias = npt.NDArray[np.bool_]

RawDocument: TypeAlias = dict[str, Any]
