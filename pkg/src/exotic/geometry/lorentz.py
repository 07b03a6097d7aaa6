"""
Hyperboloid model of hyperbolic 3-space inside Minkowski space E³,¹ with
``⟨x, y⟩ = -x₀y₀ + x₁y₁ + x₂y₂ + x₃y₃``.

The sphere at infinity is identified with the Riemann sphere through the null
vectors::

    z = x + iy  ↦  ((1 + |z|²)/2, x, y, (|z|² - 1)/2),      ∞ ↦ (1, 0, 0, 1)

so that a unit spacelike normal ``e`` and the boundary circle of the plane
``e^⊥`` are related by::

    A = e₃ - e₀,    B = e₁ + i·e₂,    D = -(e₀ + e₃)

Under this dictionary ``|B|² - AD = ⟨e, e⟩`` and the Hermitian pairing of two
circles equals the Minkowski product of their normals. The hyperplane
``x₁ = 0`` bounds the imaginary axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Final, NamedTuple, final

import numpy as np

from exotic.constants import CausalType
from exotic.exceptions import DegenerateError

from .moebius import GenCircle
from .sphere import INFINITY, is_infinite

if TYPE_CHECKING:
    from typing_extensions import Self

    from exotic.types import ComplexPoint, FloatArray

UNIT_TOLERANCE: Final = 1e-10
_CAUSAL_TOLERANCE: Final = 1e-12


@final
class LorentzVec(NamedTuple):
    x0: float
    x1: float
    x2: float
    x3: float

    def __neg__(self) -> LorentzVec:
        return LorentzVec(-self.x0, -self.x1, -self.x2, -self.x3)

    def scaled(self, factor: float, /) -> LorentzVec:
        return LorentzVec(*(factor * x for x in self))

    def as_array(self) -> FloatArray:
        return np.array(self, dtype=np.float64)

    @classmethod
    def from_array(cls, values: FloatArray, /) -> Self:
        x0, x1, x2, x3 = (float(x) for x in values)
        return cls(x0, x1, x2, x3)


def minkowski_inner(x: LorentzVec, y: LorentzVec, /) -> float:
    return -x.x0 * y.x0 + x.x1 * y.x1 + x.x2 * y.x2 + x.x3 * y.x3


def causal_type(x: LorentzVec, /, *, tol: float = _CAUSAL_TOLERANCE) -> CausalType:
    norm = minkowski_inner(x, x)
    scale = max(1.0, sum(c * c for c in x))
    if norm > tol * scale:
        return CausalType.SPACELIKE
    if norm < -tol * scale:
        return CausalType.TIMELIKE
    return CausalType.LIGHTLIKE


@final
@dataclass(frozen=True, slots=True)
class PlaneNormal:
    """Unit spacelike vector; ``e`` and ``-e`` describe the same geodesic plane."""

    e: LorentzVec

    def __post_init__(self) -> None:
        norm = minkowski_inner(self.e, self.e)
        if abs(norm - 1.0) > UNIT_TOLERANCE:
            msg = f"plane normal must satisfy ⟨e, e⟩ = 1, got {norm!r}"
            raise ValueError(msg)

    @classmethod
    def from_vector(cls, x: LorentzVec, /) -> Self:
        """Rescale a spacelike vector to unit length."""
        norm = minkowski_inner(x, x)
        if not norm > 0.0:
            msg = f"vector {tuple(x)!r} is not spacelike"
            raise DegenerateError(msg)
        return cls(x.scaled(1.0 / math.sqrt(norm)))

    def canonical(self) -> PlaneNormal:
        """Representative with ``x₀ ≥ 0``, ties broken by the first nonzero coordinate."""
        for x in self.e:
            if x > 0.0:
                return self
            if x < 0.0:
                return PlaneNormal(-self.e)
        return self

    def circle(self) -> GenCircle:
        return normal_to_circle(self)


def reflect(e: PlaneNormal, x: LorentzVec, /) -> LorentzVec:
    """Lorentz reflection ``x - 2⟨x, e⟩e`` in the hyperplane ``e^⊥``."""
    factor = 2.0 * minkowski_inner(x, e.e)
    return LorentzVec(*(xi - factor * ei for xi, ei in zip(x, e.e)))


def reflection_matrix(e: PlaneNormal, /) -> FloatArray:
    vector = e.e.as_array()
    metric = np.diag([-1.0, 1.0, 1.0, 1.0])
    return np.eye(4) - 2.0 * np.outer(vector, metric @ vector)


def normal_to_circle(e: PlaneNormal, /) -> GenCircle:
    x0, x1, x2, x3 = e.e
    return GenCircle(x3 - x0, complex(x1, x2), -(x0 + x3))


def circle_to_normal(c: GenCircle, /) -> PlaneNormal:
    return PlaneNormal(
        LorentzVec(-(c.A + c.D) / 2.0, c.B.real, c.B.imag, (c.A - c.D) / 2.0)
    ).canonical()


def point_to_null(z: ComplexPoint, /) -> LorentzVec:
    if is_infinite(z):
        return LorentzVec(1.0, 0.0, 0.0, 1.0)
    modulus = abs(z) ** 2
    return LorentzVec((1.0 + modulus) / 2.0, z.real, z.imag, (modulus - 1.0) / 2.0)


def null_to_point(x: LorentzVec, /) -> ComplexPoint:
    """Boundary point of a future or past null ray."""
    gap = x.x0 - x.x3
    if abs(gap) <= _CAUSAL_TOLERANCE * max(abs(x.x0), abs(x.x3), 1.0):
        return INFINITY
    return complex(x.x1, x.x2) / gap
