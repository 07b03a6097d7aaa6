"""
Möbius and anti-Möbius transformations of the Riemann sphere and generalized
circles in Hermitian form.

A circle is stored as ``(A, B, D)`` describing
``A·|z|² + conj(B)·z + B·conj(z) + D = 0``, normalized so that
``|B|² - A·D = 1`` with a sign convention that makes the triple unique.
Lines are exactly the circles with ``A = 0``.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Mapping
from typing import TYPE_CHECKING, Any, ClassVar, Final, NamedTuple, final

import numpy as np
from pydantic_core import core_schema

from exotic.constants import (
    CHORDAL_TOLERANCE,
    DEFAULT_TOLERANCE,
    EPSILON,
    Classification,
    Orientation,
)
from exotic.exceptions import ClassificationError, DegenerateError
from exotic.utils import representation

from .sphere import (
    INFINITY,
    canonical_point,
    chordal_distance,
    is_infinite,
    point_circle_distance,
)

if TYPE_CHECKING:
    from pydantic import GetCoreSchemaHandler
    from typing_extensions import Self

    from exotic.types import BoolArray, ComplexArray, ComplexPoint, FloatArray

_logger = logging.getLogger(__name__)

_LINE_SNAP: Final = 4 * EPSILON
_RESCALE_SLACK: Final = 8 * EPSILON
_SIGN_TIE: Final = 1e-12
_CLASSIFY_TOLERANCE: Final = 1e-9
_COINCIDENT_TOLERANCE: Final = 1e-12


def _needs_flip(values: tuple[float, ...]) -> bool:
    tie = _SIGN_TIE * max(abs(x) for x in values)
    for x in values:
        if x > tie:
            return False
        if x < -tie:
            return True
    return False


def normalize_coefficients(
    A: float, B: complex, D: float, /
) -> tuple[float, complex, float]:
    """
    Canonical ``(A, B, D)`` for the circle, scaled to unit discriminant and
    signed so the first decisive entry of ``(A, Re B, Im B, D)`` is positive.
    Normalizing an already normalized triple returns it unchanged.
    """
    A, B, D = float(A), complex(B), float(D)
    if not (math.isfinite(A) and cmath.isfinite(B) and math.isfinite(D)):
        msg = f"not a real circle: non-finite coefficients {(A, B, D)!r}"
        raise DegenerateError(msg)

    if abs(A) <= _LINE_SNAP * max(abs(B.real), abs(B.imag), abs(D)):
        A = 0.0
    modulus = B.real * B.real + B.imag * B.imag
    discriminant = modulus - A * D
    if not discriminant > 0.0:
        msg = f"not a real circle: |B|² - AD = {discriminant!r}"
        raise DegenerateError(msg)

    if abs(discriminant - 1.0) > _RESCALE_SLACK * (modulus + abs(A * D)):
        scale = 1.0 / math.sqrt(discriminant)
        A, B, D = A * scale, B * scale, D * scale
    if _needs_flip((A, B.real, B.imag, D)):
        A, B, D = -A, -B, -D
    # + 0.0 turns negative zeros into positive ones
    return A + 0.0, complex(B.real + 0.0, B.imag + 0.0), D + 0.0


def normalize_rows(coefficients: FloatArray, /) -> tuple[FloatArray, BoolArray]:
    """
    Row-wise :func:`normalize_coefficients` on an ``(N, 4)`` array of
    ``[A, Re B, Im B, D]``. Returns the normalized rows and a mask of rows that
    describe real circles; invalid rows are left as zeros.
    """
    c = np.array(coefficients, dtype=np.float64, copy=True)
    finite = np.isfinite(c).all(axis=1)
    c[~finite] = 0.0
    A, br, bi, D = c.T
    snap = np.abs(A) <= _LINE_SNAP * np.max(np.abs(c[:, 1:]), axis=1)
    A[snap] = 0.0

    modulus = br * br + bi * bi
    discriminant = modulus - A * D
    valid = finite & (discriminant > 0.0)
    rescale = valid & (np.abs(discriminant - 1.0) > _RESCALE_SLACK * (modulus + np.abs(A * D)))
    scale = np.ones_like(discriminant)
    scale[rescale] = 1.0 / np.sqrt(discriminant[rescale])
    c *= scale[:, None]

    tie = _SIGN_TIE * np.max(np.abs(c), axis=1)
    decisive = np.abs(c) > tie[:, None]
    first = np.argmax(decisive, axis=1)
    lead = c[np.arange(c.shape[0]), first]
    c[decisive.any(axis=1) & (lead < 0.0)] *= -1.0
    c[~valid] = 0.0
    return c + 0.0, valid


@final
@representation("A", "B", "D")
class GenCircle:
    __slots__ = ("A", "B", "D")

    A: float
    B: complex
    D: float

    def __init__(self, A: float, B: complex, D: float, /, *, normalize: bool = True) -> None:
        if normalize:
            A, B, D = normalize_coefficients(A, B, D)
        object.__setattr__(self, "A", float(A))
        object.__setattr__(self, "B", complex(B))
        object.__setattr__(self, "D", float(D))

    def __setattr__(self, name: str, value: Any) -> None:
        msg = f"{self.__class__.__name__} is immutable"
        raise AttributeError(msg)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GenCircle):
            return NotImplemented
        return (self.A, self.B, self.D) == (other.A, other.B, other.D)

    def __hash__(self) -> int:
        return hash((self.A, self.B, self.D))

    @classmethod
    def from_center_radius(cls, center: complex, radius: float, /) -> Self:
        if not radius > 0.0 or not math.isfinite(radius):
            msg = f"radius must be positive and finite, got {radius!r}"
            raise DegenerateError(msg)
        center = complex(center)
        # constant term from a point on the circle; avoids |c|² - r² cancellation
        on_circle = center + radius
        constant = (2.0 * (center.conjugate() * on_circle).real - abs(on_circle) ** 2) / radius
        return cls(1.0 / radius, -center / radius, constant)

    @classmethod
    def line(cls, point: complex, direction: complex, /) -> Self:
        if direction == 0:
            msg = "line direction must be nonzero"
            raise DegenerateError(msg)
        unit = complex(direction) / abs(direction)
        normal = 1j * unit
        return cls(0.0, normal / 2.0, -(normal.conjugate() * complex(point)).real)

    @classmethod
    def unit_circle(cls) -> Self:
        return cls(1.0, 0j, -1.0)

    @classmethod
    def real_axis(cls) -> Self:
        return cls.line(0j, 1.0)

    @classmethod
    def imaginary_axis(cls) -> Self:
        return cls.line(0j, 1j)

    @classmethod
    def from_reflection(cls, m: MoebiusMap, /) -> Self:
        """Mirror of an anti-holomorphic reflection (inverse of :func:`inversion_in`)."""
        if m.is_holomorphic or not m.is_involution():
            msg = "map is not an anti-holomorphic involution"
            raise DegenerateError(msg)
        return cls((-1j * m.c).real, 1j * m.a, (1j * m.b).real)

    @classmethod
    def from_array(cls, row: FloatArray, /) -> Self:
        A, br, bi, D = (float(x) for x in row)
        return cls(A, complex(br, bi), D)

    @property
    def is_line(self) -> bool:
        return self.A == 0.0

    @property
    def center(self) -> ComplexPoint:
        return INFINITY if self.is_line else -self.B / self.A

    @property
    def radius(self) -> float:
        return math.inf if self.is_line else 1.0 / abs(self.A)

    def center_radius(self) -> tuple[ComplexPoint, float]:
        return self.center, self.radius

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (self.A, self.B.real, self.B.imag, self.D)

    def as_array(self) -> FloatArray:
        return np.array(self.coefficients, dtype=np.float64)

    def evaluate(self, z: ComplexPoint, /) -> float:
        """Value of the Hermitian form at ``z`` (zero on the circle)."""
        if is_infinite(z):
            return self.A
        return self.A * abs(z) ** 2 + 2.0 * (self.B.conjugate() * z).real + self.D

    def contains_point(self, z: ComplexPoint, /, *, tol: float = CHORDAL_TOLERANCE) -> bool:
        return point_circle_distance(z, self) <= tol

    def is_close(self, other: GenCircle, /, *, tol: float = DEFAULT_TOLERANCE) -> bool:
        return max(abs(a - b) for a, b in zip(self.coefficients, other.coefficients)) <= tol

    def to_dict(self) -> dict[str, float]:
        return {"A": self.A, "B_re": self.B.real, "B_im": self.B.imag, "D": self.D}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], /) -> Self:
        missing = {"A", "B_re", "B_im", "D"} - data.keys()
        if missing:
            msg = f"circle is missing keys: {', '.join(sorted(missing))}"
            raise ValueError(msg)
        return cls(
            float(data["A"]),
            complex(float(data["B_re"]), float(data["B_im"])),
            float(data["D"]),
        )

    @classmethod
    def _validate(cls, value: Any, /) -> Self:
        if isinstance(value, cls):
            return value
        if isinstance(value, Mapping):
            try:
                return cls.from_dict(value)
            except (DegenerateError, TypeError) as e:
                raise ValueError(str(e)) from e
        msg = f"Invalid {cls.__name__}: expected a mapping, got {type(value).__name__}"
        raise ValueError(msg)

    @classmethod
    def __get_pydantic_core_schema__(
        cls, _: type[Any], handler: GetCoreSchemaHandler
    ) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            cls._validate,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda c: c.to_dict()
            ),
        )


def _canonical_sign(entries: tuple[complex, ...]) -> bool:
    scale = max(abs(x) for x in entries)
    tie = _SIGN_TIE * scale
    for x in entries:
        if abs(x) <= tie:
            continue
        key = x.real if abs(x.real) > tie else x.imag
        return key < 0.0
    return False


@final
@representation("a", "b", "c", "d", "orientation")
class MoebiusMap:
    __slots__ = ("a", "b", "c", "d", "orientation")

    a: complex
    b: complex
    c: complex
    d: complex
    orientation: Orientation

    def __init__(
        self,
        a: complex,
        b: complex,
        c: complex,
        d: complex,
        /,
        orientation: Orientation | str = Orientation.HOLOMORPHIC,
    ) -> None:
        a, b, c, d = complex(a), complex(b), complex(c), complex(d)
        determinant = a * d - b * c
        if determinant == 0 or not cmath.isfinite(determinant):
            msg = f"singular Möbius matrix (ad - bc = {determinant!r})"
            raise DegenerateError(msg)
        root = cmath.sqrt(determinant)
        entries = (a / root, b / root, c / root, d / root)
        if _canonical_sign(entries):
            entries = tuple(-x for x in entries)  # type: ignore[assignment]
        for name, value in zip(("a", "b", "c", "d"), entries):
            object.__setattr__(self, name, complex(value.real + 0.0, value.imag + 0.0))
        object.__setattr__(self, "orientation", Orientation(orientation))

    def __setattr__(self, name: str, value: Any) -> None:
        msg = f"{self.__class__.__name__} is immutable"
        raise AttributeError(msg)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MoebiusMap):
            return NotImplemented
        return self.entries == other.entries and self.orientation == other.orientation

    def __hash__(self) -> int:
        return hash((*self.entries, self.orientation))

    def __matmul__(self, other: MoebiusMap) -> MoebiusMap:
        return compose(self, other)

    def __call__(self, z: ComplexPoint, /) -> ComplexPoint:
        return apply_point(self, z)

    IDENTITY: ClassVar[MoebiusMap]

    @classmethod
    def from_matrix(
        cls, matrix: Any, /, orientation: Orientation | str = Orientation.HOLOMORPHIC
    ) -> Self:
        (a, b), (c, d) = np.asarray(matrix, dtype=np.complex128)
        return cls(complex(a), complex(b), complex(c), complex(d), orientation)

    @classmethod
    def conjugation(cls) -> Self:
        return cls(1, 0, 0, 1, Orientation.ANTIHOLOMORPHIC)

    @property
    def entries(self) -> tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)

    @property
    def matrix(self) -> ComplexArray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=np.complex128)

    @property
    def is_holomorphic(self) -> bool:
        return self.orientation is Orientation.HOLOMORPHIC

    @property
    def trace(self) -> complex:
        return self.a + self.d

    def inverse(self) -> MoebiusMap:
        a, b, c, d = self.entries
        if self.is_holomorphic:
            return MoebiusMap(d, -b, -c, a)
        return MoebiusMap(
            d.conjugate(), -b.conjugate(), -c.conjugate(), a.conjugate(),
            Orientation.ANTIHOLOMORPHIC,
        )

    def power(self, k: int, /) -> MoebiusMap:
        base = self if k >= 0 else self.inverse()
        result = MoebiusMap.IDENTITY
        for _ in range(abs(k)):
            result = compose(base, result)
        return result

    def is_close(self, other: MoebiusMap, /, *, tol: float = DEFAULT_TOLERANCE) -> bool:
        if self.orientation != other.orientation:
            return False
        same = max(abs(x - y) for x, y in zip(self.entries, other.entries))
        flipped = max(abs(x + y) for x, y in zip(self.entries, other.entries))
        return min(same, flipped) <= tol

    def is_involution(self, *, tol: float = DEFAULT_TOLERANCE) -> bool:
        return compose(self, self).is_close(MoebiusMap.IDENTITY, tol=tol)

    def to_dict(self) -> dict[str, Any]:
        return {
            "matrix": [
                [[self.a.real, self.a.imag], [self.b.real, self.b.imag]],
                [[self.c.real, self.c.imag], [self.d.real, self.d.imag]],
            ],
            "orientation": str(self.orientation),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], /) -> Self:
        try:
            rows = data["matrix"]
            (a, b), (c, d) = ((complex(*x) for x in row) for row in rows)
        except (KeyError, TypeError, ValueError) as e:
            msg = "map must provide 'matrix' as [[[re, im], [re, im]], [[re, im], [re, im]]]"
            raise ValueError(msg) from e
        return cls(a, b, c, d, data.get("orientation", Orientation.HOLOMORPHIC))

    @classmethod
    def _validate(cls, value: Any, /) -> Self:
        if isinstance(value, cls):
            return value
        if isinstance(value, Mapping):
            try:
                return cls.from_dict(value)
            except DegenerateError as e:
                raise ValueError(str(e)) from e
        msg = f"Invalid {cls.__name__}: expected a mapping, got {type(value).__name__}"
        raise ValueError(msg)

    @classmethod
    def __get_pydantic_core_schema__(
        cls, _: type[Any], handler: GetCoreSchemaHandler
    ) -> core_schema.CoreSchema:
        return core_schema.no_info_plain_validator_function(
            cls._validate,
            serialization=core_schema.plain_serializer_function_ser_schema(
                lambda m: m.to_dict()
            ),
        )


MoebiusMap.IDENTITY = MoebiusMap(1, 0, 0, 1)


class FixedPoints(NamedTuple):
    attracting: ComplexPoint
    repelling: ComplexPoint


def compose(m1: MoebiusMap, m2: MoebiusMap, /) -> MoebiusMap:
    """The map ``m1 ∘ m2``: apply ``m2`` first."""
    right = m2.matrix if m1.is_holomorphic else m2.matrix.conj()
    (a, b), (c, d) = m1.matrix @ right
    orientation = (
        Orientation.HOLOMORPHIC
        if m1.orientation == m2.orientation
        else Orientation.ANTIHOLOMORPHIC
    )
    return MoebiusMap(complex(a), complex(b), complex(c), complex(d), orientation)


def apply_point(m: MoebiusMap, z: ComplexPoint, /) -> ComplexPoint:
    if is_infinite(z):
        return INFINITY if m.c == 0 else canonical_point(m.a / m.c)
    w = z if m.is_holomorphic else z.conjugate()
    denominator = m.c * w + m.d
    if denominator == 0:
        return INFINITY
    return canonical_point((m.a * w + m.b) / denominator)


def apply_circle(m: MoebiusMap, c: GenCircle, /) -> GenCircle:
    """Image circle, by congruence of the Hermitian matrix with ``m⁻¹``."""
    n11, n12, n21, n22 = m.d, -m.b, -m.c, m.a
    B = c.B if m.is_holomorphic else c.B.conjugate()
    A, D = c.A, c.D
    new_a = abs(n11) ** 2 * A + 2.0 * (n11.conjugate() * B * n21).real + abs(n21) ** 2 * D
    new_b = (
        n11.conjugate() * A * n12
        + n11.conjugate() * B * n22
        + n21.conjugate() * B.conjugate() * n12
        + n21.conjugate() * D * n22
    )
    new_d = abs(n12) ** 2 * A + 2.0 * (n12.conjugate() * B * n22).real + abs(n22) ** 2 * D
    return GenCircle(new_a, new_b, new_d)


def apply_circle_rows(m: MoebiusMap, coefficients: FloatArray, /) -> FloatArray:
    """Vectorized :func:`apply_circle` on ``(N, 4)`` rows, left unnormalized."""
    n11, n12, n21, n22 = m.d, -m.b, -m.c, m.a
    A = coefficients[:, 0]
    im_sign = 1.0 if m.is_holomorphic else -1.0
    B = coefficients[:, 1] + 1j * im_sign * coefficients[:, 2]
    D = coefficients[:, 3]
    new_a = abs(n11) ** 2 * A + 2.0 * (n11.conjugate() * n21 * B).real + abs(n21) ** 2 * D
    new_b = (
        n11.conjugate() * n12 * A
        + n11.conjugate() * n22 * B
        + n21.conjugate() * n12 * B.conj()
        + n21.conjugate() * n22 * D
    )
    new_d = abs(n12) ** 2 * A + 2.0 * (n12.conjugate() * n22 * B).real + abs(n22) ** 2 * D
    return np.stack([new_a, new_b.real, new_b.imag, new_d], axis=1)


def inversion_in(c: GenCircle, /) -> MoebiusMap:
    """Anti-holomorphic reflection fixing ``c`` pointwise."""
    return MoebiusMap(
        -1j * c.B, -1j * c.D, 1j * c.A, 1j * c.B.conjugate(), Orientation.ANTIHOLOMORPHIC
    )


def fixed_points(m: MoebiusMap, /) -> FixedPoints:
    """
    Fixed points of a holomorphic map ordered (attracting, repelling) by the
    modulus of the derivative there; parabolic maps return the double point twice.
    """
    if not m.is_holomorphic:
        msg = "fixed points are only defined here for holomorphic maps"
        raise ClassificationError(msg)
    if classify(m) is Classification.IDENTITY:
        msg = "undefined fixed-point set"
        raise DegenerateError(msg)

    a, b, c, d = m.entries
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if abs(c) <= _SIGN_TIE * scale:
        if abs(a - d) <= _SIGN_TIE * scale:
            return FixedPoints(INFINITY, INFINITY)
        finite = canonical_point(b / (d - a))
        # derivative at infinity is d/a, at the finite point a/d
        if abs(a) > abs(d):
            return FixedPoints(INFINITY, finite)
        return FixedPoints(finite, INFINITY)

    root = cmath.sqrt((a - d) ** 2 + 4.0 * b * c)
    z1 = ((a - d) + root) / (2.0 * c)
    z2 = ((a - d) - root) / (2.0 * c)
    # multiplier at a fixed point z is 1 / (cz + d)²
    if abs(c * z1 + d) >= abs(c * z2 + d):
        return FixedPoints(z1, z2)
    return FixedPoints(z2, z1)


def classify(m: MoebiusMap, /, *, tol: float = _CLASSIFY_TOLERANCE) -> Classification:
    if not m.is_holomorphic:
        msg = "only holomorphic maps are classified"
        raise ClassificationError(msg)
    square = m.trace**2
    if abs(square - 4.0) <= tol:
        scale = max(abs(x) for x in m.entries)
        if abs(m.b) <= tol * scale and abs(m.c) <= tol * scale and abs(m.a - m.d) <= tol * scale:
            return Classification.IDENTITY
        return Classification.PARABOLIC
    if abs(square.imag) <= tol:
        if -tol <= square.real < 4.0:
            return Classification.ELLIPTIC
        if square.real > 4.0:
            return Classification.HYPERBOLIC
    return Classification.LOXODROMIC


def translation_length(m: MoebiusMap, /) -> float:
    kind = classify(m)
    if kind is Classification.HYPERBOLIC:
        return 2.0 * math.acosh(abs(m.trace) / 2.0)
    if kind is Classification.LOXODROMIC:
        trace = m.trace
        root = cmath.sqrt(trace * trace - 4.0)
        eigenvalue = max((trace + root) / 2.0, (trace - root) / 2.0, key=abs)
        return 2.0 * math.log(abs(eigenvalue))
    msg = f"no translation length: {kind} map"
    raise ClassificationError(msg)


def circle_through(z1: ComplexPoint, z2: ComplexPoint, z3: ComplexPoint, /) -> GenCircle:
    points = [canonical_point(z) for z in (z1, z2, z3)]
    for i in range(3):
        for j in range(i + 1, 3):
            if chordal_distance(points[i], points[j]) <= _COINCIDENT_TOLERANCE:
                msg = "degenerate triple"
                raise DegenerateError(msg)

    finite = [z for z in points if not is_infinite(z)]
    if len(finite) == 2:
        return GenCircle.line(finite[0], finite[1] - finite[0])

    a, b, c = finite
    w = (c - a) / (b - a)
    if abs(w.imag) <= _COINCIDENT_TOLERANCE * abs(w):
        _logger.debug("Collinear triple %r, %r, %r gives a line", a, b, c)
        return GenCircle.line(a, b - a)
    center = a + (b - a) * (w - abs(w) ** 2) / (w - w.conjugate())
    return GenCircle.from_center_radius(center, abs(center - a))


def hermitian_pairing(c1: GenCircle, c2: GenCircle, /) -> float:
    """Signed bilinear form on normalized coefficients; ``c`` paired with itself gives 1."""
    return (c1.B * c2.B.conjugate()).real - (c1.A * c2.D + c2.A * c1.D) / 2.0


def inversive_distance(c1: GenCircle, c2: GenCircle, /) -> float:
    return abs(hermitian_pairing(c1, c2))


def intersection_angle(c1: GenCircle, c2: GenCircle, /) -> float:
    """Angle in ``[0, π/2]`` between intersecting circles."""
    value = inversive_distance(c1, c2)
    if value > 1.0 + DEFAULT_TOLERANCE:
        msg = f"circles do not intersect (inversive distance {value!r})"
        raise DegenerateError(msg)
    return math.acos(min(value, 1.0))
