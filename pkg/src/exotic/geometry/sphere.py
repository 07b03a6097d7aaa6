"""
Riemann sphere helpers: the point at infinity, stereographic embedding into
the unit 2-sphere, the chordal metric and circles viewed as plane sections.

The embedding is ``z = x + iy ↦ (2x, 2y, |z|² - 1) / (|z|² + 1)`` with ``∞``
sent to the north pole ``(0, 0, 1)``. A Hermitian circle ``(A, B, D)`` is the
section of the sphere by the plane ``N·ξ = h`` with
``N = (2 Re B, 2 Im B, A - D)`` and ``h = -(A + D)``.
"""

from __future__ import annotations

import cmath
import math
from typing import TYPE_CHECKING, Final, NamedTuple, final

import numpy as np
from scipy import optimize

if TYPE_CHECKING:
    from exotic.types import ComplexArray, ComplexPoint, FloatArray

    from .moebius import GenCircle

INFINITY: Final = complex(math.inf, 0.0)
NORTH_POLE: Final = (0.0, 0.0, 1.0)

DEFAULT_HAUSDORFF_SAMPLES: Final = 720
_REFINE_XATOL: Final = 1e-12


def is_infinite(z: ComplexPoint, /) -> bool:
    return cmath.isinf(z)


def canonical_point(z: ComplexPoint, /) -> ComplexPoint:
    return INFINITY if cmath.isinf(z) else complex(z)


def stereographic(z: ComplexPoint, /) -> FloatArray:
    return stereographic_array(np.array([z], dtype=np.complex128))[0]


def stereographic_array(z: ComplexArray, /) -> FloatArray:
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty((*z.shape, 3), dtype=np.float64)
    infinite = np.isinf(z.real) | np.isinf(z.imag)
    modulus = np.where(infinite, 0.0, np.abs(z))
    inner = modulus <= 1.0

    # |z| > 1 goes through w = 1/z to keep the north pole well conditioned
    zz = np.where(infinite, 0.0, z)
    w = np.where(inner, zz, 1.0 / np.where(inner, 1.0, zz))
    m = w.real**2 + w.imag**2
    denominator = 1.0 + m
    out[..., 0] = 2.0 * w.real / denominator
    out[..., 1] = np.where(inner, 2.0 * w.imag, -2.0 * w.imag) / denominator
    out[..., 2] = np.where(inner, m - 1.0, 1.0 - m) / denominator
    out[infinite] = NORTH_POLE
    return out


def inverse_stereographic(xi: FloatArray, /) -> ComplexPoint:
    return complex(inverse_stereographic_array(np.asarray(xi)[None, :])[0])


def inverse_stereographic_array(xi: FloatArray, /) -> ComplexArray:
    xi = np.asarray(xi, dtype=np.float64)
    gap = 1.0 - xi[..., 2]
    pole = gap <= 0.0
    safe = np.where(pole, 1.0, gap)
    z = (xi[..., 0] + 1j * xi[..., 1]) / safe
    return np.where(pole, INFINITY, z)


def chordal_distance(z: ComplexPoint, w: ComplexPoint, /) -> float:
    z_inf, w_inf = is_infinite(z), is_infinite(w)
    if z_inf and w_inf:
        return 0.0
    if z_inf or w_inf:
        finite = w if z_inf else z
        return 2.0 / math.hypot(1.0, abs(finite))
    return 2.0 * abs(z - w) / (math.hypot(1.0, abs(z)) * math.hypot(1.0, abs(w)))


def chordal_diameters(A: FloatArray, D: FloatArray, /) -> FloatArray:
    """Chordal diameters of normalized circles, ``4 / sqrt((A + D)² + 4)``."""
    return 4.0 / np.sqrt((A + D) ** 2 + 4.0)


@final
class SphereCircle(NamedTuple):
    center: FloatArray
    normal: FloatArray
    radius: float

    @property
    def offset(self) -> float:
        return float(self.center @ self.normal)

    def basis(self) -> tuple[FloatArray, FloatArray]:
        axis = np.zeros(3)
        axis[int(np.argmin(np.abs(self.normal)))] = 1.0
        u = np.cross(self.normal, axis)
        u /= np.linalg.norm(u)
        return u, np.cross(self.normal, u)

    def sample(self, thetas: FloatArray, /) -> FloatArray:
        u, v = self.basis()
        thetas = np.asarray(thetas, dtype=np.float64)
        return self.center + self.radius * (
            np.cos(thetas)[:, None] * u + np.sin(thetas)[:, None] * v
        )

    def distance(self, points: FloatArray, /) -> FloatArray:
        """Euclidean (chordal) distance from each point to the circle."""
        v = np.atleast_2d(points) - self.center
        normal_part = v @ self.normal
        planar = v - normal_part[:, None] * self.normal
        return np.hypot(normal_part, np.linalg.norm(planar, axis=1) - self.radius)

    def coefficients(self) -> tuple[float, complex, float]:
        delta = self.offset
        scale = 2.0 / self.radius
        n1, n2, n3 = (float(x) for x in self.normal)
        return (
            scale * (n3 - delta) / 2.0,
            complex(scale * n1 / 2.0, scale * n2 / 2.0),
            -scale * (n3 + delta) / 2.0,
        )


def sphere_circle(A: float, B: complex, D: float, /) -> SphereCircle:
    normal = np.array([2.0 * B.real, 2.0 * B.imag, A - D])
    length = float(np.linalg.norm(normal))
    discriminant = B.real**2 + B.imag**2 - A * D
    unit = normal / length
    delta = -(A + D) / length
    return SphereCircle(delta * unit, unit, 2.0 * math.sqrt(discriminant) / length)


def sphere_representatives(coefficients: FloatArray, /) -> FloatArray:
    """
    For each ``[A, Re B, Im B, D]`` row, the centre on the sphere of the
    smaller of the two caps bounded by the circle.
    """
    A, br, bi, D = coefficients.T
    normal = np.stack([2.0 * br, 2.0 * bi, A - D], axis=1)
    normal /= np.linalg.norm(normal, axis=1)[:, None]
    side = np.where(-(A + D) < 0.0, -1.0, 1.0)
    return normal * side[:, None]


def sample_circles(coefficients: FloatArray, thetas: FloatArray, /) -> FloatArray:
    """``(N, S, 3)`` sphere points of normalized circles at the given angles."""
    A, br, bi, D = np.atleast_2d(coefficients).T
    normal = np.stack([2.0 * br, 2.0 * bi, A - D], axis=1)
    length = np.linalg.norm(normal, axis=1)
    unit = normal / length[:, None]
    centre = (-(A + D) / length)[:, None] * unit
    radius = 2.0 / length
    axis = np.eye(3)[np.argmin(np.abs(unit), axis=1)]
    u = np.cross(unit, axis)
    u /= np.linalg.norm(u, axis=1)[:, None]
    v = np.cross(unit, u)
    thetas = np.asarray(thetas, dtype=np.float64)
    ring = (
        np.cos(thetas)[None, :, None] * u[:, None, :]
        + np.sin(thetas)[None, :, None] * v[:, None, :]
    )
    return centre[:, None, :] + radius[:, None, None] * ring


def circles_point_distance(coefficients: FloatArray, points: FloatArray, /) -> FloatArray:
    """``(N, S)`` chordal distances from sphere points to each normalized circle."""
    A, br, bi, D = np.atleast_2d(coefficients).T
    normal = np.stack([2.0 * br, 2.0 * bi, A - D], axis=1)
    length = np.linalg.norm(normal, axis=1)
    unit = normal / length[:, None]
    centre = (-(A + D) / length)[:, None] * unit
    offset = np.atleast_2d(points)[None, :, :] - centre[:, None, :]
    normal_part = np.einsum("nsk,nk->ns", offset, unit)
    planar = offset - normal_part[..., None] * unit[:, None, :]
    return np.hypot(normal_part, np.linalg.norm(planar, axis=2) - (2.0 / length)[:, None])


def point_circle_distance(z: ComplexPoint, circle: GenCircle, /) -> float:
    sc = sphere_circle(circle.A, circle.B, circle.D)
    return float(sc.distance(stereographic(z))[0])


def _directed_hausdorff(src: SphereCircle, dst: SphereCircle, samples: int) -> float:
    thetas = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    distances = dst.distance(src.sample(thetas))
    best = int(np.argmax(distances))
    step = 2.0 * math.pi / samples
    refined = optimize.minimize_scalar(
        lambda theta: -float(dst.distance(src.sample(np.array([theta])))[0]),
        bounds=(thetas[best] - step, thetas[best] + step),
        method="bounded",
        options={"xatol": _REFINE_XATOL},
    )
    return max(float(distances[best]), -float(refined.fun))


def circle_distance(
    c1: GenCircle, c2: GenCircle, /, *, samples: int = DEFAULT_HAUSDORFF_SAMPLES
) -> float:
    """
    Chordal Hausdorff distance between two generalized circles on the unit
    sphere. Each directed distance is located on a uniform angular grid and
    then refined with a bounded scalar maximisation.
    """
    if c1 == c2:
        return 0.0
    s1 = sphere_circle(c1.A, c1.B, c1.D)
    s2 = sphere_circle(c2.A, c2.B, c2.D)
    return max(
        _directed_hausdorff(s1, s2, samples), _directed_hausdorff(s2, s1, samples)
    )


def fit_sphere_circle(points: FloatArray, /) -> SphereCircle:
    """Total least squares plane through points of the sphere, cut with the sphere."""
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if points.shape[0] < 3:
        msg = f"At least 3 points are required to fit a circle, got {points.shape[0]}"
        raise ValueError(msg)
    centroid = points.mean(axis=0)
    _, _, vt = np.linalg.svd(points - centroid, full_matrices=False)
    normal = vt[-1]
    delta = float(normal @ centroid)
    if delta < 0.0:
        normal, delta = -normal, -delta
    return SphereCircle(delta * normal, normal, math.sqrt(max(0.0, 1.0 - delta * delta)))
