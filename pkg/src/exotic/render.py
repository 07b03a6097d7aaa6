"""
Deterministic SVG scenes of circle sets and point clouds.

Only ``svg``, ``g``, ``circle``, ``line`` and ``clipPath`` elements are
emitted. Every number goes through :func:`~exotic.utils.format_number`, so the
same scene always serializes to the same bytes.
"""

from __future__ import annotations

import logging
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Final, NamedTuple, final

import numpy as np
from pydantic import BaseModel, Field, PositiveFloat

from exotic.groups.orbit import OrbitSet, PointCloud
from exotic.models.custom_types import Point
from exotic.types import ComplexArray, FloatArray  # noqa: TC001
from exotic.utils import format_number

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from typing_extensions import Self

    from exotic.geometry.moebius import GenCircle

_logger = logging.getLogger(__name__)

SVG_NAMESPACE: Final = "http://www.w3.org/2000/svg"
CLIP_ID: Final = "viewport"
MIN_SIZE_PX: Final = 16
SUB_PIXEL_RADIUS: Final = 0.5
NEAR_LINE_FACTOR: Final = 1e5
"""Circles with a pixel radius above this multiple of the image size are drawn as lines."""
DIGITS: Final = 9


class Style(BaseModel, frozen=True, populate_by_name=True):
    color: str = "#000000"
    stroke_width: Annotated[PositiveFloat, Field(1.0, alias="strokeWidth")]
    fill: bool = False
    point_radius: Annotated[PositiveFloat, Field(1.0, alias="pointRadius")]


class Viewport(BaseModel, frozen=True, populate_by_name=True):
    """Square window of the plane, ``center ± half_width`` on both axes."""

    center: Point = 0j
    half_width: Annotated[PositiveFloat, Field(alias="halfWidth")]

    def scale(self, size: int, /) -> float:
        return size / (2.0 * self.half_width)

    def to_pixels(self, z: ComplexArray, size: int, /) -> FloatArray:
        """``(N, 2)`` pixel coordinates, y pointing down."""
        z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
        k = self.scale(size)
        left = self.center.real - self.half_width
        top = self.center.imag + self.half_width
        return np.stack([(z.real - left) * k, (top - z.imag) * k], axis=1)

    def from_pixels(self, pixels: FloatArray, size: int, /) -> ComplexArray:
        pixels = np.atleast_2d(np.asarray(pixels, dtype=np.float64))
        k = self.scale(size)
        x = pixels[:, 0] / k + self.center.real - self.half_width
        y = self.center.imag + self.half_width - pixels[:, 1] / k
        return x + 1j * y


def _empty_circles() -> FloatArray:
    return np.empty((0, 4), dtype=np.float64)


def _empty_points() -> ComplexArray:
    return np.empty(0, dtype=np.complex128)


@final
@dataclass(frozen=True, slots=True, eq=False)
class Layer:
    """Circles as ``[A, Re B, Im B, D]`` rows and points, drawn in one style."""

    name: str
    circles: FloatArray = field(default_factory=_empty_circles)
    points: ComplexArray = field(default_factory=_empty_points)
    style: Style = field(default_factory=Style)

    @property
    def is_empty(self) -> bool:
        return self.circles.shape[0] == 0 and self.points.shape[0] == 0

    @classmethod
    def from_orbit(
        cls, orbit: OrbitSet, /, *, name: str = "orbit", style: Style | None = None
    ) -> Self:
        return cls(name, circles=orbit.coefficients, style=style or Style())

    @classmethod
    def from_circles(
        cls, circles: Iterable[GenCircle], /, *, name: str = "circles", style: Style | None = None
    ) -> Self:
        rows = np.array([c.as_array() for c in circles], dtype=np.float64).reshape(-1, 4)
        return cls(name, circles=rows, style=style or Style())

    @classmethod
    def from_points(
        cls,
        points: PointCloud | Sequence[complex] | ComplexArray,
        /,
        *,
        name: str = "points",
        style: Style | None = None,
    ) -> Self:
        values = (
            points.points()
            if isinstance(points, PointCloud)
            else np.asarray(points, dtype=np.complex128)
        )
        finite = values[np.isfinite(values.real) & np.isfinite(values.imag)]
        return cls(name, points=finite, style=style or Style(fill=True))


class Scene(
    BaseModel, frozen=True, populate_by_name=True, arbitrary_types_allowed=True
):
    layers: tuple[Layer, ...] = ()
    viewport: Viewport
    size_px: Annotated[int, Field(1024, ge=MIN_SIZE_PX, alias="sizePx")]


class RenderStats(NamedTuple):
    circles: int
    lines: int
    points: int
    sub_pixel: int
    offscreen: int


@final
class _SvgWriter:
    __slots__ = (
        "_clip_radius",
        "_half",
        "_size",
        "_viewport",
        "circles",
        "lines",
        "offscreen",
        "points",
        "sub_pixel",
    )

    def __init__(self, scene: Scene) -> None:
        self._viewport = scene.viewport
        self._size = scene.size_px
        self._half = scene.size_px / 2.0
        self._clip_radius = scene.size_px * math.sqrt(2.0) / 2.0
        self.circles = self.lines = self.points = self.sub_pixel = self.offscreen = 0

    @staticmethod
    def _number(value: float) -> str:
        return format_number(value, DIGITS)

    def _line(self, group: ET.Element, origin: FloatArray, direction: FloatArray) -> bool:
        """Emits the chord of the clip circle cut by a pixel-space line."""
        unit = direction / np.linalg.norm(direction)
        centre = np.array([self._half, self._half])
        foot = origin + float((centre - origin) @ unit) * unit
        gap = float(np.linalg.norm(centre - foot))
        if gap >= self._clip_radius:
            return False
        reach = math.sqrt(self._clip_radius**2 - gap**2)
        (x1, y1), (x2, y2) = foot - reach * unit, foot + reach * unit
        ET.SubElement(group, "line", {
            "x1": self._number(x1),
            "y1": self._number(y1),
            "x2": self._number(x2),
            "y2": self._number(y2),
        })  # fmt: skip
        return True

    def _exact_line(self, group: ET.Element, B: complex, D: float) -> None:
        # 2 Re(B̄z) + D = 0: normal B through -D·B / (2|B|²)
        point = -D * B / (2.0 * abs(B) ** 2)
        origin, ahead = self._viewport.to_pixels(np.array([point, point + 1j * B]), self._size)
        if self._line(group, origin, ahead - origin):
            self.lines += 1
        else:
            self.offscreen += 1

    def _near_line(self, group: ET.Element, centre: FloatArray, radius: float) -> None:
        towards = np.array([self._half, self._half]) - centre
        unit = towards / np.linalg.norm(towards)
        touch = centre + radius * unit
        if self._line(group, touch, np.array([-unit[1], unit[0]])):
            self.lines += 1
        else:
            self.offscreen += 1

    def add_circles(self, group: ET.Element, rows: FloatArray) -> None:
        k = self._viewport.scale(self._size)
        for A, br, bi, D in rows.tolist():
            B = complex(br, bi)
            if A == 0.0:
                self._exact_line(group, B, D)
                continue
            radius = k / abs(A)
            if radius < SUB_PIXEL_RADIUS:
                self.sub_pixel += 1
                continue
            centre = self._viewport.to_pixels(np.array([-B / A]), self._size)[0]
            if radius > NEAR_LINE_FACTOR * self._size:
                self._near_line(group, centre, radius)
                continue
            ET.SubElement(group, "circle", {
                "cx": self._number(centre[0]),
                "cy": self._number(centre[1]),
                "r": self._number(radius),
            })  # fmt: skip
            self.circles += 1

    def add_points(self, group: ET.Element, points: ComplexArray, radius: float) -> None:
        r = self._number(radius)
        for x, y in self._viewport.to_pixels(points, self._size).tolist():
            ET.SubElement(group, "circle", {"cx": self._number(x), "cy": self._number(y), "r": r})
            self.points += 1

    def stats(self) -> RenderStats:
        return RenderStats(self.circles, self.lines, self.points, self.sub_pixel, self.offscreen)


def _layer_group(root: ET.Element, index: int, layer: Layer) -> ET.Element:
    style = layer.style
    attributes = {
        "id": f"layer-{index}-{layer.name}",
        "clip-path": f"url(#{CLIP_ID})",
        "stroke": style.color,
        "stroke-width": format_number(style.stroke_width, DIGITS),
        "fill": style.color if style.fill else "none",
    }
    if layer.points.shape[0] and not layer.circles.shape[0]:
        attributes["stroke"] = "none"
        attributes["fill"] = style.color
    return ET.SubElement(root, "g", attributes)


def _render(scene: Scene) -> tuple[str, RenderStats]:
    size = format_number(scene.size_px, DIGITS)
    root = ET.Element("svg", {
        "xmlns": SVG_NAMESPACE,
        "version": "1.1",
        "width": size,
        "height": size,
        "viewBox": f"0 0 {size} {size}",
    })  # fmt: skip
    clip = ET.SubElement(root, "clipPath", {"id": CLIP_ID})
    half = scene.size_px / 2.0
    ET.SubElement(clip, "circle", {
        "cx": format_number(half, DIGITS),
        "cy": format_number(half, DIGITS),
        "r": format_number(scene.size_px * math.sqrt(2.0) / 2.0, DIGITS),
    })  # fmt: skip

    writer = _SvgWriter(scene)
    if all(layer.is_empty for layer in scene.layers):
        root.append(ET.Comment(" warning: empty scene "))
        _logger.warning("Rendering an empty scene")

    for index, layer in enumerate(scene.layers):
        group = _layer_group(root, index, layer)
        before = writer.stats()
        writer.add_circles(group, layer.circles)
        writer.add_points(group, layer.points, layer.style.point_radius)
        after = writer.stats()
        dropped = after.sub_pixel - before.sub_pixel
        offscreen = after.offscreen - before.offscreen
        if dropped or offscreen:
            group.insert(0, ET.Comment(f" dropped {dropped} sub-pixel, {offscreen} offscreen "))

    body = ET.tostring(root, encoding="unicode", short_empty_elements=True)
    return f'<?xml version="1.0" encoding="UTF-8"?>\n{body}\n', writer.stats()


def render_svg(scene: Scene, /) -> str:
    """Serializes a scene; identical scenes give identical text."""
    return _render(scene)[0]


def write_svg(scene: Scene, path: str | Path, /) -> RenderStats:
    text, stats = _render(scene)
    Path(path).write_text(text, encoding="utf-8", newline="\n")
    _logger.info(
        "Wrote %s: %d circles, %d lines, %d points, %d sub-pixel dropped",
        path, stats.circles, stats.lines, stats.points, stats.sub_pixel,
    )  # fmt: skip
    return stats
