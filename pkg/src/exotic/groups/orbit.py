"""
Breadth-first orbit enumeration of circles under a finitely generated group of
Möbius and anti-Möbius maps, with a limit set approximation built on top.

Circles are carried as ``(N, 4)`` float rows ``[A, Re B, Im B, D]`` of
normalized Hermitian coefficients. Each level is expanded in fixed-size chunks
so that the output does not depend on the number of workers.
"""

from __future__ import annotations

import contextlib
import itertools
import json
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import TYPE_CHECKING, Any, Final, NamedTuple, final

import numpy as np
from pydantic import BaseModel, NonNegativeInt
from scipy import spatial

from exotic.constants import SCHEMA_VERSION, Classification
from exotic.exceptions import ClassificationError, ClosureUncertifiedError, DegenerateError
from exotic.geometry.moebius import (
    GenCircle,
    apply_circle_rows,
    classify,
    compose,
    fixed_points,
    normalize_rows,
)
from exotic.geometry.sphere import (
    chordal_diameters,
    circle_distance,
    circles_point_distance,
    fit_sphere_circle,
    inverse_stereographic_array,
    sample_circles,
    sphere_representatives,
    stereographic_array,
)
from exotic.models.config import OrbitConfig
from exotic.models.reports import CheckResult, ClosureReport
from exotic.utils import find_user_stacklevel, representation

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from exotic.geometry.sphere import SphereCircle
    from exotic.models.generators import GeneratorSet
    from exotic.types import BoolArray, ComplexArray, ComplexPoint, FloatArray, IntArray

_logger = logging.getLogger(__name__)

CHUNK_SIZE: Final = 65_536
DEFAULT_CLOSURE_SAMPLE: Final = 1_000
DEFAULT_POINT_DIAMETER: Final = 0.02
"""Orbit circles below this chordal diameter stand in for limit points."""
POINT_DECIMALS: Final = 12
PROFILE_SAMPLES: Final = 32
PROFILE_CANDIDATES: Final = 4

_NO_GENERATOR: Final = -1


class OrbitStats(BaseModel, frozen=True):
    per_depth: list[NonNegativeInt]
    """Retained circles at each depth, seeds included at depth 0."""
    pruned: NonNegativeInt = 0
    dedup_hits: NonNegativeInt = 0
    degenerate: NonNegativeInt = 0
    truncated: bool = False


class OrbitItem(NamedTuple):
    circle: GenCircle
    depth: int
    word: str


def _empty_rows() -> tuple[FloatArray, IntArray, IntArray]:
    return (
        np.empty((0, 4), dtype=np.float64),
        np.empty(0, dtype=np.int64),
        np.empty(0, dtype=np.int64),
    )


@final
@representation("size", "max_depth", "truncated")
class OrbitSet:
    """
    Deduplicated circles reached by words of length at most ``max_depth``,
    ordered by depth and then by rounded coefficients.

    ``pruned`` keeps the images that fell below the minimum diameter; they are
    not expanded further but still mark the location of the limit set.
    """

    __slots__ = (
        "_coefficients",
        "_depths",
        "_generators",
        "_parents",
        "config",
        "labels",
        "pruned",
        "stats",
    )

    def __init__(
        self,
        coefficients: FloatArray,
        depths: IntArray,
        parents: IntArray,
        generators: IntArray,
        *,
        labels: Sequence[str],
        config: OrbitConfig,
        stats: OrbitStats,
        pruned: FloatArray,
    ) -> None:
        self._coefficients = coefficients
        self._depths = depths
        self._parents = parents
        self._generators = generators
        self.labels = tuple(labels)
        self.config = config
        self.stats = stats
        self.pruned = pruned

    def __len__(self) -> int:
        return self._coefficients.shape[0]

    def __iter__(self) -> Iterator[OrbitItem]:
        return (self[i] for i in range(len(self)))

    def __getitem__(self, index: int, /) -> OrbitItem:
        return OrbitItem(
            GenCircle.from_array(self._coefficients[index]),
            int(self._depths[index]),
            self.word(index),
        )

    @property
    def size(self) -> int:
        return len(self)

    @property
    def max_depth(self) -> int:
        return self.config.max_depth

    @property
    def truncated(self) -> bool:
        return self.stats.truncated

    @property
    def coefficients(self) -> FloatArray:
        return self._coefficients

    @property
    def depths(self) -> IntArray:
        return self._depths

    def word(self, index: int, /) -> str:
        """Generator labels of the element mapping a seed to the item, last applied first."""
        letters: list[str] = []
        while (g := int(self._generators[index])) != _NO_GENERATOR:
            letters.append(self.labels[g])
            index = int(self._parents[index])
        return "".join(letters)

    def circles(self) -> list[GenCircle]:
        return [GenCircle.from_array(row) for row in self._coefficients]

    def at_depth(self, depth: int, /) -> FloatArray:
        return self._coefficients[self._depths == depth]

    def header(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA_VERSION,
            "kind": "orbit",
            "truncated": self.truncated,
            "labels": list(self.labels),
            "config": self.config.echo(),
            "stats": self.stats.model_dump(),
        }

    def iter_jsonl(self) -> Iterator[str]:
        """Header line followed by one line per circle; floats keep their ``repr``."""
        yield json.dumps(self.header())
        for i, (A, b_re, b_im, D) in enumerate(self._coefficients.tolist()):
            yield json.dumps({
                "A": A,
                "B_re": b_re,
                "B_im": b_im,
                "D": D,
                "depth": int(self._depths[i]),
                "word": self.word(i),
            })

    def write_jsonl(self, path: str | Path, /) -> Path:
        path = Path(path)
        with path.open("w", encoding="utf-8") as file:
            for line in self.iter_jsonl():
                file.write(line)
                file.write("\n")
        _logger.info("Wrote %d orbit circles to %s", len(self), path)
        return path


def _expand_chunk(
    generators: GeneratorSet, rows: FloatArray, last: IntArray, offset: int
) -> tuple[FloatArray, IntArray, IntArray]:
    images: list[FloatArray] = []
    parents: list[IntArray] = []
    labels: list[IntArray] = []
    for g, (m, involution) in enumerate(zip(generators.generators, generators.involutions)):
        # an involution undoes the step that produced the item
        index = np.flatnonzero(last != g) if involution else np.arange(rows.shape[0])
        if index.size == 0:
            continue
        images.append(apply_circle_rows(m, rows[index]))
        parents.append(index + offset)
        labels.append(np.full(index.size, g, dtype=np.int64))
    if not images:
        return _empty_rows()
    return np.concatenate(images), np.concatenate(parents), np.concatenate(labels)


def _first_of_close_pairs(rows: FloatArray, epsilon: float) -> BoolArray:
    """Keeps only the lowest index of every group of rows closer than ``epsilon``."""
    keep = np.ones(rows.shape[0], dtype=np.bool_)
    if rows.shape[0] > 1:
        pairs = spatial.cKDTree(rows).query_pairs(epsilon, p=np.inf, output_type="ndarray")
        if pairs.size:
            keep[pairs[:, 1]] = False
    return keep


class _Level(NamedTuple):
    rows: FloatArray
    parents: IntArray
    generators: IntArray


@final
class _OrbitBuilder:
    __slots__ = ("config", "generators", "levels", "pruned", "stats", "total")

    def __init__(self, generators: GeneratorSet, config: OrbitConfig) -> None:
        self.generators = generators
        self.config = config
        self.levels: list[_Level] = []
        self.pruned: list[FloatArray] = []
        self.total = 0
        self.stats: dict[str, Any] = {
            "per_depth": [],
            "pruned": 0,
            "dedup_hits": 0,
            "degenerate": 0,
            "truncated": False,
        }

    def _retained(self) -> FloatArray:
        return np.concatenate([level.rows for level in self.levels])

    def _order(self, rows: FloatArray, parents: IntArray, generators: IntArray) -> IntArray:
        keys = np.round(rows / self.config.dedup_epsilon)
        return np.lexsort((generators, parents, keys[:, 3], keys[:, 2], keys[:, 1], keys[:, 0]))

    def _accept(self, rows: FloatArray, parents: IntArray, generators: IntArray) -> bool:
        """Dedups, orders and stores a level; returns ``False`` once ``max_items`` is hit."""
        eps = self.config.dedup_epsilon
        order = self._order(rows, parents, generators)
        rows, parents, generators = rows[order], parents[order], generators[order]

        keep = _first_of_close_pairs(rows, eps)
        if self.levels and rows.shape[0]:
            tree = spatial.cKDTree(self._retained())
            seen = tree.query_ball_point(rows, eps, p=np.inf, return_length=True) > 0
            keep &= ~seen
        self.stats["dedup_hits"] += int(rows.shape[0] - np.count_nonzero(keep))
        rows, parents, generators = rows[keep], parents[keep], generators[keep]

        room = self.config.max_items - self.total
        complete = rows.shape[0] <= room
        if not complete:
            rows, parents, generators = rows[:room], parents[:room], generators[:room]
            self.stats["truncated"] = True
            _logger.warning(
                "Orbit truncated at depth %d after %d circles",
                len(self.levels), self.config.max_items,
            )  # fmt: skip

        self.levels.append(_Level(rows, parents, generators))
        self.stats["per_depth"].append(rows.shape[0])
        self.total += rows.shape[0]
        return complete

    def _expand(
        self, level: _Level, offset: int, pool: ThreadPoolExecutor | None
    ) -> tuple[FloatArray, IntArray, IntArray]:
        jobs = (
            (
                self.generators,
                level.rows[i : i + CHUNK_SIZE],
                level.generators[i : i + CHUNK_SIZE],
                offset + i,
            )
            for i in range(0, level.rows.shape[0], CHUNK_SIZE)
        )
        mapper = pool.map if pool is not None else map
        parts = list(mapper(lambda job: _expand_chunk(*job), jobs))
        if not parts:
            return _empty_rows()
        return (
            np.concatenate([p[0] for p in parts]),
            np.concatenate([p[1] for p in parts]),
            np.concatenate([p[2] for p in parts]),
        )

    def _step(self, pool: ThreadPoolExecutor | None) -> bool:
        frontier = self.levels[-1]
        offset = self.total - frontier.rows.shape[0]
        images, parents, generators = self._expand(frontier, offset, pool)

        rows, valid = normalize_rows(images)
        self.stats["degenerate"] += int(valid.size - np.count_nonzero(valid))
        rows, parents, generators = rows[valid], parents[valid], generators[valid]

        small = chordal_diameters(rows[:, 0], rows[:, 3]) < self.config.min_diameter
        if small.any():
            self.pruned.append(rows[small])
            self.stats["pruned"] += int(np.count_nonzero(small))
            rows, parents, generators = rows[~small], parents[~small], generators[~small]

        return self._accept(rows, parents, generators)

    def run(self, seeds: Sequence[GenCircle]) -> OrbitSet:
        seed_rows = np.array([c.as_array() for c in seeds], dtype=np.float64).reshape(-1, 4)
        count = seed_rows.shape[0]
        running = self._accept(
            seed_rows,
            np.full(count, _NO_GENERATOR, dtype=np.int64),
            np.full(count, _NO_GENERATOR, dtype=np.int64),
        )

        workers = self.config.workers
        pool_context = (
            ThreadPoolExecutor(max_workers=workers)
            if workers > 1
            else contextlib.nullcontext()
        )
        with pool_context as pool:
            for depth in range(1, self.config.max_depth + 1):
                if not running or self.levels[-1].rows.shape[0] == 0:
                    break
                running = self._step(pool)
                _logger.debug("Depth %d: %d circles", depth, self.stats["per_depth"][-1])

        depths = np.concatenate([
            np.full(level.rows.shape[0], depth, dtype=np.int64)
            for depth, level in enumerate(self.levels)
        ])
        return OrbitSet(
            self._retained(),
            depths,
            np.concatenate([level.parents for level in self.levels]),
            np.concatenate([level.generators for level in self.levels]),
            labels=self.generators.labels,
            config=self.config,
            stats=OrbitStats.model_validate(self.stats),
            pruned=np.concatenate(self.pruned) if self.pruned else np.empty((0, 4)),
        )


def enumerate_orbit(
    generators: GeneratorSet,
    seed: GenCircle | Sequence[GenCircle],
    config: OrbitConfig | None = None,
    /,
) -> OrbitSet:
    """
    All images of ``seed`` under words of length at most ``config.max_depth``.

    Items are deduplicated within ``config.dedup_epsilon`` in the max norm of
    normalized coefficients. Images smaller than ``config.min_diameter`` are
    moved to :attr:`OrbitSet.pruned`. The enumeration stops with
    ``truncated=True`` once ``config.max_items`` circles are retained.
    """
    config = config or OrbitConfig()
    seeds = [seed] if isinstance(seed, GenCircle) else list(seed)
    if not seeds:
        msg = "at least one seed circle is required"
        raise ValueError(msg)
    orbit = _OrbitBuilder(generators, config).run(seeds)
    _logger.info(
        "Orbit: %d circles, %d pruned, %d duplicates, truncated=%s",
        len(orbit), orbit.stats.pruned, orbit.stats.dedup_hits, orbit.truncated,
    )  # fmt: skip
    return orbit


def closure_check(
    generators: GeneratorSet,
    orbit: OrbitSet,
    sample: int = DEFAULT_CLOSURE_SAMPLE,
    /,
    *,
    seed: int = 0,
) -> ClosureReport:
    """
    Applies random generators to random items below the maximum depth and looks
    the images up in the orbit. Misses are expected only among images that
    pruning removed; any other miss fails the check.
    """
    if sample < 1:
        msg = f"closure check needs at least one sample, got {sample}"
        raise ValueError(msg)
    if orbit.truncated:
        raise ClosureUncertifiedError

    eps = orbit.config.dedup_epsilon
    eligible = np.flatnonzero(orbit.depths < orbit.max_depth)
    if eligible.size == 0:
        return ClosureReport(
            sample_size=0,
            misses=0,
            pruned_misses=0,
            epsilon=eps,
            checks={"closed": CheckResult.flag(True)},
        )

    rng = np.random.default_rng(seed)
    items = rng.choice(eligible, size=sample)
    letters = rng.integers(0, len(generators), size=sample)
    tree = spatial.cKDTree(orbit.coefficients)

    misses = pruned_misses = 0
    for g, m in enumerate(generators.generators):
        chosen = items[letters == g]
        if chosen.size == 0:
            continue
        rows, valid = normalize_rows(apply_circle_rows(m, orbit.coefficients[chosen]))
        rows = rows[valid]
        found = tree.query_ball_point(rows, 2.0 * eps, p=np.inf, return_length=True) > 0
        missing = rows[~found]
        misses += missing.shape[0]
        diameters = chordal_diameters(missing[:, 0], missing[:, 3])
        pruned_misses += int(np.count_nonzero(diameters < orbit.config.min_diameter))

    unexplained = misses - pruned_misses
    if unexplained:
        _logger.warning("Closure check: %d of %d images missing", unexplained, sample)
    return ClosureReport(
        sample_size=sample,
        misses=misses,
        pruned_misses=pruned_misses,
        epsilon=eps,
        checks={"closed": CheckResult.within(float(unexplained), 0.0)},
    )


@final
class PointCloud(NamedTuple):
    """Limit set sample on the unit sphere, deduplicated and sorted."""

    sphere: FloatArray
    truncated: bool

    @property
    def size(self) -> int:
        return self.sphere.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.size == 0

    def points(self) -> ComplexArray:
        return inverse_stereographic_array(self.sphere)

    def fit(self) -> tuple[SphereCircle, float]:
        """Best-fit circle on the sphere and the largest chordal deviation from it."""
        circle = fit_sphere_circle(self.sphere)
        return circle, float(circle.distance(self.sphere).max())


def _product_fixed_points(generators: GeneratorSet) -> list[ComplexPoint]:
    points: list[ComplexPoint] = []
    for g1, g2 in itertools.permutations(generators.generators, 2):
        product = compose(g1, g2)
        if not product.is_holomorphic:
            continue
        try:
            if classify(product) in {Classification.IDENTITY, Classification.ELLIPTIC}:
                continue
            points.extend(fixed_points(product))
        except (ClassificationError, DegenerateError):
            continue
    return points


def approximate_limit_set(
    generators: GeneratorSet,
    config: OrbitConfig | None = None,
    /,
    *,
    seeds: Sequence[GenCircle] | None = None,
    point_diameter: float = DEFAULT_POINT_DIAMETER,
) -> PointCloud:
    """
    Sphere points approximating the limit set: the small-cap centres of orbit
    circles of chordal diameter below ``point_diameter`` (pruned ones
    included), plus fixed points of non-elliptic products of two generators.

    The orbit is seeded with the mirrors of the anti-holomorphic generators,
    or the unit circle when there are none.
    """
    config = config or OrbitConfig()
    seeds = list(seeds) if seeds else generators.mirrors() or [GenCircle.unit_circle()]
    orbit = enumerate_orbit(generators, seeds, config)

    rows = np.concatenate([orbit.coefficients, orbit.pruned])
    small = rows[chordal_diameters(rows[:, 0], rows[:, 3]) < point_diameter]
    parts = [sphere_representatives(small)] if small.shape[0] else []
    if config.max_depth >= 2:
        fixed = _product_fixed_points(generators)
        if fixed:
            parts.append(stereographic_array(np.array(fixed, dtype=np.complex128)))

    sphere = (
        np.unique(np.round(np.concatenate(parts), POINT_DECIMALS), axis=0)
        if parts
        else np.empty((0, 3))
    )
    cloud = PointCloud(sphere, orbit.truncated)
    if cloud.is_empty:
        warnings.warn(
            "limit set approximation is empty; increase max_depth or point_diameter",
            stacklevel=find_user_stacklevel(),
        )
    _logger.info("Limit set: %d points (truncated=%s)", cloud.size, cloud.truncated)
    return cloud


def _sampled_hausdorff(rows: FloatArray, target: FloatArray, thetas: FloatArray) -> FloatArray:
    target_points = sample_circles(target, thetas)[0]
    out = np.empty(rows.shape[0], dtype=np.float64)
    for start in range(0, rows.shape[0], CHUNK_SIZE):
        chunk = rows[start : start + CHUNK_SIZE]
        points = sample_circles(chunk, thetas)
        outward = circles_point_distance(target, points.reshape(-1, 3))
        inward = circles_point_distance(chunk, target_points)
        out[start : start + CHUNK_SIZE] = np.maximum(
            outward.reshape(chunk.shape[0], -1).max(axis=1), inward.max(axis=1)
        )
    return out


def distance_profile(
    orbit: OrbitSet,
    target: GenCircle,
    /,
    *,
    samples: int = PROFILE_SAMPLES,
    candidates: int = PROFILE_CANDIDATES,
) -> list[tuple[int, float]]:
    """
    ``(depth, distance)`` for every non-empty depth: the smallest chordal
    Hausdorff distance from a circle of that depth to ``target``. A sampled
    estimate ranks the circles and the best ``candidates`` are measured exactly.
    """
    thetas = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    target_row = target.as_array()[None, :]
    profile: list[tuple[int, float]] = []
    for depth in range(len(orbit.stats.per_depth)):
        rows = orbit.at_depth(depth)
        if rows.shape[0] == 0:
            continue
        estimate = _sampled_hausdorff(rows, target_row, thetas)
        best = np.argsort(estimate, kind="stable")[:candidates]
        distance = min(circle_distance(GenCircle.from_array(rows[i]), target) for i in best)
        profile.append((depth, distance))
    return profile
