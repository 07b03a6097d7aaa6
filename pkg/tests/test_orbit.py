from __future__ import annotations

import json
from pathlib import Path
from typing import Final

import numpy as np
import pytest
from scipy import spatial

from exotic.exceptions import ClosureUncertifiedError
from exotic.geometry import GenCircle, MoebiusMap, apply_circle, circle_distance
from exotic.geometry.sphere import chordal_diameters
from exotic.groups import (
    approximate_limit_set,
    closure_check,
    enumerate_orbit,
    exotic_circle,
    generator_set,
    limit_circle,
)
from exotic.groups.orbit import OrbitSet, distance_profile
from exotic.groups.quadgroup import LIMIT_FIT_TOLERANCE, summarize_limit_set
from exotic.models import GeneratorSet, OrbitConfig, QuadGroupData

SHALLOW: Final = OrbitConfig(max_depth=5, min_diameter=1e-2)
UNPRUNED: Final = OrbitConfig(max_depth=8, min_diameter=0.0)
LINE_RE_1: Final = GenCircle.line(1.0, 1j)


@pytest.fixture
def unit_inversion() -> GeneratorSet:
    return GeneratorSet.from_circles([GenCircle.unit_circle()], ["u"])


class TestEnumerateOrbit:
    def test_single_inversion(self, unit_inversion: GeneratorSet) -> None:
        orbit = enumerate_orbit(unit_inversion, LINE_RE_1)
        assert len(orbit) == 2
        assert orbit.stats.per_depth == [1, 1, 0]
        seed, image = orbit
        assert seed.depth == 0
        assert seed.word == ""
        assert image.depth == 1
        assert image.word == "u"
        assert image.circle.center == pytest.approx(0.5)
        assert image.circle.radius == pytest.approx(0.5)

    def test_invariant_seed(self, unit_inversion: GeneratorSet) -> None:
        orbit = enumerate_orbit(unit_inversion, GenCircle.unit_circle())
        assert len(orbit) == 1
        assert orbit.stats.dedup_hits == 1

    def test_identity(self) -> None:
        orbit = enumerate_orbit(GeneratorSet([MoebiusMap.IDENTITY]), GenCircle.unit_circle())
        assert len(orbit) == 1

    def test_words_of_holomorphic_generator(self) -> None:
        translation = GeneratorSet([MoebiusMap(1, 1, 0, 1)], ["T"])
        orbit = enumerate_orbit(translation, GenCircle.unit_circle(), OrbitConfig(max_depth=3))
        assert [item.word for item in orbit] == ["", "T", "TT", "TTT"]
        assert [item.circle.center for item in orbit] == pytest.approx([0, 1, 2, 3])

    def test_max_depth_zero_keeps_seeds(self, unit_inversion: GeneratorSet) -> None:
        orbit = enumerate_orbit(
            unit_inversion, [LINE_RE_1, GenCircle.real_axis()], OrbitConfig(max_depth=0)
        )
        assert len(orbit) == 2
        assert orbit.depths.tolist() == [0, 0]

    def test_duplicate_seeds(self, unit_inversion: GeneratorSet) -> None:
        orbit = enumerate_orbit(unit_inversion, [LINE_RE_1, LINE_RE_1], OrbitConfig(max_depth=0))
        assert len(orbit) == 1

    def test_requires_seed(self, unit_inversion: GeneratorSet) -> None:
        with pytest.raises(ValueError, match="at least one seed"):
            enumerate_orbit(unit_inversion, [])

    def test_pruning(self, exotic_datum: QuadGroupData) -> None:
        orbit = enumerate_orbit(generator_set(exotic_datum), exotic_circle(exotic_datum), SHALLOW)
        assert orbit.stats.pruned == orbit.pruned.shape[0]
        diameters = chordal_diameters(orbit.coefficients[:, 0], orbit.coefficients[:, 3])
        assert diameters.min() >= SHALLOW.min_diameter

    def test_no_duplicates(self, exotic_datum: QuadGroupData) -> None:
        orbit = enumerate_orbit(generator_set(exotic_datum), exotic_circle(exotic_datum), SHALLOW)
        rows = orbit.coefficients
        gaps = np.abs(rows[:, None, :] - rows[None, :, :]).max(axis=2)
        np.fill_diagonal(gaps, np.inf)
        assert gaps.min() > SHALLOW.dedup_epsilon

    def test_words_reproduce_circles(self, exotic_datum: QuadGroupData) -> None:
        generators = generator_set(exotic_datum)
        by_label = dict(zip(generators.labels, generators.generators))
        seed = exotic_circle(exotic_datum)
        orbit = enumerate_orbit(generators, seed, OrbitConfig(max_depth=3))
        for item in orbit:
            circle = seed
            letters = [item.word[i : i + 2] for i in range(0, len(item.word), 2)]
            for label in reversed(letters):
                circle = apply_circle(by_label[label], circle)
            assert circle.is_close(item.circle, tol=1e-9)
            assert len(item.word) == 2 * item.depth

    def test_worker_count_does_not_change_serialization(
        self, exotic_datum: QuadGroupData, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        monkeypatch.setattr("exotic.groups.orbit.CHUNK_SIZE", 16)
        generators = generator_set(exotic_datum)
        seed = exotic_circle(exotic_datum)
        serial = enumerate_orbit(generators, seed, OrbitConfig(max_depth=6, workers=1))
        parallel = enumerate_orbit(generators, seed, OrbitConfig(max_depth=6, workers=8))
        # several chunks per level
        assert max(serial.stats.per_depth) > 4 * 16
        assert list(serial.iter_jsonl()) == list(parallel.iter_jsonl())

    def test_truncation(self, exotic_datum: QuadGroupData) -> None:
        orbit = enumerate_orbit(
            generator_set(exotic_datum), exotic_circle(exotic_datum), OrbitConfig(max_items=10)
        )
        assert orbit.truncated
        assert len(orbit) == 10
        assert repr(orbit) == "OrbitSet(size=10, max_depth=12, truncated=True)"

    def test_jsonl(self, unit_inversion: GeneratorSet, tmp_path: Path) -> None:
        orbit = enumerate_orbit(unit_inversion, LINE_RE_1)
        path = orbit.write_jsonl(tmp_path / "orbit.jsonl")
        header, *items = (json.loads(line) for line in path.read_text().splitlines())
        assert header["kind"] == "orbit"
        assert header["schema"] == 1
        assert header["labels"] == ["u"]
        assert header["config"]["maxDepth"] == 12
        assert header["truncated"] is False
        assert [item["word"] for item in items] == ["", "u"]
        assert GenCircle.from_dict(items[1]) == orbit[1].circle


class TestClosureCheck:
    def test_closed(self, exotic_datum: QuadGroupData) -> None:
        generators = generator_set(exotic_datum)
        orbit = enumerate_orbit(generators, exotic_circle(exotic_datum), SHALLOW)
        report = closure_check(generators, orbit, 500)
        assert report.passed, report
        assert report.sample_size == 500
        assert report.misses == report.pruned_misses

    def test_deterministic(self, exotic_datum: QuadGroupData) -> None:
        generators = generator_set(exotic_datum)
        orbit = enumerate_orbit(generators, exotic_circle(exotic_datum), SHALLOW)
        assert closure_check(generators, orbit, 200) == closure_check(generators, orbit, 200)

    def test_detects_missing_images(self, unit_inversion: GeneratorSet) -> None:
        orbit = enumerate_orbit(unit_inversion, LINE_RE_1)
        other = GeneratorSet.from_circles([GenCircle.from_center_radius(3.0, 1.0)])
        report = closure_check(other, orbit, 50)
        assert not report.passed
        assert report.misses == 50

    def test_truncated_orbit(self, exotic_datum: QuadGroupData) -> None:
        generators = generator_set(exotic_datum)
        orbit = enumerate_orbit(generators, exotic_circle(exotic_datum), OrbitConfig(max_items=5))
        with pytest.raises(ClosureUncertifiedError, match="truncated"):
            closure_check(generators, orbit)

    def test_rejects_empty_sample(self, unit_inversion: GeneratorSet) -> None:
        orbit = enumerate_orbit(unit_inversion, LINE_RE_1)
        with pytest.raises(ValueError, match="at least one sample"):
            closure_check(unit_inversion, orbit, 0)

    @pytest.mark.slow
    def test_unpruned_depth_eight(self, exotic_datum: QuadGroupData) -> None:
        generators = generator_set(exotic_datum)
        orbit = enumerate_orbit(generators, exotic_circle(exotic_datum), UNPRUNED)
        assert not orbit.truncated
        report = closure_check(generators, orbit, 1000)
        assert report.passed, report
        assert report.sample_size == 1000
        assert report.misses == 0


@pytest.mark.slow
class TestDepthEightOrbit:
    @pytest.fixture(scope="class")
    def mirror_orbit(self, exotic_datum: QuadGroupData) -> OrbitSet:
        generators = generator_set(exotic_datum)
        return enumerate_orbit(generators, generators.mirrors(), UNPRUNED)

    def test_no_retained_pair_within_epsilon(self, mirror_orbit: OrbitSet) -> None:
        tree = spatial.cKDTree(mirror_orbit.coefficients)
        assert tree.query_pairs(UNPRUNED.dedup_epsilon, p=np.inf) == set()

    def test_diameters_decay_geometrically(self, mirror_orbit: OrbitSet) -> None:
        rows = mirror_orbit.coefficients
        diameters = chordal_diameters(rows[:, 0], rows[:, 3])
        medians = np.array([
            np.median(diameters[mirror_orbit.depths == depth]) for depth in range(1, 9)
        ])  # fmt: skip
        slope = np.polyfit(np.arange(1, 9), np.log(medians), 1)[0]
        assert slope < 0.0
        assert medians[-1] < medians[0] / 10


class TestLimitSet:
    def test_fuchsian_is_round(self, fuchsian_datum: QuadGroupData) -> None:
        cloud = approximate_limit_set(
            generator_set(fuchsian_datum), OrbitConfig(max_depth=8), point_diameter=1e-3
        )
        assert cloud.size >= 4
        summary = summarize_limit_set(fuchsian_datum, cloud)
        assert summary.fuchsian
        assert summary.fit_deviation < LIMIT_FIT_TOLERANCE
        assert summary.p_on_fit_circle
        assert np.abs(np.abs(cloud.points()) - 1.0 / np.sqrt(3.0)).max() < 1e-2

    def test_exotic_is_not_round(self, exotic_datum: QuadGroupData) -> None:
        cloud = approximate_limit_set(generator_set(exotic_datum), OrbitConfig(max_depth=6))
        summary = summarize_limit_set(exotic_datum, cloud)
        assert not summary.fuchsian
        assert summary.fit_deviation > LIMIT_FIT_TOLERANCE

    def test_contains_fixed_points(self, exotic_datum: QuadGroupData) -> None:
        cloud = approximate_limit_set(generator_set(exotic_datum), OrbitConfig(max_depth=2))
        points = cloud.points()
        for z in (exotic_datum.p, exotic_datum.p_prime, exotic_datum.q, exotic_datum.q_prime):
            assert np.abs(points - z).min() < 1e-8

    def test_empty_at_depth_zero(self, exotic_datum: QuadGroupData) -> None:
        with pytest.warns(UserWarning, match="limit set approximation is empty"):
            cloud = approximate_limit_set(generator_set(exotic_datum), OrbitConfig(max_depth=0))
        assert cloud.is_empty
        summary = summarize_limit_set(exotic_datum, cloud)
        assert summary.points == 0
        assert summary.fit_deviation == 0.0
        assert summary.p_on_fit_circle is None


class TestDistanceProfile:
    def test_approaches_limit_circle(self, exotic_datum: QuadGroupData) -> None:
        seed = exotic_circle(exotic_datum)
        target = limit_circle(exotic_datum)
        orbit = enumerate_orbit(generator_set(exotic_datum), seed, OrbitConfig(max_depth=6))
        profile = distance_profile(orbit, target)
        depths = [depth for depth, _ in profile]
        assert depths == list(range(7))
        assert profile[0][1] == pytest.approx(circle_distance(seed, target))
        assert profile[-1][1] < profile[0][1] / 10
