"""Tests for osculating paths, plaquette moves and highest configurations."""

import numpy as np
import pytest

from emptiness.core.errors import ConvergenceError, ValidationError
from emptiness.opc import (
    C_MINUS,
    C_PLUS,
    OscPathConfig,
    aligned_run_detector,
    aligned_run_rate,
    apply_move,
    blockade_check,
    flippable_plaquettes,
    from_opc,
    from_polylines,
    height,
    highest_opc,
    raise_randomly,
    random_fixture,
    rectangle_from_spins,
    render_ascii,
    subrectangle,
    to_opc,
    trace_paths,
    validate_opc,
)
from emptiness.sixvertex import SixVertexConfig, enumerate_configs, sample_configs, validate_config, vertex_types

# Black paths of a 5 x 5 rectangle in figure coordinates, and the highest
# configuration with the same boundary.
OSC_PATHS = [
    [(1, 0), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (6, 3)],
    [(2, 0), (2, 1), (4, 1), (4, 2), (6, 2)],
    [(0, 3), (2, 3), (2, 4), (4, 4), (4, 5), (6, 5)],
    [(0, 4), (1, 4), (1, 5), (2, 5), (2, 6)],
]
HIGHEST_PATHS = [
    [(2, 0), (2, 2), (6, 2)],
    [(1, 0), (1, 3), (6, 3)],
    [(0, 3), (1, 3), (1, 4), (2, 4), (2, 5), (6, 5)],
    [(0, 4), (1, 4), (1, 5), (2, 5), (2, 6)],
]
# Arrows of the same configuration: horizontal rows y = 1..5 (x = 0..5),
# vertical rows y = 0..5 (x = 1..5).
OSC_H_ARROWS = ["RLLLRR", "RRLRLL", "LLRLLL", "LRLLRR", "RLRRLL"]
OSC_V_ARROWS = ["DDUUU", "UDUDU", "UUDUU", "UDUUU", "DUUDU", "UDUUU"]

CORNER_PATH = [[(0, 1), (2, 1), (2, 3)]]


def _arrow_spins(h_rows, v_rows):
    h = np.array([[1 if c == "R" else -1 for c in row] for row in h_rows]).T
    v = np.array([[1 if c == "U" else -1 for c in row] for row in v_rows]).T
    return h, v


def _points(polyline):
    points = [polyline[0]]
    for (x1, y1) in polyline[1:]:
        x0, y0 = points[-1]
        while (x0, y0) != (x1, y1):
            x0, y0 = (x0 + 1, y0) if x0 < x1 else (x0, y0 + 1)
            points.append((x0, y0))
    return points


def _height_by_paths(x):
    total = 0
    for path in trace_paths(x):
        points = set(_points(path))
        for px in range(1, x.width + 1):
            for py in range(1, x.height + 1):
                if (px, py) in points:
                    continue
                total += any(qx <= px and qy > py for qx, qy in points)
    return total


def _highest_random_order(x, rng):
    """+ moves on randomly chosen C- plaquettes; returns the end point and the heights seen."""
    heights = [height(x).value]
    while True:
        minus = [p for p, kind in flippable_plaquettes(x) if kind == C_MINUS]
        if not minus:
            return x, heights
        x = apply_move(x, minus[int(rng.integers(len(minus)))], "+")
        heights.append(height(x).value)


@pytest.fixture
def osc() -> OscPathConfig:
    return from_polylines(5, 5, OSC_PATHS)


@pytest.fixture
def highest() -> OscPathConfig:
    return from_polylines(5, 5, HIGHEST_PATHS)


@pytest.fixture
def corner() -> OscPathConfig:
    return from_polylines(2, 2, CORNER_PATH)


class TestPaths:
    def test_reference_has_no_black_edges(self):
        x = to_opc(SixVertexConfig.reference(4, 4))
        assert x.black_count() == 0
        assert x.gray_h.all() and x.gray_v.all()

    def test_reversed_config_has_no_gray_edges(self):
        x = to_opc(SixVertexConfig(-np.ones((4, 4)), -np.ones((4, 4))))
        assert not x.gray_h.any() and not x.gray_v.any()
        assert np.all(x.vertex_types() == 4)

    def test_arrows_match_pictured_paths(self, osc):
        h, v = _arrow_spins(OSC_H_ARROWS, OSC_V_ARROWS)
        assert rectangle_from_spins(h, v) == osc

    def test_trace_recovers_pictured_paths(self, osc, highest):
        assert sorted(map(tuple, trace_paths(osc))) == sorted(map(tuple, OSC_PATHS))
        assert sorted(map(tuple, trace_paths(highest))) == sorted(map(tuple, HIGHEST_PATHS))

    def test_osculating_vertex_pairs_west_north(self, osc):
        # figure point (2, 1) is where the first two paths touch
        assert osc.vertex_types()[1, 0] == 4
        assert osc.connection_table()[(1, 0)] == {"W": "N", "S": "E"}

    def test_masks_are_complementary(self, rng):
        for _ in range(20):
            x = random_fixture(5, 7, rng)
            assert np.all(x.black_h ^ x.gray_h)
            assert np.all(x.black_v ^ x.gray_v)
            assert validate_opc(x).valid

    def test_torus_roundtrip(self):
        for config in enumerate_configs(4, 2):
            x = to_opc(config)
            assert x.periodic
            assert from_opc(x) == config

    def test_subrectangle_keeps_vertex_types(self):
        config = sample_configs(6, 6, 0.3, 0, 1, seed=5)[0]
        x = subrectangle(config, 4, 3, 4, 5)
        full = vertex_types(config)
        expected = full[np.ix_((4 + np.arange(4)) % 6, (3 + np.arange(5)) % 6)]
        assert np.array_equal(x.vertex_types(), expected)
        assert not x.periodic

    def test_subrectangle_must_fit(self):
        with pytest.raises(ValidationError):
            subrectangle(SixVertexConfig.reference(4, 4), 0, 0, 5, 2)

    def test_open_rectangle_does_not_close(self, osc):
        with pytest.raises(ValidationError):
            from_opc(osc)

    @pytest.mark.parametrize("paths", [
        [[(2, 2), (1, 2)]],
        [[(0, 1), (3, 1)], [(0, 1), (1, 1), (1, 3)]],
        [[(0, 1), (9, 1)]],
        [[(0, 1), (1, 1)]],
        [[(0, 1), (1, 2)]],
    ])
    def test_bad_polylines_rejected(self, paths):
        with pytest.raises(ValidationError):
            from_polylines(2, 2, paths)

    def test_render(self, corner):
        assert render_ascii(corner) == "\n".join([
            " . # ",
            ".o.o.",
            " . # ",
            "#o#o.",
            " . . ",
        ])

    def test_json_roundtrip(self, osc):
        assert OscPathConfig.from_json(osc.to_json()) == osc


class TestMoves:
    def test_single_corner(self, corner):
        assert flippable_plaquettes(corner) == [((0, 0), C_MINUS)]
        raised = apply_move(corner, (0, 0), "+")
        assert flippable_plaquettes(raised) == [((0, 0), C_PLUS)]
        assert height(raised).value == height(corner).value + 1
        assert apply_move(raised, (0, 0), "-") == corner
        assert raised.boundary() == corner.boundary()
        assert validate_opc(raised).valid

    def test_reference_has_nothing_to_flip(self):
        x = OscPathConfig.empty(4, 4)
        assert flippable_plaquettes(x) == []
        assert height(x).value == 0
        assert highest_opc(x) == x

    def test_move_type_mismatch_rejected(self, corner):
        with pytest.raises(ValidationError):
            apply_move(corner, (0, 0), "-")
        with pytest.raises(ValidationError):
            apply_move(corner, (0, 0), "up")
        with pytest.raises(ValidationError):
            apply_move(corner, (1, 0), "+")

    def test_moves_on_torus_cut_glue_back(self):
        config = sample_configs(6, 6, -0.2, 0, 1, seed=11)[0]
        x = to_opc(config)
        for plaquette, kind in flippable_plaquettes(x)[:3]:
            moved = apply_move(x, plaquette, "+" if kind == C_MINUS else "-")
            assert validate_config(from_opc(moved)).valid

    def test_height_matches_path_count(self, osc, highest, rng):
        fixtures = [osc, highest] + [random_fixture(4, 5, rng) for _ in range(30)]
        for x in fixtures:
            assert height(x).value == _height_by_paths(x)

    def test_pictured_highest_configuration(self, osc, highest):
        assert highest_opc(osc) == highest
        assert highest_opc(highest) == highest
        assert height(osc) < height(highest)

    def test_iteration_cap(self, osc):
        with pytest.raises(ConvergenceError):
            highest_opc(osc, max_moves=1)

    def _check_confluence(self, seeds):
        for seed in seeds:
            rng = np.random.default_rng(seed)
            x = random_fixture(int(rng.integers(2, 7)), int(rng.integers(2, 7)), rng)
            x_max = highest_opc(x)
            shuffled, heights = _highest_random_order(x, rng)
            assert shuffled == x_max
            assert np.all(np.diff(heights) == 1)
            assert height(x) <= height(x_max)
            assert x_max.boundary() == x.boundary()
            assert all(kind != C_MINUS for _, kind in flippable_plaquettes(x_max))

    def test_confluence(self):
        self._check_confluence(range(100))

    @pytest.mark.slow
    def test_confluence_many_fixtures(self):
        self._check_confluence(range(100, 1100))

    def test_raise_randomly_reaches_highest(self, osc, highest, rng):
        end, heights = raise_randomly(osc, rng)
        assert end == highest
        assert heights[0] == height(osc).value
        assert heights[-1] == height(highest).value
        assert np.all(np.diff(heights) == 1)

    def test_raise_randomly_on_highest_is_idle(self, highest, rng):
        end, heights = raise_randomly(highest, rng)
        assert end == highest
        assert heights == [height(highest).value]


class TestBlockades:
    def test_reference_passes_vacuously(self):
        report = blockade_check(OscPathConfig.empty(5, 5))
        assert report.ok and report.checked == 0

    def test_pictured_highest_configuration(self, highest):
        report = blockade_check(highest)
        assert report.ok and report.checked > 0

    def _check(self, count, rng):
        for _ in range(count):
            report = blockade_check(highest_opc(random_fixture(8, 16, rng)))
            assert report.ok, report.violations

    def test_random_highest_configurations(self, rng):
        self._check(40, rng)

    @pytest.mark.slow
    def test_many_random_highest_configurations(self, rng):
        self._check(500, rng)


class TestAlignedRuns:
    @pytest.mark.parametrize("l", [1, 3, 6])
    def test_reference_always_has_a_run(self, l):
        assert aligned_run_detector(OscPathConfig.empty(6, 4), l) == (0, 0)

    def test_run_longer_than_width(self):
        assert aligned_run_detector(OscPathConfig.empty(3, 4), 4) is None

    def test_pictured_highest_configuration(self, highest):
        assert aligned_run_detector(highest, 3) == (0, 2)
        assert aligned_run_detector(highest, 4) == (2, 1)
        assert aligned_run_detector(highest, 5) is None

    def test_rejects_empty_run(self, highest):
        with pytest.raises(ValidationError):
            aligned_run_detector(highest, 0)

    def test_rate_report(self):
        report = aligned_run_rate(2, 4, 0.0, 5, seed=3)
        assert report.samples == 5
        assert 0.0 <= report.rate <= 1.0
        assert report.m2 == 0

    def test_rate_in_magnetized_sector(self):
        report = aligned_run_rate(2, 2, 0.0, 5, seed=3, m2=2)
        assert report.m2 == 2
        assert 0 <= report.hits <= 5

    @pytest.mark.parametrize("m2", [1, 6, -6])
    def test_rejects_foreign_sector(self, m2):
        with pytest.raises(ValidationError, match="magnetization sector"):
            aligned_run_rate(2, 2, 0.0, 3, seed=1, m2=m2)

    @pytest.mark.slow
    def test_tall_rectangles_have_long_runs(self):
        report = aligned_run_rate(4, 16, 0.0, 200, seed=2024)
        assert report.rate >= 0.95
