from __future__ import annotations

import random

import numpy as np
import pytest

from shortcutaudit.mining import ShortcutNode, SplitStats
from shortcutaudit.projection import (
    DEFAULT_R_MAX,
    DEFAULT_R_MIN,
    NormContext,
    ProjectionLimitError,
    distance_matrix,
    embed,
    glyph_geometry,
    project,
    resolve_collisions,
    shortcut_distance,
)
from shortcutaudit.templates import Slot, Template


def stat_node(nid, coverage, productivity, label):
    dist = {label: int(round(productivity * coverage))}
    other = coverage - dist[label]
    if other:
        dist["_other"] = other
    stats = SplitStats(
        coverage=coverage,
        label_distribution=dist,
        prediction_label=label,
        productivity=productivity,
    )
    return ShortcutNode(
        id=nid,
        template=Template(slots=(Slot(pos=f"P{nid}"),)),
        stats={"whole": stats},
        covered_ids={f"x{i}" for i in range(coverage)},
    )


class TestDistance:
    def test_identity_is_zero(self):
        a = stat_node("a", 10, 0.8, "true")
        norm = NormContext(5, 20)
        assert shortcut_distance(a, a, norm) == 0.0

    def test_formula_substitution(self):
        a = stat_node("a", 10, 0.8, "true")
        b = stat_node("b", 10, 0.6, "true")
        norm = NormContext(10, 10)  # degenerate -> both normalize to 0
        assert shortcut_distance(a, b, norm) == pytest.approx(0.04, abs=1e-12)

    def test_label_indicator_adds_exactly_one(self):
        norm = NormContext(5, 20)
        a = stat_node("a", 10, 0.8, "true")
        b_same = stat_node("b", 15, 0.6, "true")
        b_diff = stat_node("b", 15, 0.6, "false")
        assert shortcut_distance(a, b_diff, norm) == pytest.approx(
            shortcut_distance(a, b_same, norm) + 1.0, abs=1e-12
        )

    def test_random_triples_match_direct_formula(self):
        rng = random.Random(41)
        norm = NormContext(0, 100)
        for _ in range(2000):
            ca, cb = rng.randint(0, 100), rng.randint(0, 100)
            pa, pb = rng.random(), rng.random()
            la, lb = rng.choice("tf"), rng.choice("tf")
            a = stat_node("a", ca, pa, la)
            b = stat_node("b", cb, pb, lb)
            expected = (
                abs(pa - pb) ** 2 + abs(ca / 100 - cb / 100) ** 2 + (1.0 if la != lb else 0.0)
            )
            assert shortcut_distance(a, b, norm) == pytest.approx(expected, abs=1e-12)

    def test_symmetry_and_nonnegativity(self):
        rng = random.Random(42)
        norm = NormContext(0, 50)
        for _ in range(200):
            a = stat_node("a", rng.randint(0, 50), rng.random(), rng.choice("tf"))
            b = stat_node("b", rng.randint(0, 50), rng.random(), rng.choice("tf"))
            dab = shortcut_distance(a, b, norm)
            assert dab == shortcut_distance(b, a, norm)
            assert dab >= 0.0


class TestEmbed:
    def test_two_nodes_on_one_axis(self):
        dist = np.array([[0.0, 0.5], [0.5, 0.0]])
        coords = embed(dist)
        assert coords.shape == (2, 2)
        deltas = np.abs(coords[0] - coords[1])
        # separation along exactly one axis, symmetric about the center
        assert (deltas > 1e-9).sum() == 1
        assert np.allclose(coords.mean(axis=0), [0.5, 0.5], atol=1e-9)

    def test_equilateral_three_points(self):
        dist = np.full((3, 3), 1.0)
        np.fill_diagonal(dist, 0.0)
        coords = embed(dist)
        sides = [
            np.linalg.norm(coords[i] - coords[j]) for i, j in [(0, 1), (0, 2), (1, 2)]
        ]
        assert max(sides) - min(sides) < 1e-9

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        n = 40
        pts = rng.random((n, 3))
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        assert np.array_equal(embed(dist), embed(dist))

    def test_limit_enforced(self):
        n = 301
        with pytest.raises(ProjectionLimitError) as err:
            embed(np.zeros((n, n)))
        assert err.value.count == 301

    def test_coordinates_in_unit_square(self):
        rng = np.random.default_rng(6)
        pts = rng.random((50, 4))
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        coords = embed(dist)
        assert coords.min() >= 0.0 and coords.max() <= 1.0


class TestCollisions:
    def overlaps(self, pos, radii, eps=1e-6):
        n = len(pos)
        count = 0
        for i in range(n):
            for j in range(i + 1, n):
                if np.linalg.norm(pos[i] - pos[j]) < radii[i] + radii[j] - eps:
                    count += 1
        return count

    def test_coincident_pair_separates(self):
        pos = np.array([[0.5, 0.5], [0.5, 0.5]])
        radii = np.array([0.05, 0.05])
        out, residual = resolve_collisions(pos, radii, seed=1)
        assert residual == 0.0
        assert np.linalg.norm(out[0] - out[1]) >= 0.1 - 1e-6

    def test_non_overlapping_layout_unchanged(self):
        pos = np.array([[0.2, 0.2], [0.8, 0.8]])
        radii = np.array([0.05, 0.05])
        out, residual = resolve_collisions(pos, radii, seed=1)
        assert residual == 0.0
        assert np.array_equal(out, pos)

    def test_ten_random_overlapping_points(self):
        rng = np.random.default_rng(7)
        pos = 0.45 + 0.1 * rng.random((10, 2))  # all jammed in the middle
        radii = np.full(10, 0.04)
        out, residual = resolve_collisions(pos, radii, seed=7)
        assert residual == 0.0
        assert self.overlaps(out, radii) == 0

    def test_positions_stay_in_bounds(self):
        rng = np.random.default_rng(8)
        pos = rng.random((40, 2))
        radii = np.full(40, DEFAULT_R_MAX)
        out, residual = resolve_collisions(pos, radii, seed=8)
        assert residual == 0.0
        assert (out >= 0.0).all() and (out <= 1.0).all()


class TestGlyphs:
    def test_min_coverage_gets_r_min(self):
        norm = NormContext(5, 50)
        radius, arc, label = glyph_geometry(stat_node("a", 5, 0.9, "t"), norm)
        assert radius == pytest.approx(DEFAULT_R_MIN)

    def test_max_coverage_gets_r_max(self):
        norm = NormContext(5, 50)
        radius, _, _ = glyph_geometry(stat_node("a", 50, 0.9, "t"), norm)
        assert radius == pytest.approx(DEFAULT_R_MAX)

    def test_arc_fraction_is_productivity(self):
        norm = NormContext(5, 50)
        _, arc, _ = glyph_geometry(stat_node("a", 10, 0.75, "t"), norm)
        assert arc == 0.75

    def test_radius_monotone_in_coverage(self):
        norm = NormContext(0, 100)
        radii = [glyph_geometry(stat_node("a", c, 0.5, "t"), norm)[0] for c in range(0, 101, 10)]
        assert radii == sorted(radii)


class TestProject:
    def make_nodes(self, n, rng):
        return [
            stat_node(f"n{i:03d}", rng.randint(1, 60), rng.random(), rng.choice("tf"))
            for i in range(n)
        ]

    def test_payload_is_deterministic(self):
        rng = random.Random(43)
        nodes = self.make_nodes(12, rng)
        a = [p.to_json() for p in project(nodes, seed=3)]
        b = [p.to_json() for p in project(nodes, seed=3)]
        assert a == b

    def test_no_overlaps_in_layout(self):
        rng = random.Random(44)
        nodes = self.make_nodes(25, rng)
        points = project(nodes, seed=4)
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                pi, pj = points[i], points[j]
                gap = np.hypot(pi.x - pj.x, pi.y - pj.y) - (pi.radius + pj.radius)
                assert gap >= -1e-6

    def test_over_limit_refusal(self):
        rng = random.Random(45)
        nodes = self.make_nodes(301, rng)
        with pytest.raises(ProjectionLimitError):
            project(nodes)

    def test_distance_matrix_shape(self):
        rng = random.Random(46)
        nodes = self.make_nodes(5, rng)
        m = distance_matrix(nodes)
        assert m.shape == (5, 5)
        assert np.allclose(m, m.T)
        assert np.allclose(np.diag(m), 0.0)
