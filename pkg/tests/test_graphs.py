import math
import random
from fractions import Fraction as F

import pytest

from graphbt import (
    GraphError,
    GraphPoint,
    MetricGraph,
    distance,
    distance_matrix,
    eccentricity,
    injectivity_radius,
    is_circle,
    point_along_geodesic,
    subdivide_at,
    topological_self_loops,
    validate,
)
from graphbt.constructions import circle, interval, random_metric_graph, star, theta
from graphbt.transform import sample_basepoints


def unit_triangle():
    return MetricGraph(
        ["v1", "v2", "v3"],
        [("a", "v1", "v2", 1), ("b", "v2", "v3", 1), ("c", "v3", "v1", 1)],
    )


class TestValidate:
    def test_triangle_valid_with_three_valence_two_vertices(self):
        report = validate(unit_triangle())
        assert report.ok
        assert sorted(report.valence_two_vertices) == ["v1", "v2", "v3"]

    def test_zero_length_edge_rejected(self):
        g = MetricGraph(["a", "b"], [("e", "a", "b", 0)])
        report = validate(g)
        assert not report.ok
        assert any(i.code == "nonpositive-length" for i in report.issues)

    def test_disconnected_rejected(self):
        g = MetricGraph(["a", "b", "c", "d"], [("e1", "a", "b", 1), ("e2", "c", "d", 1)])
        report = validate(g)
        assert not report.ok
        assert any(i.code == "disconnected" for i in report.issues)

    def test_structural_summaries(self):
        g = MetricGraph(
            ["u", "v"],
            [("l", "u", "u", 1), ("p1", "u", "v", 1), ("p2", "u", "v", 2)],
        )
        report = validate(g)
        assert report.ok
        assert report.self_loop_edges == ("l",)
        assert report.parallel_edge_groups == (("p1", "p2"),)


class TestDistance:
    def test_triangle_vertex_to_opposite_midpoint(self):
        g = unit_triangle()
        d = distance(g, GraphPoint.at_vertex("v1"), GraphPoint.on_edge("b", F(1, 2)))
        assert d == F(3, 2)

    def test_point_to_itself(self):
        g = theta(1, 1, 2)
        p = GraphPoint.on_edge("e3", F(7, 5))
        assert distance(g, p, p) == 0

    def test_interval_two_offsets(self):
        g = interval(2)
        d = distance(g, GraphPoint.on_edge("e", F(3, 10)), GraphPoint.on_edge("e", F(17, 10)))
        assert d == F(7, 5)

    def test_self_loop_wraparound(self):
        g = circle(2)
        d = distance(g, GraphPoint.on_edge("loop", F(1, 4)), GraphPoint.on_edge("loop", F(7, 4)))
        assert d == F(1, 2)

    def test_triangle_inequality_random_triples(self):
        rng = random.Random(5)
        for seed in range(6):
            g = random_metric_graph(seed, 5, 2, ensure_generic=False)
            points = sample_basepoints(g, 1)
            for _ in range(15):
                a, b, c = (rng.choice(points) for _ in range(3))
                assert distance(g, a, c) <= distance(g, a, b) + distance(g, b, c)


class TestEccentricity:
    def test_circle_antipode(self):
        g = circle(F(7, 3))
        assert eccentricity(g, GraphPoint.on_edge("loop", F(1, 5))) == F(7, 6)

    def test_triangle_vertex(self):
        assert eccentricity(unit_triangle(), GraphPoint.at_vertex("v1")) == F(3, 2)

    def test_interval_interior(self):
        assert eccentricity(interval(2), GraphPoint.on_edge("e", F(1, 2))) == F(3, 2)

    def test_matches_fine_net_maximum(self):
        g = random_metric_graph(11, 5, 2, ensure_generic=False)
        p = GraphPoint.at_vertex("v0")
        ecc = eccentricity(g, p)
        delta = F(1, 8)
        net = sample_basepoints(g, delta)
        net_max = max(distance(g, p, q) for q in net)
        assert net_max <= ecc <= net_max + delta / 2


class TestSubdivide:
    def test_loop_at_antipode_gives_two_unit_edges(self):
        g = circle(2)
        g2, _sm = subdivide_at(g, [GraphPoint.on_edge("loop", 1)])
        assert len(g2.edges) == 2
        assert sorted(e.length for e in g2.edges) == [1, 1]
        assert all({e.u, e.v} == set(g2.vertices) for e in g2.edges)

    def test_subdividing_at_vertex_is_noop(self):
        g = unit_triangle()
        g2, _sm = subdivide_at(g, [GraphPoint.at_vertex("v1")])
        assert len(g2.edges) == len(g.edges)
        assert len(g2.vertices) == len(g.vertices)

    def test_distances_preserved_exactly(self):
        g = interval(2)
        cut = GraphPoint.on_edge("e", F(1, 2))
        g2, sm = subdivide_at(g, [cut])
        assert sorted(e.length for e in g2.edges) == [F(1, 2), F(3, 2)]
        sample = sample_basepoints(g, F(1, 4))
        before = distance_matrix(g, sample)
        after = distance_matrix(g2, [sm.to_new(p) for p in sample])
        assert before == after

    def test_random_graph_distances_preserved(self):
        g = random_metric_graph(3, 5, 2, ensure_generic=False)
        sample = sample_basepoints(g, F(1, 2))
        cuts = [p for p in sample if not p.is_vertex][:4]
        g2, sm = subdivide_at(g, cuts)
        before = distance_matrix(g, sample)
        after = distance_matrix(g2, [sm.to_new(p) for p in sample])
        assert before == after


class TestInjectivityRadius:
    def test_circle(self):
        assert injectivity_radius(circle(F(5, 2))) == F(5, 4)

    def test_theta(self):
        assert injectivity_radius(theta(1, 1, 2)) == 1

    def test_tree_is_infinite(self):
        assert injectivity_radius(star([1, 2, 3])) == math.inf


class TestTopologicalSelfLoops:
    def test_single_self_loop(self):
        g = MetricGraph(["u", "x"], [("loop", "u", "u", 2), ("tail", "u", "x", 1)])
        loops = topological_self_loops(g)
        assert len(loops) == 1
        assert loops[0].base_vertex == "u"
        assert loops[0].circumference == 2

    def test_theta_has_none(self):
        assert topological_self_loops(theta(1, 1, 2)) == []

    def test_circle_reports_whole_graph(self):
        g = circle(3)
        loops = topological_self_loops(g)
        assert len(loops) == 1
        assert loops[0].circumference == 3

    def test_subdivided_loop_detected(self):
        # a loop drawn with valence-2 vertices is still one topological loop
        g = MetricGraph(
            ["u", "a", "b", "x"],
            [
                ("e1", "u", "a", 1),
                ("e2", "a", "b", 1),
                ("e3", "b", "u", 1),
                ("tail", "u", "x", 2),
            ],
        )
        loops = topological_self_loops(g)
        assert len(loops) == 1
        assert loops[0].base_vertex == "u"
        assert loops[0].circumference == 3


class TestCircleDetector:
    def test_cases(self):
        assert is_circle(circle(2))
        assert not is_circle(theta(1, 1, 2))
        assert not is_circle(interval(1))


class TestGeodesics:
    def test_point_along_geodesic(self):
        g = unit_triangle()
        p = point_along_geodesic(g, GraphPoint.at_vertex("v1"), GraphPoint.at_vertex("v2"), F(1, 3))
        assert p == g.canonical_point(GraphPoint.on_edge("a", F(1, 3)))

    def test_endpoint_cases(self):
        g = interval(2)
        a = GraphPoint.at_vertex("a")
        b = GraphPoint.at_vertex("b")
        assert point_along_geodesic(g, a, b, 0) == g.canonical_point(a)
        assert point_along_geodesic(g, a, b, 2) == g.canonical_point(b)

    def test_canonicalization_and_equality(self):
        g = unit_triangle()
        assert g.canonical_point(GraphPoint.on_edge("a", 0)) == GraphPoint.at_vertex("v1")
        assert g.canonical_point(GraphPoint.on_edge("a", 1)) == GraphPoint.at_vertex("v2")
        with pytest.raises(GraphError):
            g.canonical_point(GraphPoint.on_edge("a", 2))
