import random
from fractions import Fraction as F

import pytest

from graphbt import (
    Diagram,
    DiagramPoint,
    GraphError,
    GraphPoint,
    MetricGraph,
    bottleneck,
    build_height_field,
    diagram_of,
    distance,
    distance_matrix,
    eccentricity,
    extended_persistence_reduction,
    extended_persistence_sweep,
    first_nonzero_death,
    recover_graph_from_field,
    valence_from_diagram,
)
from graphbt.constructions import circle, dumbbell, interval, random_metric_graph, star, theta
from graphbt.transform import sample_basepoints
from graphbt.verify import corpus_graphs, standard_basepoints


def unit_triangle():
    return MetricGraph(
        ["v1", "v2", "v3"],
        [("a", "v1", "v2", 1), ("b", "v2", "v3", 1), ("c", "v3", "v1", 1)],
    )


def coords(diagram, dim=None):
    return sorted(
        (p.dim, p.birth, p.death) for p in diagram.points if dim is None or p.dim == dim
    )


class TestHeightField:
    def test_circle_two_monotone_arcs(self):
        field = build_height_field(circle(3), GraphPoint.on_edge("loop", F(1, 2)))
        # two monotone arcs of length C/2 from the basepoint to the antipode
        # (the original vertex survives as a valence-2 point on one arc)
        assert field.max_height() == F(3, 2)
        assert field.heights[field.basepoint] == 0
        top = [v for v, h in field.heights.items() if h == F(3, 2)]
        assert len(top) == 1
        assert field.graph.valence(top[0]) == 2
        assert field.graph.total_length() == 3

    def test_theta_interior_downfork(self):
        field = build_height_field(theta(1, 1, 2), GraphPoint.at_vertex("u"))
        # the long edge splits at the balance point at height 3/2
        assert sorted(field.heights.values()) == [0, 1, F(3, 2)]
        assert field.max_height() == F(3, 2)

    def test_interval_from_leaf_single_edge(self):
        field = build_height_field(interval(2), GraphPoint.at_vertex("a"))
        assert len(field.graph.edges) == 1
        assert field.max_height() == 2

    def test_edges_are_monotone(self):
        g = random_metric_graph(21, 6, 3, ensure_generic=False)
        field = build_height_field(g, GraphPoint.at_vertex("v0"))
        for e in field.graph.edges:
            assert abs(field.heights[e.u] - field.heights[e.v]) == e.length


class TestReductionExamples:
    def test_unit_triangle(self):
        field = build_height_field(unit_triangle(), GraphPoint.at_vertex("v1"))
        d = extended_persistence_reduction(field)
        assert coords(d) == [(0, 0, F(3, 2)), (1, F(3, 2), 0)]

    def test_interval_interior(self):
        field = build_height_field(interval(2), GraphPoint.on_edge("e", F(1, 2)))
        d = extended_persistence_reduction(field)
        assert coords(d) == [(0, 0, F(3, 2)), (1, F(1, 2), 0)]

    def test_theta_from_vertex(self):
        field = build_height_field(theta(1, 1, 2), GraphPoint.at_vertex("u"))
        d = extended_persistence_reduction(field)
        assert coords(d) == [(0, 0, F(3, 2)), (1, 1, 0), (1, F(3, 2), 0)]


class TestSweepExamples:
    def test_dumbbell_extended_points(self):
        g = dumbbell(2, 1, 2)
        d = diagram_of(g, GraphPoint.at_vertex("p"))
        extended = sorted(
            (p.birth, p.death) for p in d.in_dim(1) if p.subtype == "extended_minus"
        )
        assert extended == [(1, 0), (2, 1)]

    def test_circle_single_cycle_point(self):
        c = F(5, 2)
        d = diagram_of(circle(c), GraphPoint.on_edge("loop", F(1, 3)))
        assert coords(d, dim=1) == [(1, c / 2, 0)]

    def test_tree_has_only_relative_points(self):
        g = star([1, F(3, 2), 2])
        for p in standard_basepoints(g):
            d = diagram_of(g, p)
            assert all(q.subtype == "relative" for q in d.in_dim(1))

    def test_sweep_rejects_non_distance_fields(self):
        # a W-shaped field has a local minimum away from the basepoint, which
        # no distance function can produce; the reduction oracle still works
        from graphbt.persistence import HeightField

        g = MetricGraph(
            ["a", "m", "b", "n", "c"],
            [
                ("e1", "a", "m", 1),
                ("e2", "m", "b", 1),
                ("e3", "b", "n", 1),
                ("e4", "n", "c", 1),
            ],
        )
        heights = {"a": F(2), "m": F(1), "b": F(2), "n": F(1), "c": F(2)}
        field = HeightField(graph=g, heights=heights, basepoint="m")
        with pytest.raises(GraphError):
            extended_persistence_sweep(field)
        oracle = extended_persistence_reduction(field)
        assert len(oracle.in_dim(0)) >= 2  # two sublevel components exist


class TestOracleEquivalence:
    def test_corpus(self):
        for g in corpus_graphs(30):
            for p in standard_basepoints(g):
                field = build_height_field(g, p)
                sweep = extended_persistence_sweep(field)
                oracle = extended_persistence_reduction(field)
                assert sweep.tagged_key() == oracle.tagged_key()

    def test_nested_cycles_pairing(self):
        # two loops at different depths: the correct pairing is NOT the
        # sorted-births-to-sorted-deaths one
        g = MetricGraph(
            ["p", "x", "y"],
            [
                ("px", "p", "x", 1),
                ("lx", "x", "x", 2),
                ("py", "p", "y", F(1, 10)),
                ("ly", "y", "y", 6),
            ],
        )
        d = diagram_of(g, GraphPoint.at_vertex("p"))
        extended = sorted(
            (p.birth, p.death) for p in d.in_dim(1) if p.subtype == "extended_minus"
        )
        assert extended == [(2, 1), (F(31, 10), F(1, 10))]
        field = build_height_field(g, GraphPoint.at_vertex("p"))
        assert diagram_of(g, GraphPoint.at_vertex("p")).tagged_key() == \
            extended_persistence_reduction(field).tagged_key()


class TestStructuralReadouts:
    def test_valence_examples(self):
        interior = Diagram(
            [DiagramPoint(0, 0, F(3, 2)), DiagramPoint(1, F(1, 2), 0)]
        )
        assert valence_from_diagram(interior) == 2
        leaf = Diagram([DiagramPoint(0, 0, 2)])
        assert valence_from_diagram(leaf) == 1
        theta_vertex = Diagram(
            [DiagramPoint(0, 0, F(3, 2)), DiagramPoint(1, 1, 0), DiagramPoint(1, F(3, 2), 0)]
        )
        assert valence_from_diagram(theta_vertex) == 3

    def test_first_nonzero_death(self):
        dumbbell_diagram = Diagram(
            [DiagramPoint(0, 0, 2), DiagramPoint(1, 1, 0), DiagramPoint(1, 2, 1)]
        )
        assert first_nonzero_death(dumbbell_diagram) == 1
        circle_diagram = Diagram([DiagramPoint(0, 0, 1), DiagramPoint(1, 1, 0)])
        assert first_nonzero_death(circle_diagram) is None
        assert first_nonzero_death(
            Diagram([DiagramPoint(1, 1, 0), DiagramPoint(1, F(3, 2), 0)])
        ) is None

    def test_first_nonzero_death_is_distance_to_branch_vertex(self):
        g = dumbbell(2, 1, 2)
        for p in standard_basepoints(g):
            d = diagram_of(g, p)
            value = first_nonzero_death(d)
            branch = [
                GraphPoint.at_vertex(v) for v in g.vertices if g.valence(v) >= 3
            ]
            dists = sorted(
                distance(g, p, w) for w in branch if distance(g, p, w) > 0
            )
            if value is not None:
                assert value in dists


class TestCorpusInvariants:
    def test_counts_and_coordinates(self):
        for g in corpus_graphs(20):
            beta1 = g.beta1()
            branch_vertices = [v for v in g.vertices if g.valence(v) >= 3]
            for p in standard_basepoints(g):
                d = diagram_of(g, p)
                # single 0-dim point (0, eccentricity)
                zero = d.in_dim(0)
                assert len(zero) == 1
                assert (zero[0].birth, zero[0].death) == (0, eccentricity(g, p))
                assert zero[0].subtype == "extended_plus"
                # extended 1-dim count is the first Betti number
                ext = [q for q in d.in_dim(1) if q.subtype.startswith("extended")]
                assert len(ext) == beta1
                # death-zero count is valence - 1
                death_zero = [q for q in d.in_dim(1) if q.death == 0]
                valence = g.valence(p.vertex) if p.is_vertex else 2
                assert len(death_zero) == valence - 1
                assert valence_from_diagram(d) == valence
                # every nonzero death is a distance to a branch vertex
                dists = {distance(g, p, GraphPoint.at_vertex(v)) for v in branch_vertices}
                for q in d.in_dim(1):
                    if q.death > 0:
                        assert q.death in dists

    def test_diagram_map_is_one_lipschitz(self):
        rng = random.Random(99)
        for g in corpus_graphs(8):
            points = sample_basepoints(g, F(1, 2))
            cache = {p: diagram_of(g, p) for p in points}
            for _ in range(12):
                p, q = rng.choice(points), rng.choice(points)
                assert bottleneck(cache[p], cache[q]) <= distance(g, p, q)


class TestRecoverGraph:
    def check_roundtrip(self, g, p):
        field = build_height_field(g, p)
        rebuilt = recover_graph_from_field(field)
        probes = [GraphPoint.at_vertex(v) for v in field.graph.vertices]
        assert distance_matrix(field.graph, probes) == distance_matrix(rebuilt, probes)

    def test_circle(self):
        self.check_roundtrip(circle(3), GraphPoint.on_edge("loop", F(1, 2)))

    def test_theta(self):
        self.check_roundtrip(theta(1, 1, 2), GraphPoint.at_vertex("u"))

    def test_interval_from_leaf(self):
        self.check_roundtrip(interval(2), GraphPoint.at_vertex("a"))


class TestOnePointGraph:
    def test_diagram(self):
        g = MetricGraph(["x"], [])
        d = diagram_of(g, GraphPoint.at_vertex("x"))
        assert coords(d) == [(0, 0, 0)]
