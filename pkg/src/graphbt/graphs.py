"""Exact geometry of compact metric graphs.

A metric graph is a connected multigraph (self-loops and parallel edges
allowed) with positive rational edge lengths, viewed as a geodesic metric
space under shortest-path distance.  Everything in this module is computed
with exact rational arithmetic, so distances, eccentricities and subdivision
are bit-exact and safe to compare with ``==``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Length = Fraction

__all__ = [
    "Length",
    "GraphError",
    "as_length",
    "Edge",
    "GraphPoint",
    "MetricGraph",
    "ValidationIssue",
    "ValidationReport",
    "validate",
    "distance",
    "distance_matrix",
    "eccentricity",
    "SubdivisionMap",
    "subdivide_at",
    "injectivity_radius",
    "TopologicalSelfLoop",
    "topological_self_loops",
    "is_circle",
    "suppress_valence_two",
    "shortest_path",
    "point_along_geodesic",
]


class GraphError(ValueError):
    """A graph, point, or operation argument violates a precondition."""


def as_length(value) -> Fraction:
    """Coerce a length-like value ('3/4', '0.75', 2, 0.5, Fraction) to Fraction.

    Floats are converted to their exact binary value, so callers that insist
    on decimal semantics should pass strings.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str
    length: Fraction

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, vertex: str) -> str:
        if vertex == self.u:
            return self.v
        if vertex == self.v:
            return self.u
        raise GraphError(f"vertex {vertex!r} is not an endpoint of edge {self.id!r}")


@dataclass(frozen=True)
class GraphPoint:
    """A location on a metric graph: either a vertex or an edge-interior point.

    ``offset`` is measured from the edge's ``u`` endpoint.  For self-loops the
    orientation stored in the edge record fixes the parametrization.  Points
    are compared in canonical form only (see MetricGraph.canonical_point):
    offsets 0 and L collapse to vertex references.
    """

    vertex: str | None = None
    edge: str | None = None
    offset: Fraction = Fraction(0)

    @staticmethod
    def at_vertex(vertex: str) -> "GraphPoint":
        return GraphPoint(vertex=str(vertex))

    @staticmethod
    def on_edge(edge: str, offset) -> "GraphPoint":
        return GraphPoint(edge=str(edge), offset=as_length(offset))

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def label(self) -> str:
        if self.is_vertex:
            return f"vertex:{self.vertex}"
        return f"{self.edge}:{self.offset}"

    @staticmethod
    def parse(text: str) -> "GraphPoint":
        """Parse 'vertex:<id>' or '<edgeID>:<offset>' labels."""
        if ":" not in text:
            raise GraphError(f"cannot parse point spec {text!r}")
        head, _, tail = text.partition(":")
        if head == "vertex":
            return GraphPoint.at_vertex(tail)
        return GraphPoint.on_edge(head, Fraction(tail))


class MetricGraph:
    """Immutable weighted multigraph.  Treat instances as frozen after creation."""

    def __init__(self, vertices: Iterable[str], edges: Iterable) -> None:
        self._vertices: tuple[str, ...] = tuple(str(v) for v in vertices)
        normalized = []
        for e in edges:
            if isinstance(e, Edge):
                normalized.append(Edge(str(e.id), str(e.u), str(e.v), as_length(e.length)))
            else:
                eid, u, v, length = e
                normalized.append(Edge(str(eid), str(u), str(v), as_length(length)))
        self._edges: tuple[Edge, ...] = tuple(normalized)
        self._edge_map: dict[str, Edge] = {e.id: e for e in self._edges}
        self._vertex_set = set(self._vertices)
        adjacency: dict[str, list[tuple[str, int]]] = {v: [] for v in self._vertices}
        for e in self._edges:
            if e.u in adjacency:
                adjacency[e.u].append((e.id, 0))
            if e.v in adjacency:
                adjacency[e.v].append((e.id, 1))
        self._adjacency = {v: tuple(g) for v, g in adjacency.items()}

    # -- basic accessors ------------------------------------------------

    @property
    def vertices(self) -> tuple[str, ...]:
        return self._vertices

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def edge(self, edge_id: str) -> Edge:
        try:
            return self._edge_map[str(edge_id)]
        except KeyError:
            raise GraphError(f"unknown edge {edge_id!r}") from None

    def has_vertex(self, v: str) -> bool:
        return v in self._vertex_set

    def germs(self, v: str) -> tuple[tuple[str, int], ...]:
        """Edge-germs at v as (edge id, endpoint index); a self-loop yields two."""
        try:
            return self._adjacency[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def valence(self, v: str) -> int:
        return len(self.germs(v))

    def beta1(self) -> int:
        """First Betti number |E| - |V| + 1 (meaningful for connected graphs)."""
        return len(self._edges) - len(self._vertices) + 1

    def total_length(self) -> Fraction:
        return sum((e.length for e in self._edges), Fraction(0))

    def is_connected(self) -> bool:
        if not self._vertices:
            return False
        seen = {self._vertices[0]}
        stack = [self._vertices[0]]
        while stack:
            v = stack.pop()
            for eid, end in self._adjacency[v]:
                w = self._edge_map[eid].other(v) if not self._edge_map[eid].is_loop else v
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self._vertices)

    # -- points -----------------------------------------------------------

    def canonical_point(self, point: GraphPoint) -> GraphPoint:
        """Normalize a point: endpoint offsets collapse to vertex references."""
        if point.is_vertex:
            if point.vertex not in self._vertex_set:
                raise GraphError(f"unknown vertex {point.vertex!r}")
            return GraphPoint.at_vertex(point.vertex)
        e = self.edge(point.edge)
        off = as_length(point.offset)
        if off < 0 or off > e.length:
            raise GraphError(
                f"offset {off} outside [0, {e.length}] on edge {e.id!r}"
            )
        if off == 0:
            return GraphPoint.at_vertex(e.u)
        if off == e.length:
            return GraphPoint.at_vertex(e.v)
        return GraphPoint.on_edge(e.id, off)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"MetricGraph({len(self._vertices)} vertices, {len(self._edges)} edges)"


# -- validation -----------------------------------------------------------


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[ValidationIssue, ...]
    valence_two_vertices: tuple[str, ...]
    self_loop_edges: tuple[str, ...]
    parallel_edge_groups: tuple[tuple[str, ...], ...]

    def raise_on_error(self) -> None:
        if not self.ok:
            messages = "; ".join(f"{i.code}: {i.detail}" for i in self.issues)
            raise GraphError(f"invalid graph: {messages}")


def validate(graph: MetricGraph) -> ValidationReport:
    """Check invariants (positive lengths, connectivity, index consistency)
    and summarize structural features (valence-2 vertices, loops, bundles)."""
    issues: list[ValidationIssue] = []
    if not graph.vertices:
        issues.append(ValidationIssue("empty", "graph has no vertices"))
    if len(set(graph.vertices)) != len(graph.vertices):
        issues.append(ValidationIssue("duplicate-vertex", "vertex ids not unique"))
    seen_edge_ids = set()
    for e in graph.edges:
        if e.id in seen_edge_ids:
            issues.append(ValidationIssue("duplicate-edge", f"edge id {e.id!r} repeated"))
        seen_edge_ids.add(e.id)
        if e.length <= 0:
            issues.append(
                ValidationIssue("nonpositive-length", f"edge {e.id!r} has length {e.length}")
            )
        for endpoint in (e.u, e.v):
            if not graph.has_vertex(endpoint):
                issues.append(
                    ValidationIssue("unknown-endpoint", f"edge {e.id!r} touches {endpoint!r}")
                )
    consistent = not any(i.code in ("unknown-endpoint", "duplicate-vertex") for i in issues)
    if consistent and graph.vertices and not graph.is_connected():
        issues.append(ValidationIssue("disconnected", "graph is not connected"))

    valence_two = tuple(v for v in graph.vertices if consistent and graph.valence(v) == 2)
    loops = tuple(e.id for e in graph.edges if e.is_loop)
    bundles: dict[frozenset, list[str]] = {}
    for e in graph.edges:
        if not e.is_loop:
            bundles.setdefault(frozenset((e.u, e.v)), []).append(e.id)
    parallel = tuple(tuple(ids) for ids in bundles.values() if len(ids) > 1)
    return ValidationReport(
        ok=not issues,
        issues=tuple(issues),
        valence_two_vertices=valence_two,
        self_loop_edges=loops,
        parallel_edge_groups=parallel,
    )


# -- subdivision ------------------------------------------------------------


@dataclass
class SubdivisionMap:
    """Relates a graph to its subdivision.

    ``point_map`` sends each requested (canonical) point to its new location.
    ``segments`` sends each original edge id to the ordered list of
    (new edge id, start offset, end offset) covering it; new edges are always
    oriented with ``u`` at the lower original offset.
    """

    original: MetricGraph
    subdivided: MetricGraph
    point_map: dict[GraphPoint, GraphPoint]
    segments: dict[str, tuple[tuple[str, Fraction, Fraction], ...]]

    def to_new(self, point: GraphPoint) -> GraphPoint:
        point = self.original.canonical_point(point)
        if point in self.point_map:
            return self.point_map[point]
        if point.is_vertex:
            return point
        for new_id, start, end in self.segments[point.edge]:
            if start <= point.offset <= end:
                return self.subdivided.canonical_point(
                    GraphPoint.on_edge(new_id, point.offset - start)
                )
        raise GraphError(f"point {point} not covered by subdivision segments")

    def to_old(self, point: GraphPoint) -> GraphPoint:
        point = self.subdivided.canonical_point(point)
        if point.is_vertex:
            if self.original.has_vertex(point.vertex):
                return GraphPoint.at_vertex(point.vertex)
            # a synthetic subdivision vertex: locate it on its original edge
            for old_id, segs in self.segments.items():
                for new_id, start, end in segs:
                    new_edge = self.subdivided.edge(new_id)
                    if new_edge.u == point.vertex:
                        return self.original.canonical_point(GraphPoint.on_edge(old_id, start))
                    if new_edge.v == point.vertex:
                        return self.original.canonical_point(GraphPoint.on_edge(old_id, end))
            raise GraphError(f"vertex {point.vertex!r} not traceable to the original graph")
        for old_id, segs in self.segments.items():
            for new_id, start, end in segs:
                if new_id == point.edge:
                    return self.original.canonical_point(
                        GraphPoint.on_edge(old_id, start + point.offset)
                    )
        # edge untouched by the subdivision
        return self.original.canonical_point(point)


def _offset_tag(offset: Fraction) -> str:
    return f"{offset.numerator}_{offset.denominator}"


def subdivide_at(graph: MetricGraph, points: Iterable[GraphPoint]) -> tuple[MetricGraph, SubdivisionMap]:
    """Insert a valence-2 vertex at each edge-interior point.

    Distances are preserved exactly; requested points become vertices of the
    result.  Subdividing at vertices is a no-op for those points.
    """
    canonical = [graph.canonical_point(p) for p in points]
    by_edge: dict[str, set[Fraction]] = {}
    point_map: dict[GraphPoint, GraphPoint] = {}
    for p in canonical:
        if p.is_vertex:
            point_map[p] = p
        else:
            by_edge.setdefault(p.edge, set()).add(p.offset)

    new_edges: list[Edge] = []
    new_vertices: list[str] = list(graph.vertices)
    segments: dict[str, tuple[tuple[str, Fraction, Fraction], ...]] = {}
    for e in graph.edges:
        cuts = sorted(by_edge.get(e.id, ()))
        if not cuts:
            new_edges.append(e)
            segments[e.id] = ((e.id, Fraction(0), e.length),)
            continue
        stops = [Fraction(0)] + cuts + [e.length]
        names = [e.u] + [f"{e.id}@{_offset_tag(c)}" for c in cuts] + [e.v]
        for name, cut in zip(names[1:-1], cuts):
            new_vertices.append(name)
            point_map[GraphPoint.on_edge(e.id, cut)] = GraphPoint.at_vertex(name)
        segs = []
        for i in range(len(stops) - 1):
            seg_id = f"{e.id}#{i}"
            new_edges.append(Edge(seg_id, names[i], names[i + 1], stops[i + 1] - stops[i]))
            segs.append((seg_id, stops[i], stops[i + 1]))
        segments[e.id] = tuple(segs)

    subdivided = MetricGraph(new_vertices, new_edges)
    return subdivided, SubdivisionMap(graph, subdivided, point_map, segments)


# -- shortest paths ----------------------------------------------------------


def _vertex_distances(graph: MetricGraph, source: str, targets: set[str] | None = None) -> dict[str, Fraction]:
    """Dijkstra over the vertex set.  Self-loop edges never shorten vertex
    pairs, so they are skipped."""
    dist: dict[str, Fraction] = {source: Fraction(0)}
    done: set[str] = set()
    heap: list[tuple[Fraction, str]] = [(Fraction(0), source)]
    remaining = set(targets) if targets is not None else None
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if remaining is not None:
            remaining.discard(v)
            if not remaining:
                break
        for eid, _end in graph.germs(v):
            e = graph.edge(eid)
            if e.is_loop:
                continue
            w = e.other(v)
            nd = d + e.length
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return dist


def shortest_path(graph: MetricGraph, a: GraphPoint, b: GraphPoint) -> tuple[Fraction, list[tuple[str, str, str]]]:
    """Exact geodesic between two points.

    Returns (length, steps) where each step is (edge id, from vertex, to
    vertex) in the subdivided graph obtained by cutting at ``a`` and ``b``;
    the ids refer to that subdivision, so use point_along_geodesic for
    locations on the original graph.
    """
    g2, sm = subdivide_at(graph, [a, b])
    va = sm.to_new(a).vertex
    vb = sm.to_new(b).vertex
    dist: dict[str, Fraction] = {va: Fraction(0)}
    prev: dict[str, tuple[str, str]] = {}
    done: set[str] = set()
    heap: list[tuple[Fraction, str]] = [(Fraction(0), va)]
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v == vb:
            break
        for eid, _end in g2.germs(v):
            e = g2.edge(eid)
            if e.is_loop:
                continue
            w = e.other(v)
            nd = d + e.length
            if w not in dist or nd < dist[w]:
                dist[w] = nd
                prev[w] = (v, eid)
                heapq.heappush(heap, (nd, w))
    if vb not in done:
        raise GraphError("no path between the given points (graph disconnected?)")
    steps: list[tuple[str, str, str]] = []
    cur = vb
    while cur != va:
        p, eid = prev[cur]
        steps.append((eid, p, cur))
        cur = p
    steps.reverse()
    return dist[vb], steps


def point_along_geodesic(graph: MetricGraph, a: GraphPoint, b: GraphPoint, t: Fraction) -> GraphPoint:
    """The point at arc distance ``t`` from ``a`` along a shortest a-b path."""
    t = as_length(t)
    total, steps = shortest_path(graph, a, b)
    if t < 0 or t > total:
        raise GraphError(f"arc distance {t} outside [0, {total}]")
    g2, sm = subdivide_at(graph, [a, b])
    if t == 0:
        return graph.canonical_point(a)
    walked = Fraction(0)
    for eid, frm, to in steps:
        e = g2.edge(eid)
        if walked + e.length >= t:
            within = t - walked
            offset = within if e.u == frm else e.length - within
            return sm.to_old(GraphPoint.on_edge(eid, offset))
        walked += e.length
    return graph.canonical_point(b)


def distance_matrix(graph: MetricGraph, points: Sequence[GraphPoint]) -> list[list[Fraction]]:
    """All pairwise geodesic distances, exact."""
    g2, sm = subdivide_at(graph, points)
    names = [sm.to_new(p).vertex for p in points]
    unique = sorted(set(names))
    columns: dict[str, dict[str, Fraction]] = {}
    target_set = set(unique)
    for v in unique:
        columns[v] = _vertex_distances(g2, v, target_set)
    out: list[list[Fraction]] = []
    for ni in names:
        row = []
        for nj in names:
            if ni == nj:
                row.append(Fraction(0))
            else:
                try:
                    row.append(columns[ni][nj])
                except KeyError:
                    raise GraphError("points are not connected") from None
        out.append(row)
    return out


def distance(graph: MetricGraph, a: GraphPoint, b: GraphPoint) -> Fraction:
    """Exact shortest-path distance between two points of the graph."""
    ca = graph.canonical_point(a)
    cb = graph.canonical_point(b)
    if ca == cb:
        return Fraction(0)
    return distance_matrix(graph, [ca, cb])[0][1]


def distances_from(graph: MetricGraph, p: GraphPoint) -> tuple[MetricGraph, SubdivisionMap, dict[str, Fraction]]:
    """Distances from ``p`` to every vertex of the graph subdivided at ``p``."""
    g2, sm = subdivide_at(graph, [p])
    source = sm.to_new(p).vertex
    dist = _vertex_distances(g2, source)
    if len(dist) != len(g2.vertices):
        raise GraphError("graph is not connected")
    return g2, sm, dist


def eccentricity(graph: MetricGraph, p: GraphPoint) -> Fraction:
    """max_x d(p, x) over the whole graph, including edge interiors.

    On each edge the distance function is a tent whose peak value is
    (L + d(u) + d(v))/2, so the maximum is closed-form per edge.
    """
    g2, _sm, dist = distances_from(graph, p)
    if not g2.edges:
        return Fraction(0)
    best = Fraction(0)
    for e in g2.edges:
        peak = (e.length + dist[e.u] + dist[e.v]) / 2
        if peak > best:
            best = peak
    return best


# -- cycles ------------------------------------------------------------------


def injectivity_radius(graph: MetricGraph):
    """Half the systole (length of the shortest closed curve); inf for trees."""
    best: Fraction | None = None
    for e in graph.edges:
        if e.is_loop:
            cand = e.length
        else:
            dist = _vertex_distances(_without_edge(graph, e.id), e.u, {e.v})
            if e.v not in dist:
                continue
            cand = dist[e.v] + e.length
        if best is None or cand < best:
            best = cand
    if best is None:
        return math.inf
    return best / 2


def _without_edge(graph: MetricGraph, edge_id: str) -> MetricGraph:
    return MetricGraph(graph.vertices, [e for e in graph.edges if e.id != edge_id])


def is_circle(graph: MetricGraph) -> bool:
    """True iff the graph is a single cycle: connected with every valence 2."""
    if not graph.edges or not graph.is_connected():
        return False
    return all(graph.valence(v) == 2 for v in graph.vertices)


def suppress_valence_two(graph: MetricGraph) -> tuple[MetricGraph, dict[str, tuple[str, ...]]]:
    """Smooth out valence-2 vertices, merging their edge pairs.

    Returns the smoothed graph plus, for each surviving edge id, the tuple of
    original edge ids it is made of.  Rejects circles (smoothing a pure cycle
    would erase it).
    """
    if is_circle(graph):
        raise GraphError("cannot suppress valence-2 vertices of a circle")
    vertices = list(graph.vertices)
    edges: dict[str, tuple[str, str, Fraction]] = {
        e.id: (e.u, e.v, e.length) for e in graph.edges
    }
    members: dict[str, tuple[str, ...]] = {e.id: (e.id,) for e in graph.edges}
    counter = 0

    def germs_of(v: str) -> list[tuple[str, int]]:
        out = []
        for eid, (u, w, _l) in edges.items():
            if u == v:
                out.append((eid, 0))
            if w == v:
                out.append((eid, 1))
        return out

    changed = True
    while changed:
        changed = False
        for v in list(vertices):
            germs = germs_of(v)
            if len(germs) != 2:
                continue
            (e1, end1), (e2, end2) = germs
            if e1 == e2:
                # valence-2 vertex carrying its own loop: only occurs on a
                # circle component, excluded above
                raise GraphError("unexpected isolated loop while smoothing")
            u1, w1, l1 = edges[e1]
            u2, w2, l2 = edges[e2]
            a = w1 if end1 == 0 else u1
            b = w2 if end2 == 0 else u2
            new_id = f"merge{counter}"
            counter += 1
            seq1 = members[e1] if end1 == 1 else tuple(reversed(members[e1]))
            seq2 = members[e2] if end2 == 0 else tuple(reversed(members[e2]))
            del edges[e1]
            del edges[e2]
            del members[e1]
            del members[e2]
            edges[new_id] = (a, b, l1 + l2)
            members[new_id] = seq1 + seq2
            vertices.remove(v)
            changed = True
            break

    smoothed = MetricGraph(vertices, [(eid, u, w, l) for eid, (u, w, l) in edges.items()])
    return smoothed, members


@dataclass(frozen=True)
class TopologicalSelfLoop:
    base_vertex: str
    circumference: Fraction
    edge_ids: tuple[str, ...]


def topological_self_loops(graph: MetricGraph) -> list[TopologicalSelfLoop]:
    """Maximal cycles all of whose non-base points have valence two.

    A circle is reported as a single loop based at its smallest vertex id;
    callers that treat circles separately should test is_circle first.
    """
    if not graph.edges:
        return []
    if is_circle(graph):
        base = min(graph.vertices)
        return [
            TopologicalSelfLoop(
                base_vertex=base,
                circumference=graph.total_length(),
                edge_ids=tuple(e.id for e in graph.edges),
            )
        ]
    smoothed, members = suppress_valence_two(graph)
    loops = []
    for e in smoothed.edges:
        if e.is_loop:
            loops.append(
                TopologicalSelfLoop(
                    base_vertex=e.u,
                    circumference=e.length,
                    edge_ids=members[e.id],
                )
            )
    loops.sort(key=lambda l: (l.base_vertex, l.edge_ids))
    return loops
