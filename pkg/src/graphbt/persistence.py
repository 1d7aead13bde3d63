"""Extended persistence of distance-to-basepoint functions on metric graphs.

Two independent computations of the same diagram live here:

* ``extended_persistence_reduction`` — the authoritative oracle.  It reduces
  the boundary matrix of the extended filtration over GF(2), realized by
  coning the complex (with an implicit apex, i.e. reduced homology) so that
  the relative part of the filtration becomes ordinary column reduction.

* ``extended_persistence_sweep`` — a union-find sweep that exploits the
  structure of distance functions (connected sublevel sets, monotone edges).
  Births and deaths of essential 1-cycles are paired exactly through GF(2)
  cycle-space ranks, never by sorting heuristics.

Diagram points carry an internal subtype tag (ordinary / relative /
extended_plus / extended_minus).  Tags are bookkeeping only: equality and
hashing of diagrams ignore them, matching the convention that diagrams are
labelled by homological dimension alone.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .graphs import (
    GraphError,
    GraphPoint,
    MetricGraph,
    distances_from,
    subdivide_at,
)

__all__ = [
    "DiagramPoint",
    "Diagram",
    "HeightField",
    "build_height_field",
    "extended_persistence_reduction",
    "extended_persistence_sweep",
    "diagram_of",
    "valence_from_diagram",
    "first_nonzero_death",
    "recover_graph_from_field",
]

ORDINARY = "ordinary"
RELATIVE = "relative"
EXTENDED_PLUS = "extended_plus"
EXTENDED_MINUS = "extended_minus"


@dataclass(frozen=True)
class DiagramPoint:
    dim: int
    birth: Fraction
    death: Fraction
    subtype: str | None = None

    def coords(self) -> tuple[int, Fraction, Fraction]:
        return (self.dim, self.birth, self.death)


class Diagram:
    """A multiset of dimension-labelled (birth, death) points.

    Equality and hashing ignore subtype tags: two diagrams are equal iff they
    agree as multisets of (dim, birth, death).
    """

    __slots__ = ("points", "_key")

    def __init__(self, points: Iterable[DiagramPoint]):
        pts = sorted(points, key=lambda p: (p.dim, p.birth, p.death, p.subtype or ""))
        object.__setattr__(self, "points", tuple(pts))
        object.__setattr__(self, "_key", tuple(p.coords() for p in self.points))

    def __setattr__(self, *args):  # pragma: no cover
        raise AttributeError("Diagram is immutable")

    def key(self) -> tuple:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, Diagram) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def in_dim(self, dim: int) -> tuple[DiagramPoint, ...]:
        return tuple(p for p in self.points if p.dim == dim)

    def tagged_key(self) -> tuple:
        return tuple((p.dim, p.birth, p.death, p.subtype) for p in self.points)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        parts = ", ".join(
            f"d{p.dim}({p.birth},{p.death})" for p in self.points
        )
        return f"Diagram[{parts}]"


@dataclass
class HeightField:
    """A graph subdivided so the basepoint-distance function is linear with
    slope +-1 on every edge, together with the vertex heights."""

    graph: MetricGraph
    heights: dict[str, Fraction]
    basepoint: str

    def check(self) -> None:
        for e in self.graph.edges:
            if abs(self.heights[e.u] - self.heights[e.v]) != e.length:
                raise GraphError(
                    f"edge {e.id!r} is not monotone: heights "
                    f"{self.heights[e.u]}..{self.heights[e.v]} vs length {e.length}"
                )
        hb = self.heights[self.basepoint]
        if any(h < hb for h in self.heights.values()):
            raise GraphError("basepoint is not a minimum of the field")

    def max_height(self) -> Fraction:
        return max(self.heights.values())


def build_height_field(graph: MetricGraph, p: GraphPoint) -> HeightField:
    """Subdivide at the basepoint and at every interior local maximum of
    d(p, .) so the distance function becomes edgewise monotone."""
    g2, sm, dist = distances_from(graph, p)
    base = sm.to_new(graph.canonical_point(p)).vertex
    cuts: list[GraphPoint] = []
    peak_heights: dict[GraphPoint, Fraction] = {}
    for e in g2.edges:
        du, dv = dist[e.u], dist[e.v]
        t_star = (e.length + dv - du) / 2
        if 0 < t_star < e.length:
            pt = GraphPoint.on_edge(e.id, t_star)
            cuts.append(pt)
            peak_heights[pt] = du + t_star
    g3, sm2 = subdivide_at(g2, cuts)
    heights: dict[str, Fraction] = {}
    for v in g3.vertices:
        if v in dist:
            heights[v] = dist[v]
    for pt, h in peak_heights.items():
        heights[sm2.point_map[g2.canonical_point(pt)].vertex] = h
    field = HeightField(graph=g3, heights=heights, basepoint=base)
    field.check()
    return field


# -- matrix-reduction oracle ---------------------------------------------------


def extended_persistence_reduction(field: HeightField) -> Diagram:
    """Extended persistence via GF(2) boundary-matrix reduction.

    Column order: ordinary cells by ascending (height, dim, name) where an
    edge enters at its upper endpoint; then cone cells by descending
    (height, dim, name) where a coned edge enters at its lower endpoint.
    Zero-persistence ordinary/relative pairs are discarded.
    """
    field.check()
    g = field.graph
    h = field.heights
    if not g.edges:
        v0 = field.basepoint
        return Diagram([DiagramPoint(0, h[v0], h[v0], EXTENDED_PLUS)])

    vertices = sorted(g.vertices)
    edges = list(g.edges)

    def asc_value(cell) -> Fraction:
        if isinstance(cell, str):
            return h[cell]
        return max(h[cell.u], h[cell.v])

    def desc_value(cell) -> Fraction:
        if isinstance(cell, str):
            return h[cell]
        return min(h[cell.u], h[cell.v])

    phase_a: list = sorted(
        list(vertices) + edges,
        key=lambda c: (asc_value(c), 0 if isinstance(c, str) else 1, c if isinstance(c, str) else c.id),
    )
    phase_b: list = sorted(
        list(vertices) + edges,
        key=lambda c: (-desc_value(c), 0 if isinstance(c, str) else 1, c if isinstance(c, str) else c.id),
    )

    pos: dict[tuple[str, str], int] = {}
    cells: list[tuple[str, object]] = []
    for c in phase_a:
        tag = ("v", c) if isinstance(c, str) else ("e", c.id)
        pos[tag] = len(cells)
        cells.append(tag)
    for c in phase_b:
        tag = ("cv", c) if isinstance(c, str) else ("ce", c.id)
        pos[tag] = len(cells)
        cells.append(tag)
    edge_by_id = {e.id: e for e in edges}

    def boundary(tag) -> int:
        kind, name = tag
        if kind == "v":
            return 0
        if kind == "e":
            e = edge_by_id[name]
            return (1 << pos[("v", e.u)]) | (1 << pos[("v", e.v)])
        if kind == "cv":
            return 1 << pos[("v", name)]
        e = edge_by_id[name]
        return (
            (1 << pos[("e", name)])
            | (1 << pos[("cv", e.u)])
            | (1 << pos[("cv", e.v)])
        )

    columns = [boundary(tag) for tag in cells]
    low_owner: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for j in range(len(columns)):
        col = columns[j]
        while col:
            low = col.bit_length() - 1
            if low not in low_owner:
                low_owner[low] = j
                pairs.append((low, j))
                columns[j] = col
                break
            col ^= columns[low_owner[low]]
        else:
            columns[j] = 0

    points: list[DiagramPoint] = []
    for i, j in pairs:
        ki, ni = cells[i]
        kj, nj = cells[j]
        if ki == "v" and kj == "e":
            birth, death = h[ni], asc_value(edge_by_id[nj])
            if birth != death:
                points.append(DiagramPoint(0, birth, death, ORDINARY))
        elif ki == "v" and kj == "cv":
            birth, death = h[ni], h[nj]
            sub = EXTENDED_PLUS if death >= birth else EXTENDED_MINUS
            points.append(DiagramPoint(0, birth, death, sub))
        elif ki == "e" and kj == "ce":
            birth = asc_value(edge_by_id[ni])
            death = desc_value(edge_by_id[nj])
            sub = EXTENDED_PLUS if death >= birth else EXTENDED_MINUS
            points.append(DiagramPoint(1, birth, death, sub))
        elif ki == "cv" and kj == "ce":
            birth = h[ni]
            death = desc_value(edge_by_id[nj])
            if birth != death:
                points.append(DiagramPoint(1, birth, death, RELATIVE))
        else:  # pragma: no cover - would indicate a broken filtration order
            raise GraphError(f"unexpected persistence pair {cells[i]} / {cells[j]}")

    paired = {i for i, _ in pairs} | {j for _, j in pairs}
    if len(paired) != len(cells):  # pragma: no cover
        raise GraphError("reduction left unpaired cells; field graph disconnected?")
    return Diagram(points)


# -- union-find sweep ----------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent: dict[str, str] = {}

    def make(self, x: str) -> None:
        self.parent[x] = x

    def find(self, x: str) -> str:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: str, b: str) -> str:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra
        return ra


def _reduce_gf2(vectors: Sequence[int]) -> list[int]:
    basis: list[int] = []
    for vec in vectors:
        for b in basis:
            if vec ^ b < vec:
                vec ^= b
        if vec:
            basis.append(vec)
            basis.sort(reverse=True)
    return basis


def _rank_gf2(vectors: Sequence[int]) -> int:
    return len(_reduce_gf2(vectors))


def _cycle_basis(edges, keep: set[int], edge_bit: dict[str, int]) -> list[int]:
    """Fundamental-cycle basis (as edge bitmasks) of the subgraph with the
    given edge indices."""
    parent: dict[str, str] = {}
    mask: dict[str, int] = {}

    def find_root(v: str) -> str:
        while parent[v] != v:
            v = parent[v]
        return v

    def path_mask(v: str) -> int:
        # mask of tree edges from v up to its root
        out = 0
        while parent[v] != v:
            out ^= mask[v]
            v = parent[v]
        return out

    cycles: list[int] = []
    for idx in sorted(keep):
        e = edges[idx]
        for w in (e.u, e.v):
            if w not in parent:
                parent[w] = w
                mask[w] = 0
        ru, rv = find_root(e.u), find_root(e.v)
        if ru != rv:
            # hang rv's tree below e.u through this edge: reroot rv to e.v
            # simplest exact approach: store per-vertex mask to root lazily by
            # re-rooting the smaller tree
            _reroot(parent, mask, e.v)
            parent[e.v] = e.u
            mask[e.v] = 1 << edge_bit[e.id]
        else:
            cycles.append((1 << edge_bit[e.id]) ^ path_mask(e.u) ^ path_mask(e.v))
    return cycles


def _reroot(parent: dict[str, str], mask: dict[str, int], v: str) -> None:
    """Make v the root of its tree, preserving per-vertex edge masks."""
    chain: list[str] = [v]
    while parent[chain[-1]] != chain[-1]:
        chain.append(parent[chain[-1]])
    for i in range(len(chain) - 1, 0, -1):
        child, par = chain[i - 1], chain[i]
        parent[par] = child
        mask[par] = mask[child]
    parent[v] = v
    mask[v] = 0


def _extended_pairs(field: HeightField, births: list[Fraction], deaths: list[Fraction]) -> list[tuple[Fraction, Fraction]]:
    """Pair essential-cycle births with deaths through cycle-space ranks.

    N(b, d) := dim( H1(X_{<=b}) ∩ H1(X_{>=d}) ) as subspaces of the cycle
    space counts the pairs with birth <= b and death >= d; inclusion-exclusion
    over the critical grid recovers the multiset.
    """
    g = field.graph
    h = field.heights
    edges = list(g.edges)
    edge_bit = {e.id: i for i, e in enumerate(edges)}
    b_values = sorted(set(births))
    d_values = sorted(set(deaths))

    low_basis: list[list[int]] = []
    for b in b_values:
        keep = {i for i, e in enumerate(edges) if max(h[e.u], h[e.v]) <= b}
        low_basis.append(_reduce_gf2(_cycle_basis(edges, keep, edge_bit)))
    up_basis: list[list[int]] = []
    for d in d_values:
        keep = {i for i, e in enumerate(edges) if min(h[e.u], h[e.v]) >= d}
        up_basis.append(_reduce_gf2(_cycle_basis(edges, keep, edge_bit)))

    def intersection_dim(bi: int, dj: int) -> int:
        if bi < 0 or dj >= len(d_values):
            return 0
        lo, up = low_basis[bi], up_basis[dj]
        return len(lo) + len(up) - _rank_gf2(lo + up)

    pairs: list[tuple[Fraction, Fraction]] = []
    for i, b in enumerate(b_values):
        for j, d in enumerate(d_values):
            m = (
                intersection_dim(i, j)
                - intersection_dim(i - 1, j)
                - intersection_dim(i, j + 1)
                + intersection_dim(i - 1, j + 1)
            )
            if m < 0:  # pragma: no cover
                raise GraphError("negative multiplicity in extended pairing")
            pairs.extend([(b, d)] * m)
    if sorted(b for b, _ in pairs) != sorted(births) or sorted(
        d for _, d in pairs
    ) != sorted(deaths):  # pragma: no cover
        raise GraphError("extended pairing does not match sweep multisets")
    return pairs


def extended_persistence_sweep(field: HeightField) -> Diagram:
    """Fast diagram computation for distance-like fields.

    Requires connected sublevel sets (true for every d(p, .)); raises
    GraphError otherwise.  Produces the same multiset of points as
    extended_persistence_reduction.
    """
    field.check()
    g = field.graph
    h = field.heights
    if not g.edges:
        v0 = field.basepoint
        return Diagram([DiagramPoint(0, h[v0], h[v0], EXTENDED_PLUS)])

    points: list[DiagramPoint] = []
    points.append(DiagramPoint(0, h[field.basepoint], field.max_height(), EXTENDED_PLUS))

    by_height_asc = sorted(g.vertices, key=lambda v: (h[v], v))

    # ascending sweep: essential cycle births
    uf = _UnionFind()
    births: list[Fraction] = []
    for v in by_height_asc:
        uf.make(v)
        unions = 0
        for eid, end in g.germs(v):
            e = g.edge(eid)
            w = e.other(v)
            if (h[w], w) >= (h[v], v):
                continue
            if uf.find(w) == uf.find(v):
                births.append(h[v])
            else:
                uf.union(v, w)
                unions += 1
        if unions == 0 and v != field.basepoint:
            raise GraphError(
                "sweep requires a distance-like field (found a local minimum "
                f"at {v!r}); use the reduction oracle for general fields"
            )
        if unions > 1:
            raise GraphError(
                "sweep requires connected sublevel sets; use the reduction "
                "oracle for general fields"
            )

    # descending sweep: relative points and essential cycle deaths
    uf = _UnionFind()
    comp_max: dict[str, Fraction] = {}
    deaths: list[Fraction] = []
    for v in sorted(g.vertices, key=lambda v: (-h[v], v)):
        uf.make(v)
        comp_max[v] = h[v]
        roots: list[str] = []
        k = 0
        for eid, end in g.germs(v):
            e = g.edge(eid)
            w = e.other(v)
            if (h[w], w) <= (h[v], v):
                continue
            k += 1
            r = uf.find(w)
            if r not in roots:
                roots.append(r)
        deaths.extend([h[v]] * (k - len(roots)))
        if roots:
            maxima = sorted((comp_max[r] for r in roots), reverse=True)
            for younger in maxima[1:]:
                if younger == h[v]:  # pragma: no cover - monotone edges forbid it
                    raise GraphError("zero-persistence relative point")
                points.append(DiagramPoint(1, younger, h[v], RELATIVE))
            survivor = uf.find(v)
            for r in roots:
                survivor = uf.union(survivor, r)
            comp_max[survivor] = maxima[0]

    beta1 = g.beta1()
    if len(births) != beta1 or len(deaths) != beta1:  # pragma: no cover
        raise GraphError("cycle counts disagree with the first Betti number")
    for b, d in _extended_pairs(field, births, deaths):
        sub = EXTENDED_PLUS if d >= b else EXTENDED_MINUS
        points.append(DiagramPoint(1, b, d, sub))
    return Diagram(points)


def diagram_of(graph: MetricGraph, p: GraphPoint, method: str = "sweep") -> Diagram:
    """Extended persistence diagram of d(p, .) on the graph."""
    field = build_height_field(graph, p)
    if method == "sweep":
        return extended_persistence_sweep(field)
    if method == "reduction":
        return extended_persistence_reduction(field)
    raise GraphError(f"unknown diagram method {method!r}")


# -- structural readouts --------------------------------------------------------


def valence_from_diagram(diagram: Diagram) -> int:
    """Valence of the basepoint: one plus the number of 1-dimensional points
    with death zero."""
    death_zero = sum(1 for p in diagram.in_dim(1) if p.death == 0)
    return death_zero + 1


def first_nonzero_death(diagram: Diagram):
    """Smallest strictly positive death among 1-dimensional points, or None.

    For a diagram of d(p, .) this is the distance from p to the nearest
    vertex of valence at least three (other than p itself)."""
    candidates = [p.death for p in diagram.in_dim(1) if p.death > 0]
    return min(candidates) if candidates else None


def recover_graph_from_field(field: HeightField) -> MetricGraph:
    """Rebuild the metric graph from a height field, taking each edge length
    to be the height difference along it.  Metrically isomorphic to the
    subdivided input graph."""
    field.check()
    edges = [
        (e.id, e.u, e.v, abs(field.heights[e.u] - field.heights[e.v]))
        for e in field.graph.edges
    ]
    return MetricGraph(field.graph.vertices, edges)
