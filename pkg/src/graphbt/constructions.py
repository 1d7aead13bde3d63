"""Generators and verifiers: standard graphs, cactus approximations,
equal-transform tree pairs, random test graphs, and tree ball-intersection
checks."""
from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .compare import Correspondence
from .graphs import (
    GraphError,
    GraphPoint,
    MetricGraph,
    as_length,
    distance_matrix,
    injectivity_radius,
    point_along_geodesic,
    subdivide_at,
    validate,
)
from .persistence import diagram_of
from .symmetry import SearchSpaceExceeded, automorphism_count, has_small_integer_relation
from .transform import sample_basepoints

__all__ = [
    "circle",
    "interval",
    "theta",
    "dumbbell",
    "star",
    "path",
    "make_standard",
    "CactusSpec",
    "cactus",
    "build_injective_cactus",
    "cactus_base_correspondence",
    "CounterexampleParams",
    "counterexample_pair",
    "golden_counterexample_params",
    "attach_at",
    "random_metric_graph",
    "HellyReport",
    "tree_helly_check",
    "ball_intersection_witness",
    "RipsCechReport",
    "rips_cech_tree_check",
    "rips_cech_cycle_violation",
    "TreeSearchSpace",
    "NonInjectiveWitness",
    "search_noninjective_trivial_auto",
]


# -- standard graphs -------------------------------------------------------------


def circle(circumference) -> MetricGraph:
    c = as_length(circumference)
    g = MetricGraph(["o"], [("loop", "o", "o", c)])
    validate(g).raise_on_error()
    return g


def interval(length) -> MetricGraph:
    g = MetricGraph(["a", "b"], [("e", "a", "b", as_length(length))])
    validate(g).raise_on_error()
    return g


def theta(l1, l2, l3) -> MetricGraph:
    g = MetricGraph(
        ["u", "v"],
        [("e1", "u", "v", as_length(l1)), ("e2", "u", "v", as_length(l2)), ("e3", "u", "v", as_length(l3))],
    )
    validate(g).raise_on_error()
    return g


def dumbbell(loop1, bar, loop2) -> MetricGraph:
    g = MetricGraph(
        ["p", "q"],
        [
            ("l1", "p", "p", as_length(loop1)),
            ("bar", "p", "q", as_length(bar)),
            ("l2", "q", "q", as_length(loop2)),
        ],
    )
    validate(g).raise_on_error()
    return g


def star(lengths: Sequence) -> MetricGraph:
    ls = [as_length(x) for x in lengths]
    if not ls:
        raise GraphError("star needs at least one leg")
    vertices = ["c"] + [f"t{i}" for i in range(len(ls))]
    edges = [(f"leg{i}", "c", f"t{i}", l) for i, l in enumerate(ls)]
    g = MetricGraph(vertices, edges)
    validate(g).raise_on_error()
    return g


def path(lengths: Sequence) -> MetricGraph:
    ls = [as_length(x) for x in lengths]
    if not ls:
        raise GraphError("path needs at least one edge")
    vertices = [f"p{i}" for i in range(len(ls) + 1)]
    edges = [(f"e{i}", f"p{i}", f"p{i+1}", l) for i, l in enumerate(ls)]
    g = MetricGraph(vertices, edges)
    validate(g).raise_on_error()
    return g


def make_standard(name: str, params: Sequence) -> MetricGraph:
    """Dispatch by name: circle(C), interval(L), theta(a,b,c),
    dumbbell(l1,bar,l2), star(l1,...,lk), path(l1,...,lk)."""
    builders = {
        "circle": (circle, 1),
        "interval": (interval, 1),
        "theta": (theta, 3),
        "dumbbell": (dumbbell, 3),
        "star": (None, None),
        "path": (None, None),
    }
    if name not in builders:
        raise GraphError(f"unknown standard graph {name!r}")
    values = [as_length(p) for p in params]
    if any(v <= 0 for v in values):
        raise GraphError("standard graph parameters must be positive")
    if name == "star":
        return star(values)
    if name == "path":
        return path(values)
    builder, arity = builders[name]
    if len(values) != arity:
        raise GraphError(f"{name} expects {arity} parameters, got {len(values)}")
    return builder(*values)


# -- cactus approximation ----------------------------------------------------------


@dataclass(frozen=True)
class CactusSpec:
    """A base graph, a point set containing the vertices, and thorn lengths.

    Thorn lengths must vanish exactly at leaf vertices of the base graph;
    with ``injective=True`` they must be pairwise distinct and nonzero on the
    remaining points (the hypotheses under which the thorned graph has an
    injective diagram map).
    """

    base: MetricGraph
    points: tuple[GraphPoint, ...]
    thorn_lengths: tuple[Fraction, ...]
    injective: bool = True

    def check(self) -> None:
        validate(self.base).raise_on_error()
        if len(self.points) != len(self.thorn_lengths):
            raise GraphError("one thorn length per point is required")
        canon = [self.base.canonical_point(p) for p in self.points]
        if len(set(canon)) != len(canon):
            raise GraphError("cactus points must be distinct")
        covered = {p.vertex for p in canon if p.is_vertex}
        missing = [v for v in self.base.vertices if v not in covered]
        if missing:
            raise GraphError(f"cactus point set must contain all vertices; missing {missing}")
        leaves = {v for v in self.base.vertices if self.base.valence(v) == 1}
        others = []
        for p, a in zip(canon, self.thorn_lengths):
            if a < 0:
                raise GraphError("thorn lengths must be nonnegative")
            if p.is_vertex and p.vertex in leaves:
                if a != 0:
                    raise GraphError(f"thorn length at leaf {p.vertex!r} must be zero")
            else:
                others.append(a)
        if self.injective:
            if any(a == 0 for a in others):
                raise GraphError("thorn lengths must be nonzero away from leaves")
            if len(set(others)) != len(others):
                raise GraphError("thorn lengths must be pairwise distinct")


def _cactus_with_anchors(spec: CactusSpec):
    spec.check()
    base = spec.base
    canon = [base.canonical_point(p) for p in spec.points]
    interior = [p for p in canon if not p.is_vertex]
    g2, sm = subdivide_at(base, interior)
    vertices = list(g2.vertices)
    edges = [(e.id, e.u, e.v, e.length) for e in g2.edges]
    anchors: list[tuple[GraphPoint, str, Fraction]] = []
    for i, (p, a) in enumerate(zip(canon, spec.thorn_lengths)):
        anchor = sm.to_new(p).vertex
        anchors.append((p, anchor, a))
        if a > 0:
            tip = f"thorn{i}:tip"
            vertices.append(tip)
            edges.append((f"thorn{i}", anchor, tip, a))
    out = MetricGraph(vertices, edges)
    validate(out).raise_on_error()
    return out, anchors, sm


def cactus(spec: CactusSpec) -> MetricGraph:
    """Attach a thorn (an interval of the assigned length) at each point."""
    out, _anchors, _sm = _cactus_with_anchors(spec)
    return out


def cactus_base_correspondence(spec: CactusSpec, net_delta) -> tuple[MetricGraph, Correspondence]:
    """The thorned graph plus the canonical correspondence with its base:
    every point of the shared base part maps to itself, thorn points map to
    their anchor in the base.

    If all thorn lengths are at most eps the correspondence has cost at most
    2*eps, which certifies Gromov-Hausdorff closeness of cactus and base.
    """
    out, anchors, sm = _cactus_with_anchors(spec)
    thorn_anchor_point = {f"thorn{i}": p for i, (p, _a, alpha) in enumerate(anchors) if alpha > 0}
    tip_anchor_point = {f"thorn{i}:tip": p for i, (p, _a, alpha) in enumerate(anchors) if alpha > 0}
    pairs: list[tuple[GraphPoint, GraphPoint]] = []
    for q in sample_basepoints(out, net_delta):
        qc = out.canonical_point(q)
        if qc.is_vertex:
            if qc.vertex in tip_anchor_point:
                base_point = tip_anchor_point[qc.vertex]
            else:
                base_point = sm.to_old(GraphPoint.at_vertex(qc.vertex))
        elif qc.edge in thorn_anchor_point:
            base_point = thorn_anchor_point[qc.edge]
        else:
            base_point = sm.to_old(GraphPoint.on_edge(qc.edge, qc.offset))
        pairs.append((base_point, qc))
    return out, Correspondence(tuple(pairs))


def build_injective_cactus(base: MetricGraph, mesh=None) -> CactusSpec:
    """A CactusSpec satisfying the injectivity hypotheses.

    The sample-point mesh omega (largest gap between consecutive sample
    points) is kept below the minimal vertex separation and an eighth of the
    injectivity radius, and the thorn lengths are distinct rationals below
    both delta(S)/2 and inj(G) - 2*omega.
    """
    validate(base).raise_on_error()
    vertices = [GraphPoint.at_vertex(v) for v in base.vertices]
    if len(base.vertices) >= 2:
        dv = distance_matrix(base, vertices)
        delta_v = min(
            dv[i][j] for i in range(len(vertices)) for j in range(i + 1, len(vertices))
        )
    else:
        delta_v = base.total_length() if base.edges else Fraction(1)
    inj = injectivity_radius(base)
    bounds = [delta_v * Fraction(7, 8)]
    if inj != float("inf"):
        bounds.append(as_length(inj) / 8)
    if mesh is not None:
        bounds.append(as_length(mesh))
    leaves = {v for v in base.vertices if base.valence(v) == 1}
    for e in base.edges:
        if e.u in leaves and e.v in leaves:
            # an edge joining two leaves needs at least two interior sample
            # points, otherwise the lone thorn sits at the midpoint and the
            # end-swapping reflection survives
            bounds.append(e.length * Fraction(2, 5))
    target = min(bounds)
    if target <= 0:
        raise GraphError("cannot choose a positive mesh")

    points = list(vertices)
    omega = Fraction(0)
    for e in sorted(base.edges, key=lambda e: e.id):
        pieces = max(1, -((-e.length.numerator * target.denominator) // (e.length.denominator * target.numerator)))
        gap = e.length / pieces
        omega = max(omega, gap)
        for i in range(1, pieces):
            points.append(GraphPoint.on_edge(e.id, e.length * i / pieces))

    ds = distance_matrix(base, points)
    delta_s = min(
        ds[i][j] for i in range(len(points)) for j in range(i + 1, len(points))
    )
    caps = [delta_s / 2]
    if inj != float("inf"):
        caps.append(as_length(inj) - 2 * omega)
    cap = min(caps)
    if cap <= 0:
        raise GraphError("mesh too coarse for a valid thorn assignment")

    n = len(points)
    alphas = []
    next_index = 1
    for p in points:
        if p.is_vertex and p.vertex in leaves:
            alphas.append(Fraction(0))
        else:
            alphas.append(cap * next_index / (2 * (n + 1)))
            next_index += 1
    return CactusSpec(base=base, points=tuple(points), thorn_lengths=tuple(alphas))


# -- equal-transform tree pairs ------------------------------------------------------


@dataclass(frozen=True)
class CounterexampleParams:
    """Two trees made of a central edge with spider branches at both ends.

    Every branch is a middle edge of the shared length carrying ``k`` small
    leaf edges of the shared length; the two trees distribute the same
    multiset of k-values differently between the ends.
    """

    central_length: Fraction
    middle_length: Fraction
    small_length: Fraction
    g_end_a: tuple[int, ...]
    g_end_b: tuple[int, ...]
    h_end_a: tuple[int, ...]
    h_end_b: tuple[int, ...]

    def check(self) -> None:
        for value in (self.central_length, self.middle_length, self.small_length):
            if as_length(value) <= 0:
                raise GraphError("lengths must be positive")
        ks = list(self.g_end_a + self.g_end_b + self.h_end_a + self.h_end_b)
        if any(k < 1 for k in ks):
            raise GraphError("each branch needs at least one small edge")
        if Counter(self.g_end_a + self.g_end_b) != Counter(self.h_end_a + self.h_end_b):
            raise GraphError("profile multisets of the two trees must agree")
        g_sides = (Counter(self.g_end_a), Counter(self.g_end_b))
        h_sides = (Counter(self.h_end_a), Counter(self.h_end_b))
        if h_sides in (g_sides, (g_sides[1], g_sides[0])):
            raise GraphError("degenerate parameters: assignments agree up to the end swap")


def _spider_tree(tag: str, c: Fraction, m: Fraction, s: Fraction, end_a: Sequence[int], end_b: Sequence[int]) -> MetricGraph:
    vertices = [f"{tag}A", f"{tag}B"]
    edges: list[tuple[str, str, str, Fraction]] = [("central", f"{tag}A", f"{tag}B", c)]
    for side, ks in (("A", end_a), ("B", end_b)):
        hub = f"{tag}{side}"
        for i, k in enumerate(ks):
            branch = f"{tag}{side}{i}"
            vertices.append(branch)
            edges.append((f"mid:{side}{i}", hub, branch, m))
            for j in range(k):
                leaf = f"{branch}s{j}"
                vertices.append(leaf)
                edges.append((f"small:{side}{i}.{j}", branch, leaf, s))
    g = MetricGraph(vertices, edges)
    validate(g).raise_on_error()
    return g


def counterexample_pair(params: CounterexampleParams) -> tuple[MetricGraph, MetricGraph]:
    """Build the two spider trees from the parameters.

    Non-isometry should be certified with canonical_tree_code, and transform
    equality checked empirically with persistence_distortion_estimate at two
    sampling resolutions.
    """
    params.check()
    c = as_length(params.central_length)
    m = as_length(params.middle_length)
    s = as_length(params.small_length)
    g = _spider_tree("g", c, m, s, params.g_end_a, params.g_end_b)
    h = _spider_tree("h", c, m, s, params.h_end_a, params.h_end_b)
    return g, h


def golden_counterexample_params() -> CounterexampleParams:
    """The frozen instance: splits {1,1,4,4}|{2,2,3,3} versus
    {1,2,3,4}|{1,2,3,4} of the branch-count multiset {1,1,2,2,3,3,4,4}.

    Every end of either tree carries four branches with small-edge surplus
    (sum of k-1) equal to six.  This balance makes the barcode of a basepoint
    depend only on its distance along its branch and that branch's k, never
    on which end or tree the branch sits on, so the two transforms coincide
    exactly while the end multisets (and hence the trees) differ.
    """
    return CounterexampleParams(
        central_length=Fraction(1),
        middle_length=Fraction(1),
        small_length=Fraction(1, 4),
        g_end_a=(1, 1, 4, 4),
        g_end_b=(2, 2, 3, 3),
        h_end_a=(1, 2, 3, 4),
        h_end_b=(1, 2, 3, 4),
    )


def attach_at(
    host: MetricGraph,
    edge_id: str,
    offset,
    tree: MetricGraph,
    root: GraphPoint,
    scale=Fraction(1),
    prefix: str = "att",
) -> MetricGraph:
    """Glue a scaled copy of ``tree`` by its root at an edge-interior point."""
    validate(host).raise_on_error()
    validate(tree).raise_on_error()
    scale = as_length(scale)
    if scale <= 0:
        raise GraphError("scale must be positive")
    e = host.edge(edge_id)
    offset = as_length(offset)
    if not (0 < offset < e.length):
        raise GraphError("attachment point must be interior to the edge")
    root = tree.canonical_point(root)
    if not root.is_vertex:
        tree2, sm = subdivide_at(tree, [root])
        root = sm.to_new(root)
        tree = tree2
    g2, sm_host = subdivide_at(host, [GraphPoint.on_edge(edge_id, offset)])
    anchor = sm_host.to_new(host.canonical_point(GraphPoint.on_edge(edge_id, offset))).vertex

    def rename(v: str) -> str:
        return anchor if v == root.vertex else f"{prefix}:{v}"

    vertices = list(g2.vertices) + [rename(v) for v in tree.vertices if v != root.vertex]
    edges = [(e2.id, e2.u, e2.v, e2.length) for e2 in g2.edges]
    for te in tree.edges:
        edges.append((f"{prefix}:{te.id}", rename(te.u), rename(te.v), te.length * scale))
    out = MetricGraph(vertices, edges)
    validate(out).raise_on_error()
    return out


# -- random graphs ---------------------------------------------------------------------


_DENOMINATORS = (101, 103, 107, 109, 113, 127, 131, 137, 139, 149)


def _random_length(rng: random.Random) -> Fraction:
    den = rng.choice(_DENOMINATORS)
    num = rng.randrange(den + 1, 3 * den)
    return Fraction(num, den)


def random_metric_graph(
    seed: int,
    n_vertices: int,
    extra_edges: int,
    allow_self_loops: bool = True,
    allow_parallel: bool = True,
    ensure_generic="auto",
    max_cells: int = 60,
) -> MetricGraph:
    """Connected random multigraph, deterministic per seed.

    A random spanning tree gets ``extra_edges`` additional random edges, so
    the first Betti number equals ``extra_edges``.  Lengths are rationals
    with varied prime denominators; with ``ensure_generic`` (the default
    "auto" runs the check only when the coefficient box is small enough) the
    lengths are redrawn until no small integer relation with coefficients up
    to 5 exists.
    """
    if n_vertices < 1 or extra_edges < 0 or n_vertices + extra_edges > max_cells:
        raise GraphError("requested size exceeds the desk-scale guard")
    rng = random.Random(seed)
    vertices = [f"v{i}" for i in range(n_vertices)]
    structure: list[tuple[str, str, str]] = []
    for i in range(1, n_vertices):
        parent = rng.randrange(i)
        structure.append((f"e{len(structure)}", f"v{parent}", f"v{i}"))
    existing = {frozenset((u, v)) for _eid, u, v in structure}
    for _ in range(extra_edges):
        for _attempt in range(200):
            a = rng.randrange(n_vertices)
            b = rng.randrange(n_vertices)
            if a == b and (not allow_self_loops or n_vertices == 0):
                continue
            key = frozenset((f"v{a}", f"v{b}"))
            if not allow_parallel and key in existing:
                continue
            existing.add(key)
            structure.append((f"e{len(structure)}", f"v{a}", f"v{b}"))
            break
        else:
            raise GraphError("could not place an extra edge under the given constraints")

    n_edges = len(structure)
    feasible = (2 * 5 + 1) ** n_edges <= 400_000
    check = ensure_generic is True or (ensure_generic == "auto" and feasible)
    if ensure_generic is True and not feasible:
        raise SearchSpaceExceeded("too many edges for the genericity predicate")
    for _attempt in range(40):
        lengths = [_random_length(rng) for _ in structure]
        if not check or has_small_integer_relation(lengths, 5, Fraction(0)) is None:
            break
    else:  # pragma: no cover - overwhelmingly unlikely
        raise GraphError("failed to draw generic lengths")
    g = MetricGraph(vertices, [(eid, u, v, l) for (eid, u, v), l in zip(structure, lengths)])
    validate(g).raise_on_error()
    return g


# -- ball systems on trees ----------------------------------------------------------------


@dataclass(frozen=True)
class HellyReport:
    pairwise_intersecting: bool
    witness: GraphPoint | None
    holds: bool


def _tripod_center(graph: MetricGraph, x: GraphPoint, y: GraphPoint, z: GraphPoint) -> GraphPoint:
    dm = distance_matrix(graph, [x, y, z])
    t = (dm[0][1] + dm[0][2] - dm[1][2]) / 2
    return point_along_geodesic(graph, x, y, t)


def _two_ball_point(graph: MetricGraph, c1: GraphPoint, r1: Fraction, c2: GraphPoint, r2: Fraction) -> GraphPoint:
    d = distance_matrix(graph, [c1, c2])[0][1]
    t = max(Fraction(0), d - r2)
    if t > r1:
        raise GraphError("balls do not intersect")
    return point_along_geodesic(graph, c1, c2, t)


def tree_helly_check(tree: MetricGraph, balls: Sequence[tuple[GraphPoint, object]], max_balls: int = 9) -> HellyReport:
    """Verify the Helly property of balls in a tree, constructively.

    If the balls pairwise intersect, a common point is produced by recursive
    tripod centers: a witness for a ball family is the tripod center of
    witnesses for three maximal subfamilies.  The returned witness is checked
    exactly against every ball.
    """
    validate(tree).raise_on_error()
    if tree.beta1() != 0:
        raise GraphError("non-tree input")
    if len(balls) > max_balls:
        raise SearchSpaceExceeded(f"too many balls ({len(balls)} > {max_balls})")
    centers = [tree.canonical_point(c) for c, _r in balls]
    radii = [as_length(r) for _c, r in balls]
    if any(r < 0 for r in radii):
        raise GraphError("radii must be nonnegative")
    if not balls:
        return HellyReport(pairwise_intersecting=True, witness=None, holds=True)
    dm = distance_matrix(tree, centers)
    n = len(balls)
    for i in range(n):
        for j in range(i + 1, n):
            if dm[i][j] > radii[i] + radii[j]:
                return HellyReport(pairwise_intersecting=False, witness=None, holds=True)

    memo: dict[frozenset, GraphPoint] = {}

    def witness(indices: frozenset) -> GraphPoint:
        if indices in memo:
            return memo[indices]
        idx = sorted(indices)
        if len(idx) == 1:
            result = centers[idx[0]]
        elif len(idx) == 2:
            i, j = idx
            result = _two_ball_point(tree, centers[i], radii[i], centers[j], radii[j])
        else:
            a, b, c = idx[0], idx[1], idx[2]
            result = _tripod_center(
                tree,
                witness(indices - {a}),
                witness(indices - {b}),
                witness(indices - {c}),
            )
        memo[indices] = result
        return result

    w = witness(frozenset(range(n)))
    checks = distance_matrix(tree, centers + [w])
    for i in range(n):
        if checks[i][n] > radii[i]:  # pragma: no cover - impossible on a tree
            raise GraphError("tripod witness escaped a ball; input is not a tree?")
    return HellyReport(pairwise_intersecting=True, witness=w, holds=True)


def ball_intersection_witness(graph: MetricGraph, balls: Sequence[tuple[GraphPoint, object]]) -> GraphPoint | None:
    """Exact common-intersection test for balls on any graph.

    Minimizes max_i (d(c_i, x) - r_i), a piecewise-linear function with
    slopes +-1 on every edge, by evaluating it at all envelope breakpoints.
    Returns a witness point or None.
    """
    validate(graph).raise_on_error()
    if not balls:
        raise GraphError("need at least one ball")
    centers = [graph.canonical_point(c) for c, _r in balls]
    radii = [as_length(r) for _c, r in balls]
    g2, sm = subdivide_at(graph, centers)
    rows = []
    from .graphs import _vertex_distances

    for c in centers:
        rows.append(_vertex_distances(g2, sm.to_new(c).vertex))

    best: tuple[Fraction, str, Fraction] | None = None  # (value, edge, offset)
    for e in g2.edges:
        candidates: set[Fraction] = {Fraction(0), e.length}
        apexes = []
        for row in rows:
            du, dv = row[e.u], row[e.v]
            apex = (e.length + dv - du) / 2
            apexes.append((du, dv, apex))
            if 0 < apex < e.length:
                candidates.add(apex)
        for i in range(len(rows)):
            for j in range(len(rows)):
                if i == j:
                    continue
                # ascending line of ball i meets descending line of ball j
                du_i = apexes[i][0]
                dv_j = apexes[j][1]
                t = (dv_j + e.length - radii[j] - du_i + radii[i]) / 2
                if 0 < t < e.length:
                    candidates.add(t)
        for t in candidates:
            value = None
            for (du, dv, _apex), r in zip(apexes, radii):
                g_val = min(du + t, dv + e.length - t) - r
                value = g_val if value is None else max(value, g_val)
            if best is None or value < best[0]:
                best = (value, e.id, t)
    if best is None:
        # vertex-only graph
        v = g2.vertices[0]
        value = max(row[v] - r for row, r in zip(rows, radii))
        if value <= 0:
            return graph.canonical_point(GraphPoint.at_vertex(v))
        return None
    if best[0] <= 0:
        return sm.to_old(g2.canonical_point(GraphPoint.on_edge(best[1], best[2])))
    return None


@dataclass(frozen=True)
class RipsCechReport:
    ok: bool
    subsets_checked: int
    violations: tuple[tuple[Fraction, tuple[int, ...]], ...]


def rips_cech_tree_check(
    tree: MetricGraph,
    points: Sequence[GraphPoint],
    scales: Sequence,
    max_subset_size: int = 4,
) -> RipsCechReport:
    """On a tree, a finite point set spans a Cech simplex at scale t exactly
    when it spans a Rips simplex at scale 2t.  Checks every subset up to the
    given size at every scale, producing Cech witnesses constructively."""
    validate(tree).raise_on_error()
    if tree.beta1() != 0:
        raise GraphError("non-tree input")
    pts = [tree.canonical_point(p) for p in points]
    dm = distance_matrix(tree, pts)
    checked = 0
    violations: list[tuple[Fraction, tuple[int, ...]]] = []
    for scale in scales:
        t = as_length(scale)
        for size in range(2, max_subset_size + 1):
            for subset in itertools.combinations(range(len(pts)), size):
                checked += 1
                rips = all(
                    dm[subset[i]][subset[j]] <= 2 * t
                    for i in range(size)
                    for j in range(i + 1, size)
                )
                if rips:
                    report = tree_helly_check(tree, [(pts[i], t) for i in subset])
                    cech = report.witness is not None
                else:
                    cech = False  # two balls are already disjoint
                if rips != cech:
                    violations.append((t, subset))
    return RipsCechReport(ok=not violations, subsets_checked=checked, violations=tuple(violations))


def rips_cech_cycle_violation(
    graph: MetricGraph,
    points: Sequence[GraphPoint],
    scales: Sequence,
    max_subset_size: int = 4,
) -> tuple[Fraction, tuple[int, ...]] | None:
    """Negative control: on graphs with cycles the Cech/Rips scale relation
    fails.  Returns the first (scale, subset) spanning a Rips simplex at 2t
    but no common ball intersection at t, or None."""
    pts = [graph.canonical_point(p) for p in points]
    dm = distance_matrix(graph, pts)
    for scale in scales:
        t = as_length(scale)
        for size in range(2, max_subset_size + 1):
            for subset in itertools.combinations(range(len(pts)), size):
                rips = all(
                    dm[subset[i]][subset[j]] <= 2 * t
                    for i in range(size)
                    for j in range(i + 1, size)
                )
                if not rips:
                    continue
                witness = ball_intersection_witness(graph, [(pts[i], t) for i in subset])
                if witness is None:
                    return (t, subset)
    return None


# -- search for equal diagrams without symmetry ------------------------------------------


@dataclass(frozen=True)
class NonInjectiveWitness:
    graph: MetricGraph
    point_a: GraphPoint
    point_b: GraphPoint


@dataclass
class TreeSearchSpace:
    """Bounded family of candidate trees for the diagram-collision search.

    ``family`` chooses the generator:

    * "decorated_spine": a symmetric spine whose two interior vertices carry
      different three-level decorations (a side leg, then a deeper leg, then
      a two-leaf fork) with lengths from ``length_grid``.  Such trees can
      present identical merge records from mirrored basepoints while having
      no automorphism at all.
    * "two_end_spider": central edge with spider branches at both ends from
      ``branch_profiles``.  These always carry leaf-permuting automorphisms,
      so this family is a negative control: the search skips all of it.
    """

    family: str = "decorated_spine"
    length_grid: tuple[Fraction, ...] = (
        Fraction(2),
        Fraction(3),
        Fraction(5),
    )
    beta_grid: tuple[Fraction, ...] = (Fraction(4), Fraction(6))
    spine_half: Fraction = Fraction(2)
    spine_middle: Fraction = Fraction(1)
    first_leg: Fraction = Fraction(3, 2)
    branch_profiles: tuple[tuple[int, ...], ...] = ((1, 4), (2, 3))
    max_candidates: int = 400
    probe_delta: Fraction = Fraction(1)


def _two_end_spider_candidates(space: TreeSearchSpace):
    for c in space.length_grid:
        for m in space.length_grid:
            for s in space.length_grid:
                if s >= m:
                    continue
                for end_a in space.branch_profiles:
                    for end_b in space.branch_profiles:
                        if end_a == end_b:
                            continue
                        yield _spider_tree("w", as_length(c), as_length(m), as_length(s), end_a, end_b)


def _decoration_shapes(space: TreeSearchSpace):
    for beta in space.beta_grid:
        for d1, d2 in itertools.combinations_with_replacement(sorted(space.length_grid), 2):
            yield (as_length(beta), as_length(d1), as_length(d2))


def _decorated_spine_candidates(space: TreeSearchSpace):
    shapes = list(_decoration_shapes(space))
    A = as_length(space.spine_half)
    B = as_length(space.spine_middle)
    alpha = as_length(space.first_leg)
    for s1, s2 in itertools.combinations(shapes, 2):
        vertices = ["end1", "u", "v", "end2"]
        edges = [
            ("spine1", "end1", "u", A),
            ("spine2", "u", "v", B),
            ("spine3", "v", "end2", A),
        ]
        for tag, hub, (beta, d1, d2) in (("L", "u", s1), ("R", "v", s2)):
            a, b, c = f"{tag}a", f"{tag}b", f"{tag}c"
            vertices += [a, b, c, f"{tag}leg1", f"{tag}leg2", f"{tag}f1", f"{tag}f2"]
            edges += [
                (f"{tag}e1", hub, a, Fraction(1)),
                (f"{tag}e2", a, b, Fraction(1)),
                (f"{tag}e3", b, c, Fraction(1)),
                (f"{tag}alpha", a, f"{tag}leg1", alpha),
                (f"{tag}beta", b, f"{tag}leg2", beta),
                (f"{tag}d1", c, f"{tag}f1", d1),
                (f"{tag}d2", c, f"{tag}f2", d2),
            ]
        yield MetricGraph(vertices, edges)


def search_noninjective_trivial_auto(space: TreeSearchSpace) -> NonInjectiveWitness | None:
    """Search a bounded tree family for a tree with a trivial automorphism
    group carrying two distinct basepoints with identical diagrams.

    Candidates failing the automorphism test are skipped; diagrams are
    compared exactly on the probe net.  Returns the first witness or None if
    the space is exhausted.
    """
    if space.family == "two_end_spider":
        candidates = _two_end_spider_candidates(space)
    elif space.family == "decorated_spine":
        candidates = _decorated_spine_candidates(space)
    else:
        raise GraphError(f"unknown search family {space.family!r}")

    seen = 0
    for graph in candidates:
        seen += 1
        if seen > space.max_candidates:
            raise SearchSpaceExceeded("candidate budget exhausted")
        if not validate(graph).ok:
            continue
        try:
            if automorphism_count(graph, max_suppressed_vertices=24) != 1:
                continue
        except SearchSpaceExceeded:
            continue
        probes = sample_basepoints(graph, space.probe_delta)
        by_key: dict[tuple, int] = {}
        for idx, p in enumerate(probes):
            d = diagram_of(graph, p)
            key = d.key()
            if key in by_key:
                other = probes[by_key[key]]
                if graph.canonical_point(other) != graph.canonical_point(p):
                    return NonInjectiveWitness(graph=graph, point_a=other, point_b=p)
            else:
                by_key[key] = idx
    return None
