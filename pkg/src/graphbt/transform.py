"""The barcode transform of a metric graph and its applications.

The transform of a graph is the set of extended persistence diagrams of
d(p, .) over all basepoints p.  Here it is approximated by a delta-net of
basepoints with an exact covering-radius certificate: since p -> diagram(p)
is 1-Lipschitz (bottleneck vs. geodesic distance), every true diagram lies
within the covering radius of a sampled one.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .graphs import (
    GraphError,
    GraphPoint,
    MetricGraph,
    as_length,
    distance,
    is_circle,
    validate,
)
from .matching import bottleneck, hausdorff_sets, wasserstein_infinity
from .persistence import Diagram, diagram_of, valence_from_diagram

__all__ = [
    "BarcodeSample",
    "MeasuredBarcodeSample",
    "sample_basepoints",
    "barcode_transform",
    "PDEstimate",
    "persistence_distortion_estimate",
    "measured_transform",
    "MeasuredPDEstimate",
    "measured_persistence_distortion_estimate",
    "ProbeCheck",
    "ProbeResult",
    "local_isometry_probe",
    "is_circle",
    "InjectivityReport",
    "sampled_injectivity_check",
    "estimate_intrinsic_metric",
    "TipClassification",
    "classify_tip",
]


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _edge_offsets(length: Fraction, delta: Fraction) -> list[Fraction]:
    """Interior offsets splitting an edge into pieces of length <= delta."""
    pieces = max(1, _ceil(length / delta))
    return [length * i / pieces for i in range(1, pieces)]


def sample_basepoints(graph: MetricGraph, delta) -> list[GraphPoint]:
    """All vertices plus equally spaced edge-interior points with gaps at most
    delta, giving covering radius at most delta/2."""
    delta = as_length(delta)
    if delta <= 0:
        raise GraphError("delta must be positive")
    points = [GraphPoint.at_vertex(v) for v in sorted(graph.vertices)]
    for e in sorted(graph.edges, key=lambda e: e.id):
        for off in _edge_offsets(e.length, delta):
            points.append(GraphPoint.on_edge(e.id, off))
    return points


def _covering_radius(graph: MetricGraph, delta: Fraction) -> Fraction:
    radius = Fraction(0)
    for e in graph.edges:
        pieces = max(1, _ceil(e.length / delta))
        gap = e.length / pieces
        if gap / 2 > radius:
            radius = gap / 2
    return radius


@dataclass(frozen=True)
class BarcodeSample:
    """A finite approximation of the barcode transform.

    ``delta_hat`` is the verified covering radius of the basepoint net; by
    Lipschitz stability every true diagram of the transform is within
    bottleneck distance delta_hat of some sampled diagram.
    """

    graph: MetricGraph
    points: tuple[GraphPoint, ...]
    diagrams: tuple[Diagram, ...]
    requested_delta: Fraction
    delta_hat: Fraction

    def __len__(self) -> int:
        return len(self.points)


def barcode_transform(graph: MetricGraph, delta, method: str = "sweep") -> BarcodeSample:
    """Diagrams at every point of a delta-net of basepoints."""
    validate(graph).raise_on_error()
    delta = as_length(delta)
    points = sample_basepoints(graph, delta)
    diagrams = tuple(diagram_of(graph, p, method=method) for p in points)
    return BarcodeSample(
        graph=graph,
        points=tuple(graph.canonical_point(p) for p in points),
        diagrams=diagrams,
        requested_delta=delta,
        delta_hat=_covering_radius(graph, delta),
    )


@dataclass(frozen=True)
class PDEstimate:
    """Sampled persistence distortion with its certified error window."""

    estimate: Fraction
    lower: Fraction
    upper: Fraction
    delta_hat_a: Fraction
    delta_hat_b: Fraction
    sample_a: BarcodeSample
    sample_b: BarcodeSample


def persistence_distortion_estimate(graph_a: MetricGraph, graph_b: MetricGraph, delta) -> PDEstimate:
    """Hausdorff (bottleneck) distance between the two sampled transforms.

    The true persistence distortion lies within estimate +- (delta_hat_a +
    delta_hat_b); the returned lower bound is clamped at zero.
    """
    sample_a = barcode_transform(graph_a, delta)
    sample_b = barcode_transform(graph_b, delta)
    estimate = hausdorff_sets(sample_a.diagrams, sample_b.diagrams)
    slack = sample_a.delta_hat + sample_b.delta_hat
    return PDEstimate(
        estimate=estimate,
        lower=max(Fraction(0), estimate - slack),
        upper=estimate + slack,
        delta_hat_a=sample_a.delta_hat,
        delta_hat_b=sample_b.delta_hat,
        sample_a=sample_a,
        sample_b=sample_b,
    )


@dataclass(frozen=True)
class MeasuredBarcodeSample:
    """A BarcodeSample with weights: the sampled surrogate for the pushforward
    of a length measure under the diagram map."""

    sample: BarcodeSample
    weights: tuple[Fraction, ...]

    def weighted_diagrams(self) -> list[tuple[Diagram, Fraction]]:
        return list(zip(self.sample.diagrams, self.weights))


def measured_transform(graph: MetricGraph, delta, density="uniform") -> MeasuredBarcodeSample:
    """Sampled transform with weights from a piecewise-constant edge density.

    Each sample point gets the density-mass of its Voronoi cell along the
    edges (exact for piecewise-constant densities); weights are normalized to
    total 1.
    """
    sample = barcode_transform(graph, delta)
    delta = as_length(delta)
    if density == "uniform":
        dens: Mapping[str, Fraction] = {e.id: Fraction(1) for e in graph.edges}
    else:
        dens = {str(k): as_length(v) for k, v in dict(density).items()}
        for e in graph.edges:
            if e.id not in dens:
                dens[e.id] = Fraction(0)
    if any(v < 0 for v in dens.values()):
        raise GraphError("density weights must be nonnegative")

    index = {p: i for i, p in enumerate(sample.points)}
    masses = [Fraction(0)] * len(sample.points)
    for e in graph.edges:
        offsets = [Fraction(0)] + _edge_offsets(e.length, delta) + [e.length]
        rho = dens[e.id]
        for i, off in enumerate(offsets):
            left = offsets[i - 1] if i > 0 else off
            right = offsets[i + 1] if i + 1 < len(offsets) else off
            cell = (right - left) / 2
            point = graph.canonical_point(GraphPoint.on_edge(e.id, off))
            masses[index[point]] += rho * cell
    total = sum(masses, Fraction(0))
    if total == 0:
        raise GraphError("density has zero total mass")
    weights = tuple(m / total for m in masses)
    return MeasuredBarcodeSample(sample=sample, weights=weights)


@dataclass(frozen=True)
class MeasuredPDEstimate:
    estimate: Fraction
    error_bound: Fraction


def measured_persistence_distortion_estimate(
    measured_a: MeasuredBarcodeSample, measured_b: MeasuredBarcodeSample
) -> MeasuredPDEstimate:
    """Infinity-Wasserstein distance between the weighted diagram samples,
    with the Lipschitz sampling slack as error bound."""
    est = wasserstein_infinity(measured_a.weighted_diagrams(), measured_b.weighted_diagrams())
    bound = measured_a.sample.delta_hat + measured_b.sample.delta_hat
    return MeasuredPDEstimate(estimate=est, error_bound=bound)


# -- local isometry --------------------------------------------------------------


@dataclass(frozen=True)
class ProbeCheck:
    direction: str
    point: GraphPoint
    graph_distance: Fraction
    bottleneck_distance: Fraction

    @property
    def equal(self) -> bool:
        return self.graph_distance == self.bottleneck_distance


@dataclass(frozen=True)
class ProbeResult:
    ok: bool
    radius: Fraction | None
    halvings: int
    checks: tuple[ProbeCheck, ...]


def _probe_directions(graph: MetricGraph, p: GraphPoint) -> list[tuple[str, str, int, Fraction]]:
    """(label, edge id, orientation end, available run length) per direction."""
    out = []
    if p.is_vertex:
        for eid, end in graph.germs(p.vertex):
            e = graph.edge(eid)
            run = e.length / 2 if e.is_loop else e.length
            out.append((f"{eid}[{end}]", eid, end, run))
    else:
        e = graph.edge(p.edge)
        out.append((f"{e.id}[->u]", e.id, 1, p.offset))
        out.append((f"{e.id}[->v]", e.id, 0, e.length - p.offset))
    return out


def local_isometry_probe(graph: MetricGraph, p: GraphPoint, max_halvings: int = 20) -> ProbeResult:
    """Find a radius r with bottleneck(diagram(p), diagram(q)) == d(p, q)
    exactly for the probe points q at arc distance r in every germ direction.

    Starts at half the shortest available direction run and halves at most
    ``max_halvings`` times.  Circles are rejected: on a circle all diagrams
    coincide and no such radius exists.
    """
    if is_circle(graph):
        raise GraphError("circle input: every basepoint has the same diagram")
    p = graph.canonical_point(p)
    directions = _probe_directions(graph, p)
    if not directions:
        return ProbeResult(ok=True, radius=Fraction(0), halvings=0, checks=())
    base_diagram = diagram_of(graph, p)
    r = min(run for _label, _eid, _end, run in directions) / 2
    checks: tuple[ProbeCheck, ...] = ()
    for halving in range(max_halvings):
        checks_list = []
        all_equal = True
        for label, eid, end, _run in directions:
            e = graph.edge(eid)
            if p.is_vertex:
                offset = r if end == 0 else e.length - r
            else:
                offset = p.offset - r if end == 1 else p.offset + r
            q = graph.canonical_point(GraphPoint.on_edge(eid, offset))
            d_g = distance(graph, p, q)
            d_b = bottleneck(base_diagram, diagram_of(graph, q))
            check = ProbeCheck(label, q, d_g, d_b)
            checks_list.append(check)
            if not check.equal:
                all_equal = False
        checks = tuple(checks_list)
        if all_equal:
            return ProbeResult(ok=True, radius=r, halvings=halving, checks=checks)
        r = r / 2
    return ProbeResult(ok=False, radius=None, halvings=max_halvings, checks=checks)


# -- injectivity and reconstruction ------------------------------------------------


@dataclass(frozen=True)
class InjectivityReport:
    points: tuple[GraphPoint, ...]
    delta_hat: Fraction
    tolerance: Fraction
    collisions: tuple[tuple[int, int, Fraction], ...]
    min_separation: Fraction | None

    @property
    def injective_on_sample(self) -> bool:
        return not self.collisions


def sampled_injectivity_check(
    graph: MetricGraph,
    delta,
    tolerance=Fraction(0),
    min_separation: bool | None = None,
) -> InjectivityReport:
    """Look for basepoint pairs with (near-)equal diagrams on a delta-net.

    With the default exact-zero tolerance, collisions are found by exact
    diagram equality, which under rational arithmetic is a proof of
    non-injectivity on the sample.  ``min_separation`` controls whether the
    full pairwise minimum is computed (None = only for small samples).
    """
    tolerance = as_length(tolerance)
    sample = barcode_transform(graph, delta)
    diagrams = sample.diagrams
    n = len(diagrams)
    collisions: list[tuple[int, int, Fraction]] = []
    groups: dict[tuple, list[int]] = {}
    for i, d in enumerate(diagrams):
        groups.setdefault(d.key(), []).append(i)
    for idxs in groups.values():
        for a in range(len(idxs)):
            for b in range(a + 1, len(idxs)):
                collisions.append((idxs[a], idxs[b], Fraction(0)))

    want_min = min_separation if min_separation is not None else (n <= 120)
    min_sep: Fraction | None = None
    if tolerance > 0 or want_min:
        for i in range(n):
            for j in range(i + 1, n):
                if diagrams[i].key() == diagrams[j].key():
                    continue
                value = bottleneck(diagrams[i], diagrams[j])
                if tolerance > 0 and value <= tolerance:
                    collisions.append((i, j, value))
                if min_sep is None or value < min_sep:
                    min_sep = value
    if collisions:
        min_sep = min(c[2] for c in collisions)
    collisions.sort()
    return InjectivityReport(
        points=sample.points,
        delta_hat=sample.delta_hat,
        tolerance=tolerance,
        collisions=tuple(collisions),
        min_separation=min_sep,
    )


def estimate_intrinsic_metric(sample: BarcodeSample, connect_radius=None) -> list[list[Fraction]]:
    """Shortest-path distances in the graph on sampled diagrams whose edges
    are bottleneck distances at most connect_radius (default 3 * delta_hat).

    When the diagram map is injective this approximates the graph metric on
    the sampled basepoints, with error shrinking with the net resolution.
    """
    n = len(sample.points)
    if n == 0:
        return []
    if n == 1:
        return [[Fraction(0)]]
    radius = as_length(connect_radius) if connect_radius is not None else 3 * sample.delta_hat
    if radius <= 0:
        raise GraphError("connect_radius must be positive")
    adjacency: list[list[tuple[int, Fraction]]] = [[] for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            b = bottleneck(sample.diagrams[i], sample.diagrams[j])
            if b <= radius:
                adjacency[i].append((j, b))
                adjacency[j].append((i, b))

    out: list[list[Fraction]] = []
    for src in range(n):
        dist: dict[int, Fraction] = {src: Fraction(0)}
        done: set[int] = set()
        heap: list[tuple[Fraction, int]] = [(Fraction(0), src)]
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for v, w in adjacency[u]:
                nd = d + w
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        if len(done) != n:
            raise GraphError(
                "surrogate diagram graph is disconnected; increase connect_radius"
            )
        out.append([dist[j] for j in range(n)])
    return out


# -- tip classification ---------------------------------------------------------------


@dataclass(frozen=True)
class TipClassification:
    kind: str  # "genuine-leaf" | "self-loop-antipode" | "other"
    half_circumference: Fraction | None = None


def classify_tip(diagram: Diagram) -> TipClassification:
    """Distinguish the diagram of a true leaf from the diagram at the far
    point of a topological self-loop.

    A leaf basepoint has no 1-dimensional point with death zero.  A valence-2
    basepoint with such a point sits on a cycle, and the point's birth is the
    half-circumference of that cycle as measured from the basepoint.
    """
    valence = valence_from_diagram(diagram)
    if valence == 1:
        return TipClassification(kind="genuine-leaf")
    if valence == 2:
        death_zero = [p for p in diagram.in_dim(1) if p.death == 0]
        return TipClassification(
            kind="self-loop-antipode", half_circumference=death_zero[0].birth
        )
    return TipClassification(kind="other")
