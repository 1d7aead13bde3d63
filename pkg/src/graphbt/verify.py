"""Named verification suites driving the library's property checks.

Each suite runs a deterministic corpus and reports per-case pass/fail; the
CLI exposes them via ``graphbt verify <suite>``.  The test suite runs the
same properties at larger sizes.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .compare import Correspondence, DiscreteCoupling, correspondence_cost, coupling_cost_infinity
from .constructions import (
    build_injective_cactus,
    cactus,
    cactus_base_correspondence,
    circle,
    counterexample_pair,
    dumbbell,
    golden_counterexample_params,
    interval,
    path,
    random_metric_graph,
    rips_cech_cycle_violation,
    rips_cech_tree_check,
    star,
    theta,
    tree_helly_check,
)
from .graphs import (
    GraphPoint,
    MetricGraph,
    as_length,
    distance,
    distance_matrix,
    is_circle,
)
from .matching import bottleneck, wasserstein_infinity
from .persistence import (
    build_height_field,
    diagram_of,
    extended_persistence_reduction,
    extended_persistence_sweep,
)
from .symmetry import canonical_tree_code
from .transform import (
    barcode_transform,
    local_isometry_probe,
    persistence_distortion_estimate,
    sample_basepoints,
    sampled_injectivity_check,
)

__all__ = ["CaseResult", "SuiteReport", "SUITES", "run_suite"]


@dataclass(frozen=True)
class CaseResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    cases: list[CaseResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.cases)

    def add(self, name: str, ok: bool, detail: str = "") -> None:
        self.cases.append(CaseResult(name, bool(ok), detail))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "cases": [
                {"name": c.name, "ok": c.ok, "detail": c.detail} for c in self.cases
            ],
        }


# -- shared corpora ------------------------------------------------------------------


def corpus_graphs(n: int, max_vertices: int = 8, max_extra: int = 4) -> list[MetricGraph]:
    """Deterministic random multigraphs within the desk-scale bounds."""
    graphs = []
    for seed in range(n):
        n_vertices = 2 + seed % (max_vertices - 1)
        extra = seed % (max_extra + 1)
        graphs.append(
            random_metric_graph(1000 + seed, n_vertices, extra, ensure_generic=False)
        )
    return graphs


def standard_basepoints(graph: MetricGraph) -> list[GraphPoint]:
    """All vertices plus every edge midpoint."""
    points = [GraphPoint.at_vertex(v) for v in graph.vertices]
    points += [GraphPoint.on_edge(e.id, e.length / 2) for e in graph.edges]
    return points


def perturbed_copy(graph: MetricGraph, seed: int, scale=Fraction(1, 50)) -> MetricGraph:
    """Same combinatorics, each edge length multiplied by 1 + eta with
    |eta| <= scale (rational, deterministic)."""
    rng = random.Random(seed)
    scale = as_length(scale)
    edges = []
    for e in graph.edges:
        eta = Fraction(rng.randrange(-16, 17), 16) * scale
        edges.append((e.id, e.u, e.v, e.length * (1 + eta)))
    return MetricGraph(graph.vertices, edges)


def proportional_net_pairs(graph_a: MetricGraph, graph_b: MetricGraph, delta) -> list[tuple[GraphPoint, GraphPoint]]:
    """Pair the delta-nets of two combinatorially identical graphs by
    proportional reparametrization of each edge.

    The union of both nets is paired in both directions, so the projections
    cover both sampled sets.
    """
    delta = as_length(delta)
    pairs: list[tuple[GraphPoint, GraphPoint]] = []

    def transport(p: GraphPoint, src: MetricGraph, dst: MetricGraph) -> GraphPoint:
        p = src.canonical_point(p)
        if p.is_vertex:
            return GraphPoint.at_vertex(p.vertex)
        ratio = dst.edge(p.edge).length / src.edge(p.edge).length
        return dst.canonical_point(GraphPoint.on_edge(p.edge, p.offset * ratio))

    for p in sample_basepoints(graph_a, delta):
        pairs.append((graph_a.canonical_point(p), transport(p, graph_a, graph_b)))
    for q in sample_basepoints(graph_b, delta):
        pairs.append((transport(q, graph_b, graph_a), graph_b.canonical_point(q)))
    return pairs


# -- suites ----------------------------------------------------------------------------


def verify_oracle(n_graphs: int = 20) -> SuiteReport:
    report = SuiteReport("oracle")
    for i, g in enumerate(corpus_graphs(n_graphs)):
        ok = True
        detail = ""
        for p in standard_basepoints(g):
            f = build_height_field(g, p)
            if extended_persistence_sweep(f).tagged_key() != extended_persistence_reduction(f).tagged_key():
                ok = False
                detail = f"mismatch at {p.label()}"
                break
        report.add(f"graph-{i}", ok, detail)
    return report


def verify_stability(pair_trials: int = 120, distortion_trials: int = 8, measured_trials: int = 4) -> SuiteReport:
    report = SuiteReport("stability")
    graphs = corpus_graphs(12)
    rng = random.Random(20240)

    violations = 0
    for t in range(pair_trials):
        g = graphs[t % len(graphs)]
        points = sample_basepoints(g, Fraction(1, 2))
        p, q = rng.choice(points), rng.choice(points)
        if bottleneck(diagram_of(g, p), diagram_of(g, q)) > distance(g, p, q):
            violations += 1
    report.add("diagram-map-lipschitz", violations == 0, f"{pair_trials} trials")

    distortion_corpus = corpus_graphs(distortion_trials, max_vertices=5, max_extra=2)
    for t, g in enumerate(distortion_corpus):
        h = perturbed_copy(g, 3000 + t)
        delta = max(e.length for e in g.edges) / 2
        est = persistence_distortion_estimate(g, h, delta)
        corr = Correspondence(tuple(proportional_net_pairs(g, h, delta)))
        cost = correspondence_cost(g, h, corr)
        lhs = est.estimate - est.delta_hat_a - est.delta_hat_b
        report.add(f"distortion-{t}", lhs <= 18 * cost, f"lhs={lhs} cost={cost}")

    measured_corpus = corpus_graphs(measured_trials, max_vertices=4, max_extra=1)
    for t, g in enumerate(measured_corpus):
        h = perturbed_copy(g, 4000 + t)
        delta = max(e.length for e in g.edges) / 2
        pairs = proportional_net_pairs(g, h, delta)
        unique = sorted({(a.label(), b.label()) for a, b in pairs})
        mass = Fraction(1, len(unique))
        coupling = DiscreteCoupling(
            tuple(
                (GraphPoint.parse(a), GraphPoint.parse(b), mass) for a, b in unique
            )
        )
        cost = coupling_cost_infinity(g, h, coupling)
        left = [(diagram_of(g, GraphPoint.parse(a)), mass) for a, _b in unique]
        right = [(diagram_of(h, GraphPoint.parse(b)), mass) for _a, b in unique]
        est = wasserstein_infinity(left, right)
        # both weighted samples sit within the nets' covering radius of the
        # true pushforwards, so delta is a generous certified slack
        report.add(f"measured-{t}", est - delta <= 18 * cost, f"est={est} cost={cost}")
    return report


def verify_local_isometry(extra_graphs: int = 6) -> SuiteReport:
    report = SuiteReport("local-isometry")
    graphs: list[tuple[str, MetricGraph]] = [
        ("interval", interval(2)),
        ("theta", theta(1, 1, 2)),
        ("dumbbell", dumbbell(2, 1, 2)),
        ("star", star([1, Fraction(3, 2), 2])),
        ("path", path([1, 2])),
    ]
    for i, g in enumerate(corpus_graphs(extra_graphs, max_vertices=5, max_extra=2)):
        if not is_circle(g):
            graphs.append((f"random-{i}", g))
    for name, g in graphs:
        bad = []
        for p in standard_basepoints(g):
            result = local_isometry_probe(g, p)
            if not result.ok:
                bad.append(p.label())
        report.add(name, not bad, ",".join(bad))
    return report


def verify_injectivity() -> SuiteReport:
    report = SuiteReport("injectivity")

    # a topological self-loop forces mirror-image collisions on the loop
    tadpole = MetricGraph(
        ["u", "x"], [("loop", "u", "u", 2), ("tail", "u", "x", 1)]
    )
    rep = sampled_injectivity_check(tadpole, Fraction(1, 4), min_separation=False)
    mirror_pairs = []
    for i, j, _v in rep.collisions:
        a, b = rep.points[i], rep.points[j]
        if not a.is_vertex and not b.is_vertex and a.edge == b.edge == "loop":
            if a.offset + b.offset == 2:
                mirror_pairs.append((a, b))
    report.add(
        "self-loop-collisions",
        bool(rep.collisions) and len(mirror_pairs) > 0,
        f"{len(rep.collisions)} collisions, {len(mirror_pairs)} mirror pairs",
    )

    spec = build_injective_cactus(theta(1, 1, 2))
    thorned = cactus(spec)
    pts = list(spec.points)
    ds = distance_matrix(theta(1, 1, 2), pts)
    delta_s = min(ds[i][j] for i in range(len(pts)) for j in range(i + 1, len(pts)))
    rep = sampled_injectivity_check(thorned, delta_s / 4, min_separation=False)
    report.add("cactus-injective", not rep.collisions, f"{len(rep.points)} samples")

    sample = barcode_transform(circle(2), Fraction(1, 4))
    distinct = {d.key() for d in sample.diagrams}
    report.add("circle-collapse", len(distinct) == 1, f"{len(sample)} samples")
    return report


def verify_cactus(n_random: int = 3) -> SuiteReport:
    report = SuiteReport("cactus")
    bases: list[tuple[str, MetricGraph]] = [
        ("interval", interval(2)),
        ("theta", theta(1, 1, 2)),
        ("triangle", MetricGraph(["a", "b", "c"], [("x", "a", "b", 1), ("y", "b", "c", 1), ("z", "c", "a", 1)])),
    ]
    for i in range(n_random):
        bases.append((f"random-{i}", random_metric_graph(500 + i, 4, 1, ensure_generic=False)))
    for name, base in bases:
        spec = build_injective_cactus(base)
        thorned, corr = cactus_base_correspondence(spec, Fraction(1, 2))
        eps = max(spec.thorn_lengths)
        cost = correspondence_cost(base, thorned, corr)
        pts = list(spec.points)
        ds = distance_matrix(base, pts)
        delta_s = min(ds[i][j] for i in range(len(pts)) for j in range(i + 1, len(pts)))
        rep = sampled_injectivity_check(thorned, delta_s / 4, min_separation=False)
        ok = cost <= 2 * eps and not rep.collisions
        report.add(name, ok, f"cost={cost} 2eps={2*eps} collisions={len(rep.collisions)}")
    return report


def verify_trees(n_trees: int = 4) -> SuiteReport:
    report = SuiteReport("trees")
    rng = random.Random(77)
    for i in range(n_trees):
        tree = random_metric_graph(600 + i, 5 + i % 3, 0, ensure_generic=False)
        pts = sample_basepoints(tree, 2)[:7]
        balls = [(p, as_length(Fraction(rng.randrange(1, 9), 4))) for p in pts[:5]]
        helly = tree_helly_check(tree, balls)
        scales = [Fraction(1, 2), 1, Fraction(3, 2), 2]
        rc = rips_cech_tree_check(tree, pts, scales)
        report.add(f"tree-{i}", helly.holds and rc.ok, f"subsets={rc.subsets_checked}")
    loop = circle(3)
    pts = [loop.canonical_point(GraphPoint.on_edge("loop", off)) for off in (0, 1, 2)]
    violation = rips_cech_cycle_violation(loop, pts, [Fraction(1, 2)])
    report.add("cycle-negative-control", violation is not None, str(violation))
    return report


def verify_counterexample() -> SuiteReport:
    report = SuiteReport("counterexample")
    params = golden_counterexample_params()
    g, h = counterexample_pair(params)
    report.add(
        "codes-differ", canonical_tree_code(g) != canonical_tree_code(h), ""
    )
    coarse = persistence_distortion_estimate(g, h, Fraction(1, 2))
    fine = persistence_distortion_estimate(g, h, Fraction(1, 4))
    slack_coarse = coarse.delta_hat_a + coarse.delta_hat_b
    slack_fine = fine.delta_hat_a + fine.delta_hat_b
    report.add(
        "estimate-within-slack",
        coarse.estimate <= slack_coarse and fine.estimate <= slack_fine,
        f"coarse={coarse.estimate}<={slack_coarse} fine={fine.estimate}<={slack_fine}",
    )
    report.add(
        "estimate-shrinks", fine.estimate <= coarse.estimate, f"{fine.estimate} <= {coarse.estimate}"
    )
    return report


SUITES: dict[str, Callable[[], SuiteReport]] = {
    "oracle": verify_oracle,
    "stability": verify_stability,
    "local-isometry": verify_local_isometry,
    "injectivity": verify_injectivity,
    "cactus": verify_cactus,
    "trees": verify_trees,
    "counterexample": verify_counterexample,
}


def run_suite(name: str) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
