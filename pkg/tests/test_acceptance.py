"""Acceptance criteria, one test per criterion, each printing a pass/fail
line (run with ``pytest -s tests/test_acceptance.py`` to see them).

All tolerances are exact unless a criterion states a certified slack; every
expected value is either a frozen hand-checked constant or recomputed by an
independent oracle inside the test.
"""
import random
import time
from fractions import Fraction as F

import pytest

from graphbt import (
    Correspondence,
    DiscreteCoupling,
    GraphPoint,
    MetricGraph,
    bottleneck,
    canonical_tree_code,
    classify_tip,
    correspondence_cost,
    coupling_cost_infinity,
    diagram_of,
    distance,
    distance_matrix,
    eccentricity,
    estimate_intrinsic_metric,
    is_circle,
    local_isometry_probe,
    persistence_distortion_estimate,
    sampled_injectivity_check,
    barcode_transform,
    wasserstein_infinity,
)
from graphbt.constructions import (
    build_injective_cactus,
    cactus,
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
)
from graphbt.persistence import (
    build_height_field,
    extended_persistence_reduction,
    extended_persistence_sweep,
)
from graphbt.transform import sample_basepoints
from graphbt.verify import perturbed_copy, proportional_net_pairs, standard_basepoints


def _report(num: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {num:02d}] {name}: {status}" + (f"  ({detail})" if detail else ""))


@pytest.fixture(scope="module")
def oracle_corpus():
    graphs = []
    for seed in range(200):
        n_vertices = 3 + seed % 6  # 3..8 vertices
        extra = seed % 6  # up to 12 edges total
        graphs.append(random_metric_graph(2000 + seed, n_vertices, extra, ensure_generic=False))
    return graphs


def test_01_oracle_equivalence(oracle_corpus):
    start = time.monotonic()
    checked = 0
    mismatches = 0
    for g in oracle_corpus:
        for p in standard_basepoints(g):
            field = build_height_field(g, p)
            sweep = extended_persistence_sweep(field)
            oracle = extended_persistence_reduction(field)
            checked += 1
            if sweep.tagged_key() != oracle.tagged_key():
                mismatches += 1
    elapsed = time.monotonic() - start
    ok = mismatches == 0 and elapsed < 60 and len(oracle_corpus) >= 200
    _report(1, "oracle equivalence", ok, f"{checked} diagrams, {elapsed:.1f}s")
    assert mismatches == 0
    assert elapsed < 60


def test_02_quoted_values():
    tri = MetricGraph(
        ["v1", "v2", "v3"],
        [("a", "v1", "v2", 1), ("b", "v2", "v3", 1), ("c", "v3", "v1", 1)],
    )
    d = diagram_of(tri, GraphPoint.at_vertex("v1"))
    ones = d.in_dim(1)
    triangle_ok = len(ones) == 1 and ones[0].birth == F(3, 2)

    g = interval(2)
    interval_ok = True
    for p in sample_basepoints(g, F(1, 4)):
        x = F(0) if (p.is_vertex and p.vertex == "a") else (F(2) if p.is_vertex else p.offset)
        expected_birth = min(x, 2 - x)
        ones = diagram_of(g, p).in_dim(1)
        if x in (0, 2):
            if ones:
                interval_ok = False
        elif len(ones) != 1 or (ones[0].birth, ones[0].death) != (expected_birth, 0):
            interval_ok = False

    sample = barcode_transform(circle(2), F(1, 4))
    circle_ok = len({d.key() for d in sample.diagrams}) == 1

    ok = triangle_ok and interval_ok and circle_ok
    _report(2, "quoted values", ok, "triangle 3/2, interval leaf-births, circle collapse")
    assert triangle_ok and interval_ok and circle_ok


def test_03_stability_inequalities():
    rng = random.Random(31415)
    violations = 0
    trials = 0

    # diagram map is 1-Lipschitz: bottleneck <= graph distance
    lipschitz_graphs = [
        random_metric_graph(3100 + s, 3 + s % 5, s % 4, ensure_generic=False) for s in range(15)
    ]
    for g in lipschitz_graphs:
        points = sample_basepoints(g, F(1, 2))
        cache = {p: diagram_of(g, p) for p in points}
        for _ in range(57):
            p, q = rng.choice(points), rng.choice(points)
            trials += 1
            if bottleneck(cache[p], cache[q]) > distance(g, p, q):
                violations += 1

    # sampled distortion vs 18 * correspondence cost on perturbed pairs
    for s in range(100):
        g = random_metric_graph(3200 + s, 3 + s % 3, s % 3, ensure_generic=False)
        h = perturbed_copy(g, 3300 + s)
        delta = max(e.length for e in g.edges) / 2
        est = persistence_distortion_estimate(g, h, delta)
        corr = Correspondence(tuple(proportional_net_pairs(g, h, delta)))
        cost = correspondence_cost(g, h, corr)
        trials += 1
        if est.estimate - est.delta_hat_a - est.delta_hat_b > 18 * cost:
            violations += 1

    # measured analogue vs 18 * coupling cost
    for s in range(50):
        g = random_metric_graph(3400 + s, 3 + s % 2, s % 2, ensure_generic=False)
        h = perturbed_copy(g, 3500 + s)
        delta = max(e.length for e in g.edges) / 2
        pairs = sorted({(a.label(), b.label()) for a, b in proportional_net_pairs(g, h, delta)})
        mass = F(1, len(pairs))
        coupling = DiscreteCoupling(
            tuple((GraphPoint.parse(a), GraphPoint.parse(b), mass) for a, b in pairs)
        )
        cost = coupling_cost_infinity(g, h, coupling)
        left = [(diagram_of(g, GraphPoint.parse(a)), mass) for a, _ in pairs]
        right = [(diagram_of(h, GraphPoint.parse(b)), mass) for _, b in pairs]
        est = wasserstein_infinity(left, right)
        trials += 1
        if est - delta > 18 * cost:
            violations += 1

    ok = violations == 0 and trials >= 1000
    _report(3, "stability inequalities", ok, f"{trials} trials, {violations} violations")
    assert trials >= 1000
    assert violations == 0


def test_04_local_isometry():
    corpus: list[MetricGraph] = [
        interval(2),
        theta(1, 1, 2),
        dumbbell(2, 1, 2),
        star([1, F(3, 2), 2]),
        path([1, 2]),
    ]
    corpus += [
        g
        for g in (
            random_metric_graph(4000 + s, 3 + s % 5, s % 3, ensure_generic=False)
            for s in range(20)
        )
        if not is_circle(g)
    ]
    failures = []
    probes = 0
    for g in corpus:
        for p in standard_basepoints(g):
            probes += 1
            result = local_isometry_probe(g, p)
            if not result.ok:
                failures.append((g, p))
    ok = not failures
    _report(4, "local isometry", ok, f"{probes} probes on {len(corpus)} graphs")
    assert not failures


def test_05_structural_counts(oracle_corpus):
    checked = 0
    for g in oracle_corpus:
        beta1 = g.beta1()
        branch_dists_cache = {}
        for p in standard_basepoints(g):
            d = diagram_of(g, p)
            checked += 1
            ext = [q for q in d.in_dim(1) if q.subtype.startswith("extended")]
            assert len(ext) == beta1
            valence = g.valence(p.vertex) if p.is_vertex else 2
            death_zero = [q for q in d.in_dim(1) if q.death == 0]
            assert len(death_zero) == valence - 1
            zero = d.in_dim(0)
            assert len(zero) == 1 and zero[0].birth == 0
            assert zero[0].death == eccentricity(g, p)
            key = p.label()
            branch_dists_cache[key] = {
                distance(g, p, GraphPoint.at_vertex(v))
                for v in g.vertices
                if g.valence(v) >= 3
            }
            for q in d.in_dim(1):
                if q.death > 0:
                    assert q.death in branch_dists_cache[key]
    _report(5, "structural counts", True, f"{checked} diagrams")


def test_06_cactus_injectivity():
    bases = [
        interval(2),
        theta(1, 1, 2),
        MetricGraph(["a", "b", "c"], [("x", "a", "b", 1), ("y", "b", "c", 1), ("z", "c", "a", 1)]),
        star([1, F(3, 2), 2]),
    ]
    bases += [
        random_metric_graph(6000 + s, 3 + s % 2, s % 2, ensure_generic=False) for s in range(16)
    ]
    assert len(bases) == 20
    failures = 0
    for base in bases:
        spec = build_injective_cactus(base)
        thorned = cactus(spec)
        pts = list(spec.points)
        ds = distance_matrix(base, pts)
        n = len(pts)
        delta_s = min(ds[i][j] for i in range(n) for j in range(i + 1, n))
        report = sampled_injectivity_check(thorned, delta_s / 4, min_separation=False)
        if report.collisions:
            failures += 1
    ok = failures == 0
    _report(6, "cactus injectivity", ok, f"20 constructions, {failures} failures")
    assert failures == 0


def test_07_counterexample_reproduction():
    params = golden_counterexample_params()
    g, h = counterexample_pair(params)
    codes_differ = canonical_tree_code(g) != canonical_tree_code(h)
    coarse = persistence_distortion_estimate(g, h, F(1, 2))
    fine = persistence_distortion_estimate(g, h, F(1, 4))
    slack_coarse = coarse.delta_hat_a + coarse.delta_hat_b
    slack_fine = fine.delta_hat_a + fine.delta_hat_b
    within = coarse.estimate <= slack_coarse and fine.estimate <= slack_fine
    shrinking = fine.estimate <= coarse.estimate
    ok = codes_differ and within and shrinking
    _report(
        7,
        "counterexample reproduction",
        ok,
        f"estimates {coarse.estimate} -> {fine.estimate}, slacks {slack_coarse} -> {slack_fine}",
    )
    assert codes_differ
    assert within
    assert shrinking


def test_08_reconstruction():
    def double_star(bar, legs1, legs2):
        vs = ["h1", "h2"]
        es = [("bar", "h1", "h2", bar)]
        for i, l in enumerate(legs1):
            vs.append(f"a{i}")
            es.append((f"la{i}", "h1", f"a{i}", l))
        for i, l in enumerate(legs2):
            vs.append(f"b{i}")
            es.append((f"lb{i}", "h2", f"b{i}", l))
        return MetricGraph(vs, es)

    tri2 = MetricGraph(
        ["x", "y", "z", "p", "q"],
        [
            ("a", "x", "y", 1),
            ("b", "y", "z", F(5, 4)),
            ("c", "z", "x", F(3, 2)),
            ("lp", "x", "p", F(1, 2)),
            ("lq", "y", "q", F(7, 8)),
        ],
    )
    theta_leg = MetricGraph(
        ["u", "v", "t"],
        [
            ("e1", "u", "v", 1),
            ("e2", "u", "v", F(5, 4)),
            ("e3", "u", "v", 2),
            ("leg", "u", "t", F(1, 2)),
        ],
    )
    y_tail = MetricGraph(
        ["c", "a", "b", "d", "e"],
        [
            ("1", "c", "a", F(1, 2)),
            ("2", "c", "b", 1),
            ("3", "c", "d", F(3, 2)),
            ("4", "d", "e", F(3, 4)),
        ],
    )
    caterpillar = MetricGraph(
        ["s0", "s1", "s2", "s3", "l1", "l2"],
        [
            ("e0", "s0", "s1", 1),
            ("e1", "s1", "s2", 1),
            ("e2", "s2", "s3", F(3, 2)),
            ("g1", "s1", "l1", F(1, 2)),
            ("g2", "s2", "l2", F(5, 4)),
        ],
    )
    cases = [
        (star([1, F(3, 2), 2]), F(1, 8)),
        (star([1, 2, 3]), F(1, 4)),
        (star([F(1, 2), 1, F(3, 2)]), F(1, 8)),
        (star([F(3, 4), F(5, 4), F(7, 4), F(9, 4)]), F(1, 8)),
        (star([1, F(7, 4), F(5, 2), F(13, 4), 4]), F(1, 4)),
        (star([1, F(3, 2), 2, F(5, 2)]), F(1, 8)),
        (y_tail, F(1, 8)),
        (tri2, F(1, 16)),
        (theta_leg, F(1, 16)),
        (caterpillar, F(1, 16)),
    ]
    assert len(cases) == 10
    worst_cases = []
    for g, delta in cases:
        report = sampled_injectivity_check(g, delta, min_separation=False)
        assert not report.collisions, "reconstruction corpus graph must be injective-verified"
        sample = barcode_transform(g, delta)
        matrix = estimate_intrinsic_metric(sample)
        true = distance_matrix(g, list(sample.points))
        n = len(sample.points)
        worst = max(abs(matrix[i][j] - true[i][j]) for i in range(n) for j in range(n))
        worst_cases.append((worst, 4 * sample.delta_hat))
    ok = all(w <= bound for w, bound in worst_cases)
    _report(8, "reconstruction", ok, f"10 graphs, worst errors within 4*delta_hat: {ok}")
    for w, bound in worst_cases:
        assert w <= bound


def test_09_rips_cech_trees():
    failures = 0
    subsets = 0
    for s in range(50):
        tree = random_metric_graph(9000 + s, 4 + s % 4, 0, ensure_generic=False)
        pts = sample_basepoints(tree, 2)[:10]
        scales = [F(1, 2), 1, F(3, 2), 2, 3]
        report = rips_cech_tree_check(tree, pts, scales)
        subsets += report.subsets_checked
        if not report.ok:
            failures += 1
    loop = circle(3)
    pts = [loop.canonical_point(GraphPoint.on_edge("loop", o)) for o in (0, 1, 2)]
    violation = rips_cech_cycle_violation(loop, pts, [F(1, 2)])
    ok = failures == 0 and violation is not None
    _report(9, "rips/cech on trees", ok, f"50 trees, {subsets} subsets, negative control found")
    assert failures == 0
    assert violation is not None


def test_10_self_loop_discrimination():
    errors = 0
    cases = 0
    # ten genuine leaves of assorted trees
    leaf_cases = [
        (interval(F(k + 2, 2)), GraphPoint.at_vertex("a")) for k in range(4)
    ]
    leaf_cases += [
        (star([1, F(3, 2), F(k + 4, 2)]), GraphPoint.at_vertex("t0")) for k in range(3)
    ]
    leaf_cases += [
        (path([1, F(k + 3, 3)]), GraphPoint.at_vertex("p0")) for k in range(3)
    ]
    for g, p in leaf_cases:
        cases += 1
        if classify_tip(diagram_of(g, p)).kind != "genuine-leaf":
            errors += 1
    # ten self-loop antipodes on loops hanging from tails
    for k in range(10):
        loop_len = F(k + 2, 2)
        g = MetricGraph(
            ["u", "x"],
            [("loop", "u", "u", loop_len), ("tail", "u", "x", F(k + 3, 2))],
        )
        antipode = GraphPoint.on_edge("loop", loop_len / 2)
        cases += 1
        tip = classify_tip(diagram_of(g, antipode))
        if tip.kind != "self-loop-antipode" or tip.half_circumference != loop_len / 2:
            errors += 1
    ok = errors == 0 and cases == 20
    _report(10, "self-loop discrimination", ok, f"{cases} instances, {errors} errors")
    assert cases == 20
    assert errors == 0
