import itertools
import random
from fractions import Fraction as F

import pytest

from graphbt import (
    Diagram,
    DiagramPoint,
    GraphError,
    bottleneck,
    bottleneck_matching,
    diagonal_cost,
    hausdorff_sets,
    point_cost,
    wasserstein_infinity,
)


def dgm(*points):
    return Diagram([DiagramPoint(dim, F(b), F(d)) for dim, b, d in points])


def brute_bottleneck(d1: Diagram, d2: Diagram) -> F:
    """Independent oracle: enumerate every partial matching."""

    def dim_value(P, Q):
        best = None
        n, m = len(P), len(Q)
        for k in range(min(n, m) + 1):
            for ps in itertools.combinations(range(n), k):
                for qs in itertools.permutations(range(m), k):
                    cost = F(0)
                    for i, j in zip(ps, qs):
                        cost = max(cost, point_cost(P[i], Q[j]))
                    for i in range(n):
                        if i not in ps:
                            cost = max(cost, diagonal_cost(P[i]))
                    matched_q = set(qs)
                    for j in range(m):
                        if j not in matched_q:
                            cost = max(cost, diagonal_cost(Q[j]))
                    if best is None or cost < best:
                        best = cost
        return best if best is not None else F(0)

    dims = {p.dim for p in d1.points} | {p.dim for p in d2.points}
    return max((dim_value(d1.in_dim(k), d2.in_dim(k)) for k in sorted(dims)), default=F(0))


def random_diagram(rng, max_points=4):
    points = []
    for _ in range(rng.randrange(max_points + 1)):
        dim = rng.randrange(2)
        b = F(rng.randrange(0, 9), 4)
        d = F(rng.randrange(0, 9), 4)
        points.append(DiagramPoint(dim, b, d))
    return Diagram(points)


class TestPointCost:
    def test_diagonal(self):
        assert point_cost(DiagramPoint(0, F(0), F(2))) == 1

    def test_linf(self):
        assert point_cost(DiagramPoint(1, F(1), F(0)), DiagramPoint(1, F(6, 5), F(0))) == F(1, 5)

    def test_self(self):
        p = DiagramPoint(1, F(3), F(1))
        assert point_cost(p, p) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(GraphError):
            point_cost(DiagramPoint(0, F(0), F(1)), DiagramPoint(1, F(0), F(1)))

    def test_below_diagonal_cost(self):
        assert diagonal_cost(DiagramPoint(1, F(2), F(0))) == 1


class TestBottleneck:
    def test_identical(self):
        d = dgm((0, 0, 2), (1, 2, 1))
        assert bottleneck(d, d) == 0

    def test_forced_diagonal(self):
        assert bottleneck(dgm((0, 0, 2)), Diagram([])) == 1

    def test_spec_example(self):
        d1 = dgm((1, 0, 1), (1, 1, 0))
        d2 = dgm((1, 0, 2), (1, 2, 0))
        assert bottleneck(d1, d2) == 1
        assert brute_bottleneck(d1, d2) == 1

    def test_dimensions_matched_independently(self):
        d1 = dgm((0, 0, 2))
        d2 = dgm((1, 0, 2))
        # both points must go to the diagonal despite equal coordinates
        assert bottleneck(d1, d2) == 1

    def test_against_brute_force(self):
        rng = random.Random(12)
        for _ in range(60):
            d1, d2 = random_diagram(rng), random_diagram(rng)
            assert bottleneck(d1, d2) == brute_bottleneck(d1, d2)

    def test_pseudometric_properties(self):
        rng = random.Random(13)
        for _ in range(25):
            a, b, c = (random_diagram(rng) for _ in range(3))
            assert bottleneck(a, b) == bottleneck(b, a)
            assert bottleneck(a, c) <= bottleneck(a, b) + bottleneck(b, c)
            assert bottleneck(a, a) == 0

    def test_positive_between_distinct_off_diagonal_diagrams(self):
        rng = random.Random(14)
        count = 0
        while count < 20:
            a, b = random_diagram(rng), random_diagram(rng)
            if a.key() == b.key():
                continue
            if any(p.birth == p.death for p in list(a.points) + list(b.points)):
                continue
            count += 1
            assert bottleneck(a, b) > 0

    def test_matching_is_consistent(self):
        rng = random.Random(15)
        for _ in range(20):
            d1, d2 = random_diagram(rng), random_diagram(rng)
            value, matching = bottleneck_matching(d1, d2)
            realized = F(0)
            for i, j in matching.pairs:
                realized = max(realized, point_cost(d1.points[i], d2.points[j]))
            for i in matching.diagonal_left:
                realized = max(realized, diagonal_cost(d1.points[i]))
            for j in matching.diagonal_right:
                realized = max(realized, diagonal_cost(d2.points[j]))
            assert realized == value
            used_l = [i for i, _ in matching.pairs] + list(matching.diagonal_left)
            used_r = [j for _, j in matching.pairs] + list(matching.diagonal_right)
            assert sorted(used_l) == list(range(len(d1.points)))
            assert sorted(used_r) == list(range(len(d2.points)))


class TestHausdorff:
    def test_self(self):
        s = [dgm((0, 0, 1)), dgm((1, 2, 0))]
        assert hausdorff_sets(s, s) == 0

    def test_singletons(self):
        d1, d2 = dgm((0, 0, 1)), dgm((0, 0, 2))
        assert hausdorff_sets([d1], [d2]) == bottleneck(d1, d2)

    def test_directed_sup(self):
        d1, d2 = dgm((0, 0, 1)), dgm((0, 0, 3))
        assert hausdorff_sets([d1, d2], [d1]) == bottleneck(d2, d1)

    def test_empty_rejected(self):
        with pytest.raises(GraphError):
            hausdorff_sets([], [dgm((0, 0, 1))])

    def test_symmetry(self):
        rng = random.Random(16)
        s1 = [random_diagram(rng) for _ in range(3)]
        s2 = [random_diagram(rng) for _ in range(4)]
        assert hausdorff_sets(s1, s2) == hausdorff_sets(s2, s1)


def gale_feasible(supply, demand, allowed):
    """Independent transportation feasibility via Gale's condition."""
    n = len(supply)
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            reachable = [
                j for j in range(len(demand)) if any(allowed[i][j] for i in subset)
            ]
            if sum(supply[i] for i in subset) > sum(demand[j] for j in reachable):
                return False
    return True


class TestWassersteinInfinity:
    def test_identical(self):
        sets = [(dgm((0, 0, 1)), F(1, 2)), (dgm((1, 2, 0)), F(1, 2))]
        assert wasserstein_infinity(sets, sets) == 0

    def test_point_masses(self):
        d1, d2 = dgm((0, 0, 1)), dgm((0, 0, 3))
        assert wasserstein_infinity([(d1, F(1))], [(d2, F(1))]) == bottleneck(d1, d2)

    def test_identity_coupling_at_zero(self):
        a, b = dgm((0, 0, 1)), dgm((0, 0, 3))
        sets = [(a, F(1, 2)), (b, F(1, 2))]
        assert wasserstein_infinity(sets, list(sets)) == 0

    def test_weight_validation(self):
        with pytest.raises(GraphError):
            wasserstein_infinity([(dgm((0, 0, 1)), F(1, 2))], [(dgm((0, 0, 1)), F(1))])
        with pytest.raises(GraphError):
            wasserstein_infinity(
                [(dgm((0, 0, 1)), F(-1)), (dgm((0, 0, 2)), F(2))],
                [(dgm((0, 0, 1)), F(1))],
            )

    def test_against_gale_condition(self):
        rng = random.Random(17)
        for _ in range(20):
            left = [(random_diagram(rng, 3), w) for w in (F(1, 2), F(1, 4), F(1, 4))]
            right = [(random_diagram(rng, 3), w) for w in (F(1, 3), F(1, 3), F(1, 3))]
            value = wasserstein_infinity(left, right)
            matrix = [[bottleneck(a, b) for b, _ in right] for a, _ in left]
            supply = [w for _, w in left]
            demand = [w for _, w in right]
            allowed_at = lambda t: [[matrix[i][j] <= t for j in range(3)] for i in range(3)]
            assert gale_feasible(supply, demand, allowed_at(value))
            smaller = sorted({c for row in matrix for c in row if c < value})
            if smaller:
                assert not gale_feasible(supply, demand, allowed_at(smaller[-1]))

    def test_symmetry(self):
        rng = random.Random(18)
        left = [(random_diagram(rng, 3), F(1, 2)), (random_diagram(rng, 3), F(1, 2))]
        right = [(random_diagram(rng, 3), F(1, 4)), (random_diagram(rng, 3), F(3, 4))]
        assert wasserstein_infinity(left, right) == wasserstein_infinity(right, left)
