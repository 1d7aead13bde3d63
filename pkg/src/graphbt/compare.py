"""Correspondence and coupling costs for comparing two metric graphs.

These are the additive-distortion costs whose infima define
Gromov-Hausdorff-style distances; computed over finite point sets they give
exact upper-bound certificates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .graphs import GraphError, GraphPoint, MetricGraph, as_length, distance_matrix

__all__ = [
    "Correspondence",
    "identity_correspondence",
    "correspondence_cost",
    "DiscreteCoupling",
    "coupling_marginals",
    "coupling_cost_infinity",
]


@dataclass(frozen=True)
class Correspondence:
    """Pairs (point in A, point in B); projections should cover the sampled
    point sets the correspondence is defined over."""

    pairs: tuple[tuple[GraphPoint, GraphPoint], ...]

    def __len__(self) -> int:
        return len(self.pairs)


def identity_correspondence(points: Iterable[GraphPoint]) -> Correspondence:
    return Correspondence(tuple((p, p) for p in points))


def correspondence_cost(graph_a: MetricGraph, graph_b: MetricGraph, corr: Correspondence) -> Fraction:
    """sup over pairs of pairs of |d_A(x, x') - d_B(y, y')|.

    When the correspondence covers both graphs densely this is an upper-bound
    certificate for their Gromov-Hausdorff-style distance.
    """
    if not corr.pairs:
        raise GraphError("correspondence must be nonempty")
    left = [graph_a.canonical_point(x) for x, _ in corr.pairs]
    right = [graph_b.canonical_point(y) for _, y in corr.pairs]
    da = distance_matrix(graph_a, left)
    db = distance_matrix(graph_b, right)
    worst = Fraction(0)
    n = len(corr.pairs)
    for i in range(n):
        for j in range(i + 1, n):
            gap = abs(da[i][j] - db[i][j])
            if gap > worst:
                worst = gap
    return worst


@dataclass(frozen=True)
class DiscreteCoupling:
    """Triples (point in A, point in B, mass >= 0) with total mass one."""

    entries: tuple[tuple[GraphPoint, GraphPoint, Fraction], ...]

    def support(self) -> list[tuple[GraphPoint, GraphPoint]]:
        return [(x, y) for x, y, w in self.entries if w > 0]


def coupling_marginals(
    coupling: DiscreteCoupling, graph_a: MetricGraph, graph_b: MetricGraph
) -> tuple[dict[GraphPoint, Fraction], dict[GraphPoint, Fraction]]:
    mu_a: dict[GraphPoint, Fraction] = {}
    mu_b: dict[GraphPoint, Fraction] = {}
    for x, y, w in coupling.entries:
        w = as_length(w)
        if w < 0:
            raise GraphError("coupling masses must be nonnegative")
        cx = graph_a.canonical_point(x)
        cy = graph_b.canonical_point(y)
        mu_a[cx] = mu_a.get(cx, Fraction(0)) + w
        mu_b[cy] = mu_b.get(cy, Fraction(0)) + w
    return mu_a, mu_b


def coupling_cost_infinity(
    graph_a: MetricGraph,
    graph_b: MetricGraph,
    coupling: DiscreteCoupling,
    marginal_a: Mapping[GraphPoint, Fraction] | None = None,
    marginal_b: Mapping[GraphPoint, Fraction] | None = None,
) -> Fraction:
    """Half the sup over support pairs of |d_A(x, x') - d_B(y, y')|.

    Masses must be nonnegative and sum to one; when target marginals are
    supplied they are checked exactly.
    """
    mu_a, mu_b = coupling_marginals(coupling, graph_a, graph_b)
    total = sum(mu_a.values(), Fraction(0))
    if total != 1:
        raise GraphError(f"coupling mass is {total}, expected 1")
    for given, computed, side in (
        (marginal_a, mu_a, "first"),
        (marginal_b, mu_b, "second"),
    ):
        if given is not None:
            want = {
                (graph_a if side == "first" else graph_b).canonical_point(k): as_length(v)
                for k, v in given.items()
                if as_length(v) != 0
            }
            if want != computed:
                raise GraphError(f"coupling does not match the {side} marginal")
    support = coupling.support()
    if not support:
        raise GraphError("coupling has empty support")
    left = [graph_a.canonical_point(x) for x, _ in support]
    right = [graph_b.canonical_point(y) for _, y in support]
    da = distance_matrix(graph_a, left)
    db = distance_matrix(graph_b, right)
    worst = Fraction(0)
    for i in range(len(support)):
        for j in range(i + 1, len(support)):
            gap = abs(da[i][j] - db[i][j])
            if gap > worst:
                worst = gap
    return worst / 2
