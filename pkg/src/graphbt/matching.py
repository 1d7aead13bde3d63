"""Bottleneck and Wasserstein-type metrics on persistence diagrams.

All values are exact: the bottleneck distance is found by binary search over
the finite set of candidate costs with bipartite-matching feasibility checks,
and the infinity-Wasserstein distance over weighted diagram sets by the same
search with exact max-flow feasibility.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graphs import GraphError
from .persistence import Diagram, DiagramPoint

__all__ = [
    "point_cost",
    "diagonal_cost",
    "Matching",
    "bottleneck",
    "bottleneck_matching",
    "hausdorff_sets",
    "wasserstein_infinity",
]


def diagonal_cost(a: DiagramPoint) -> Fraction:
    """L-infinity distance from a point to the diagonal (|death - birth| / 2).

    The formula is symmetric about the diagonal, so it applies to
    below-diagonal points unchanged."""
    return abs(a.death - a.birth) / 2


def point_cost(a: DiagramPoint, b: DiagramPoint | None = None) -> Fraction:
    """L-infinity pairing cost; ``b=None`` means the diagonal."""
    if b is None:
        return diagonal_cost(a)
    if a.dim != b.dim:
        raise GraphError(f"cannot pair dimensions {a.dim} and {b.dim}")
    return max(abs(a.birth - b.birth), abs(a.death - b.death))


@dataclass(frozen=True)
class Matching:
    """A partial matching between two diagrams: index pairs plus the indices
    sent to the diagonal on each side.  Indices refer to Diagram.points."""

    pairs: tuple[tuple[int, int], ...]
    diagonal_left: tuple[int, ...]
    diagonal_right: tuple[int, ...]


def _max_bipartite_matching(n_left: int, n_right: int, adj: list[list[int]]):
    """Hopcroft-Karp; returns (size, match_left) with -1 for unmatched."""
    INF = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    size = 0

    while True:
        dist = [INF] * n_left
        queue = [u for u in range(n_left) if match_l[u] == -1]
        for u in queue:
            dist[u] = 0
        found_free = False
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for v in adj[u]:
                w = match_r[v]
                if w == -1:
                    found_free = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found_free:
            return size, match_l

        def try_augment(u: int) -> bool:
            for v in adj[u]:
                w = match_r[v]
                if w == -1 or (dist[w] == dist[u] + 1 and try_augment(w)):
                    match_l[u] = v
                    match_r[v] = u
                    return True
            dist[u] = INF
            return False

        for u in range(n_left):
            if match_l[u] == -1 and try_augment(u):
                size += 1


def _dim_bottleneck(P: Sequence[DiagramPoint], Q: Sequence[DiagramPoint], want_matching: bool):
    n, m = len(P), len(Q)
    if n == 0 and m == 0:
        return Fraction(0), ([], list(range(n)), list(range(m)))
    cost = [[point_cost(p, q) for q in Q] for p in P]
    diag_p = [diagonal_cost(p) for p in P]
    diag_q = [diagonal_cost(q) for q in Q]
    candidates = sorted(set([Fraction(0)] + [c for row in cost for c in row] + diag_p + diag_q))

    # Left side: P points then diagonal proxies of Q points.
    # Right side: Q points then diagonal proxies of P points.
    def adjacency(t: Fraction) -> list[list[int]]:
        adj: list[list[int]] = []
        for i in range(n):
            row = [j for j in range(m) if cost[i][j] <= t]
            if diag_p[i] <= t:
                row.append(m + i)
            adj.append(row)
        diag_block = list(range(m, m + n))
        for j in range(m):
            row = list(diag_block)
            if diag_q[j] <= t:
                row.append(j)
            adj.append(row)
        return adj

    def feasible(t: Fraction):
        size, match_l = _max_bipartite_matching(n + m, m + n, adjacency(t))
        return size == n + m, match_l

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        ok, _ = feasible(candidates[mid])
        if ok:
            hi = mid
        else:
            lo = mid + 1
    value = candidates[lo]
    if not want_matching:
        return value, None
    ok, match_l = feasible(value)
    if not ok:  # pragma: no cover - the max candidate is always feasible
        raise GraphError("no feasible matching at the maximal candidate cost")
    pairs = []
    diagonal_left = []
    diagonal_right = []
    for i in range(n):
        v = match_l[i]
        if v < m:
            pairs.append((i, v))
        else:
            diagonal_left.append(i)
    matched_q = {v for _, v in pairs}
    diagonal_right = [j for j in range(m) if j not in matched_q]
    return value, (pairs, diagonal_left, diagonal_right)


def _split_indices(d: Diagram) -> dict[int, list[int]]:
    by_dim: dict[int, list[int]] = {}
    for idx, p in enumerate(d.points):
        by_dim.setdefault(p.dim, []).append(idx)
    return by_dim


def bottleneck(d1: Diagram, d2: Diagram) -> Fraction:
    """Exact bottleneck distance.  Dimensions are matched independently and
    the maximum over dimensions is returned; unmatched points pay their
    L-infinity distance to the diagonal."""
    if d1.key() == d2.key():
        return Fraction(0)
    value = Fraction(0)
    dims = set(p.dim for p in d1.points) | set(p.dim for p in d2.points)
    for dim in sorted(dims):
        v, _ = _dim_bottleneck(d1.in_dim(dim), d2.in_dim(dim), want_matching=False)
        if v > value:
            value = v
    return value


def bottleneck_matching(d1: Diagram, d2: Diagram) -> tuple[Fraction, Matching]:
    """Bottleneck distance together with an optimal matching realizing it."""
    value = Fraction(0)
    idx1 = _split_indices(d1)
    idx2 = _split_indices(d2)
    pairs: list[tuple[int, int]] = []
    diag_l: list[int] = []
    diag_r: list[int] = []
    for dim in sorted(set(idx1) | set(idx2)):
        ids1 = idx1.get(dim, [])
        ids2 = idx2.get(dim, [])
        P = [d1.points[i] for i in ids1]
        Q = [d2.points[j] for j in ids2]
        v, result = _dim_bottleneck(P, Q, want_matching=True)
        if v > value:
            value = v
        sub_pairs, sub_dl, sub_dr = result
        pairs.extend((ids1[i], ids2[j]) for i, j in sub_pairs)
        diag_l.extend(ids1[i] for i in sub_dl)
        diag_r.extend(ids2[j] for j in sub_dr)
    return value, Matching(tuple(pairs), tuple(diag_l), tuple(diag_r))


def hausdorff_sets(set1: Sequence[Diagram], set2: Sequence[Diagram]) -> Fraction:
    """Hausdorff distance between two finite sets of diagrams under the
    bottleneck metric."""
    if not set1 or not set2:
        raise GraphError("hausdorff_sets requires nonempty diagram sets")
    matrix = [[bottleneck(a, b) for b in set2] for a in set1]
    forward = max(min(row) for row in matrix)
    backward = max(min(matrix[i][j] for i in range(len(set1))) for j in range(len(set2)))
    return max(forward, backward)


def _check_weights(weighted, side: str) -> None:
    total = Fraction(0)
    for _d, w in weighted:
        if w < 0:
            raise GraphError(f"{side} has a negative weight")
        total += w
    if total != 1:
        raise GraphError(f"{side} weights sum to {total}, expected 1")


def _merge_duplicates(weighted):
    merged: dict[tuple, tuple[Diagram, Fraction]] = {}
    for d, w in weighted:
        key = d.key()
        if key in merged:
            merged[key] = (merged[key][0], merged[key][1] + w)
        else:
            merged[key] = (d, Fraction(w))
    return [v for v in merged.values() if v[1] > 0]


def _flow_feasible(supply: list[Fraction], demand: list[Fraction], allowed: list[list[bool]]) -> bool:
    """Exact transportation feasibility via Edmonds-Karp max flow."""
    n, m = len(supply), len(demand)
    source, sink = 0, n + m + 1
    cap: dict[tuple[int, int], Fraction] = {}
    for i in range(n):
        cap[(source, 1 + i)] = supply[i]
    for j in range(m):
        cap[(1 + n + j, sink)] = demand[j]
    big = Fraction(2)
    for i in range(n):
        for j in range(m):
            if allowed[i][j]:
                cap[(1 + i, 1 + n + j)] = big
    residual: dict[tuple[int, int], Fraction] = dict(cap)
    for (u, v) in list(cap):
        residual.setdefault((v, u), Fraction(0))
    adj: dict[int, list[int]] = {}
    for (u, v) in residual:
        adj.setdefault(u, []).append(v)

    flow = Fraction(0)
    while True:
        parent = {source: source}
        queue = [source]
        qi = 0
        while qi < len(queue) and sink not in parent:
            u = queue[qi]
            qi += 1
            for v in adj.get(u, []):
                if v not in parent and residual[(u, v)] > 0:
                    parent[v] = u
                    queue.append(v)
        if sink not in parent:
            break
        bottleneck_cap = None
        v = sink
        while v != source:
            u = parent[v]
            r = residual[(u, v)]
            bottleneck_cap = r if bottleneck_cap is None else min(bottleneck_cap, r)
            v = u
        v = sink
        while v != source:
            u = parent[v]
            residual[(u, v)] -= bottleneck_cap
            residual[(v, u)] += bottleneck_cap
            v = u
        flow += bottleneck_cap
    return flow == 1


def wasserstein_infinity(weighted1, weighted2) -> Fraction:
    """Infinity-Wasserstein distance between weighted diagram sets.

    Inputs are sequences of (Diagram, weight) with nonnegative weights summing
    to one on each side.  Returns the smallest threshold t admitting a
    coupling supported on diagram pairs at bottleneck distance <= t.
    """
    _check_weights(weighted1, "left set")
    _check_weights(weighted2, "right set")
    left = _merge_duplicates(weighted1)
    right = _merge_duplicates(weighted2)
    matrix = [[bottleneck(a, b) for b, _ in right] for a, _ in left]
    candidates = sorted(set(c for row in matrix for c in row))
    supply = [w for _, w in left]
    demand = [w for _, w in right]

    def feasible(t: Fraction) -> bool:
        allowed = [[matrix[i][j] <= t for j in range(len(right))] for i in range(len(left))]
        return _flow_feasible(supply, demand, allowed)

    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    if not feasible(candidates[lo]):  # pragma: no cover - full matrix is feasible
        raise GraphError("no feasible coupling at the maximal candidate cost")
    return candidates[lo]
