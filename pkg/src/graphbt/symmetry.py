"""Symmetry utilities: canonical codes for metric trees, automorphism
counting, and integer-relation search over edge lengths."""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

from .graphs import (
    GraphError,
    GraphPoint,
    MetricGraph,
    as_length,
    _vertex_distances,
    point_along_geodesic,
    subdivide_at,
    suppress_valence_two,
    validate,
)

__all__ = [
    "SearchSpaceExceeded",
    "canonical_tree_code",
    "automorphism_count",
    "has_small_integer_relation",
]


class SearchSpaceExceeded(GraphError):
    """An exhaustive search would exceed its configured size guard."""


# -- canonical codes for metric trees ----------------------------------------


def _format_length(length: Fraction) -> str:
    return f"{length.numerator}/{length.denominator}"


def canonical_tree_code(graph: MetricGraph) -> str:
    """Complete isometry invariant of a metric tree.

    Valence-2 vertices are smoothed away, the tree is rooted at its metric
    center (the midpoint of a diameter path, which is unique), and subtrees
    are encoded as sorted (edge length, child code) lists.  Two trees yield
    equal codes iff they are isometric.
    """
    validate(graph).raise_on_error()
    if graph.beta1() != 0:
        raise GraphError("graph has a cycle; canonical tree codes need a tree")
    if len(graph.vertices) == 1:
        return "()"
    smoothed, _members = suppress_valence_two(graph)

    dist0 = _vertex_distances(smoothed, min(smoothed.vertices))
    far = max(dist0.values())
    x = min(v for v in smoothed.vertices if dist0[v] == far)
    dist_x = _vertex_distances(smoothed, x)
    diameter = max(dist_x.values())
    y = min(v for v in smoothed.vertices if dist_x[v] == diameter)
    center = point_along_geodesic(
        smoothed, GraphPoint.at_vertex(x), GraphPoint.at_vertex(y), diameter / 2
    )
    rooted, sm = subdivide_at(smoothed, [center])
    root = sm.to_new(center).vertex

    def encode(v: str, incoming_edge: str | None) -> str:
        items = []
        for eid, _end in rooted.germs(v):
            if eid == incoming_edge:
                continue
            e = rooted.edge(eid)
            child = e.other(v)
            items.append(f"{_format_length(e.length)}:{encode(child, eid)}")
        items.sort()
        return "(" + ",".join(items) + ")"

    return encode(root, None)


# -- automorphisms ------------------------------------------------------------


def _suppressed_size(graph: MetricGraph) -> int:
    essential = sum(1 for v in graph.vertices if graph.valence(v) != 2)
    return max(1, essential)


def automorphism_count(graph: MetricGraph, max_suppressed_vertices: int = 12) -> int:
    """Number of length-preserving combinatorial automorphisms.

    Counts pairs (vertex permutation, edge bijection); reversing a self-loop
    counts as a distinct automorphism, so a lone self-loop has 2.  Guarded by
    the number of vertices left after smoothing valence-2 chains.
    """
    validate(graph).raise_on_error()
    if _suppressed_size(graph) > max_suppressed_vertices:
        raise SearchSpaceExceeded(
            f"graph has more than {max_suppressed_vertices} essential vertices"
        )

    verts = sorted(graph.vertices)
    index = {v: i for i, v in enumerate(verts)}
    n = len(verts)

    loops: dict[str, list[Fraction]] = {v: [] for v in verts}
    bundles: dict[tuple[str, str], list[Fraction]] = {}
    for e in graph.edges:
        if e.is_loop:
            loops[e.u].append(e.length)
        else:
            key = (min(e.u, e.v), max(e.u, e.v))
            bundles.setdefault(key, []).append(e.length)
    for lst in loops.values():
        lst.sort()
    for lst in bundles.values():
        lst.sort()

    def bundle(a: str, b: str) -> list[Fraction]:
        return bundles.get((min(a, b), max(a, b)), [])

    def invariant(v: str):
        incident = []
        for eid, _end in graph.germs(v):
            e = graph.edge(eid)
            incident.append((e.length, e.is_loop))
        return (graph.valence(v), tuple(sorted(incident)), tuple(loops[v]))

    invariants = {v: invariant(v) for v in verts}

    def edge_mapping_factor() -> int:
        factor = 1
        for lst in bundles.values():
            i = 0
            while i < len(lst):
                j = i
                while j < len(lst) and lst[j] == lst[i]:
                    j += 1
                factor *= math.factorial(j - i)
                i = j
        for lst in loops.values():
            i = 0
            while i < len(lst):
                j = i
                while j < len(lst) and lst[j] == lst[i]:
                    j += 1
                k = j - i
                factor *= math.factorial(k) * (2 ** k)
                i = j
        return factor

    per_sigma = edge_mapping_factor()
    count = 0
    image: list[str | None] = [None] * n
    used: set[str] = set()

    def extend(i: int) -> None:
        nonlocal count
        if i == n:
            count += 1
            return
        v = verts[i]
        for w in verts:
            if w in used or invariants[w] != invariants[v]:
                continue
            ok = True
            for j in range(i):
                u = verts[j]
                if bundle(v, u) != bundle(w, image[j]):
                    ok = False
                    break
                if loops[v] != loops[w]:
                    ok = False
                    break
            if ok:
                image[i] = w
                used.add(w)
                extend(i + 1)
                used.discard(w)
                image[i] = None

    extend(0)
    return count * per_sigma


# -- integer relations ---------------------------------------------------------


def has_small_integer_relation(
    lengths: Sequence,
    coeff_bound: int,
    tol=Fraction(0),
    max_search: int = 4_000_000,
):
    """Search for integers c, not all zero, with |c| <= coeff_bound entrywise
    and |sum(c_i * L_i)| <= tol.  Returns one such tuple or None.

    With exact rational lengths and tol = 0 the answer is exact within the
    coefficient box.  Raises SearchSpaceExceeded when (2*bound+1)^n would pass
    the max_search guard.
    """
    if coeff_bound < 1:
        raise GraphError("coeff_bound must be >= 1")
    ls = [as_length(x) for x in lengths]
    if not ls:
        raise GraphError("lengths must be nonempty")
    tol = as_length(tol)
    n = len(ls)
    space = (2 * coeff_bound + 1) ** n
    if space > max_search:
        raise SearchSpaceExceeded(
            f"coefficient box has {space} points (> {max_search})"
        )
    # scale to integers so the inner loop avoids Fraction arithmetic
    denom = math.lcm(*(l.denominator for l in ls), tol.denominator)
    scaled = [int(l * denom) for l in ls]
    tol_scaled = tol * denom

    for coeffs in itertools.product(range(-coeff_bound, coeff_bound + 1), repeat=n):
        first = next((c for c in coeffs if c != 0), None)
        if first is None or first < 0:
            continue  # skip zero and sign-negated duplicates
        total = 0
        for c, l in zip(coeffs, scaled):
            if c:
                total += c * l
        if abs(total) <= tol_scaled:
            return tuple(coeffs)
    return None
