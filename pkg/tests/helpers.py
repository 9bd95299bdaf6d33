"""Brute-force oracles and small builders shared by the test modules.

The oracles deliberately take the slow, definition-shaped route so the
library implementations are checked against an independent computation.
"""

from __future__ import annotations

import math
from itertools import combinations, permutations

from fclust.metric import FiniteMetricSpace


def space_from_points(points, prefix: str = "p") -> FiniteMetricSpace:
    """Euclidean space on 2-d coordinates (or 1-d numbers)."""
    pts = [(p, 0.0) if isinstance(p, (int, float)) else tuple(p) for p in points]
    labels = tuple(f"{prefix}{i + 1}" for i in range(len(pts)))
    dist = tuple(
        tuple(math.hypot(a[0] - b[0], a[1] - b[1]) for b in pts) for a in pts
    )
    return FiniteMetricSpace(labels, dist)


def space_from_edges(labels, edges, **flags) -> FiniteMetricSpace:
    """Build a space from {frozenset({a, b}): value} edge data."""
    labels = tuple(labels)
    n = len(labels)
    index = {lab: i for i, lab in enumerate(labels)}
    dist = [[0.0] * n for _ in range(n)]
    for pair, value in edges.items():
        a, b = tuple(pair)
        dist[index[a]][index[b]] = float(value)
        dist[index[b]][index[a]] = float(value)
    return FiniteMetricSpace(labels, tuple(tuple(r) for r in dist), **flags)


def chain_minimax(dist, i: int, j: int) -> float:
    """Least, over simple chains from i to j, of the longest hop.

    Enumerates every simple chain; usable up to about seven points.
    """
    if i == j:
        return 0.0
    n = len(dist)
    others = [k for k in range(n) if k not in (i, j)]
    best = dist[i][j]
    for r in range(1, len(others) + 1):
        for mids in permutations(others, r):
            path = (i, *mids, j)
            hop = max(dist[a][b] for a, b in zip(path, path[1:]))
            if hop < best:
                best = hop
    return best


def brute_minimal_scale(omega, target, tag: str, pinned=None) -> float:
    """Least factor by which the motif must be blown up to map into the
    target covering the pinned points, by full enumeration of assignments.

    ``tag`` is "iso", "inj", or "gen".  Returns +inf when no assignment
    works at any factor.  Ratios are handled as (numerator, denominator)
    pairs compared by cross-multiplication so exact ties in the data stay
    exact; division happens once, on the winning fraction.
    """
    m, n = len(omega), len(target)
    pins: set[int] = set()
    if pinned is not None:
        pins = {target.index(pinned[0]), target.index(pinned[1])}
    if tag == "iso" and m != n:
        return math.inf
    if tag == "inj":
        candidates = permutations(range(n), m)
    elif tag == "iso":
        candidates = permutations(range(n))
    else:
        candidates = _all_maps(n, m)

    def less(a, b):
        # a < b for fractions (num, den) with positive denominators
        return a[0] * b[1] < b[0] * a[1]

    def equal(a, b):
        return a[0] * b[1] == b[0] * a[1]

    best = None
    for assign in candidates:
        if pins and not pins.issubset(assign):
            continue
        worst = (0.0, 1.0)
        ok = True
        for p, q in combinations(range(m), 2):
            frac = (target.dist[assign[p]][assign[q]], omega.dist[p][q])
            if tag == "iso":
                if (p, q) == (0, 1):
                    worst = frac
                elif not equal(frac, worst):
                    ok = False
                    break
            elif less(worst, frac):
                worst = frac
        if not ok:
            continue
        if tag == "iso" and worst[0] == 0:
            continue
        if best is None or less(worst, best):
            best = worst
    if best is None:
        return math.inf
    if best[0] == 0:
        return 0.0
    return best[0] / best[1]


def _all_maps(n: int, m: int):
    if m == 0:
        yield ()
        return
    for rest in _all_maps(n, m - 1):
        for i in range(n):
            yield rest + (i,)
