"""Maps between finite metric spaces and scaled-motif matching.

Three nested classes of maps are distinguished: isometries ("iso"),
injective distance non-increasing maps ("inj"), and all distance
non-increasing maps ("gen").  The matcher answers whether a small motif
space maps into a target subject to a class tag, optionally covering a
pinned pair of target points, and finds the least blow-up factor that
makes such a map possible.

Scale comparisons never divide: a candidate factor num/den is tested via
cross-multiplication (d_target * den against num * d_motif), so exact
ties in the input data stay exact.  The single division in this module
produces the returned factor itself.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from functools import cmp_to_key
from typing import Any

from fclust.metric import FiniteMetricSpace


class CategoryTag(Enum):
    ISO = "iso"
    INJ = "inj"
    GEN = "gen"


class MotifSizeError(ValueError):
    """Motif exceeds the search-size guard and force was not given."""


DEFAULT_MOTIF_LIMIT = 8


@dataclass(frozen=True)
class CheckResult:
    """Boolean verdict carrying a witness for the failing case."""

    ok: bool
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class MetricMap:
    """A map between spaces given pointwise by ``assignment``.

    Construction checks totality only; whether the map respects
    distances under a given tag is the job of ``is_morphism``.
    """

    source: FiniteMetricSpace
    target: FiniteMetricSpace
    assignment: dict[str, str]

    def __post_init__(self):
        if set(self.assignment) != set(self.source.labels):
            raise ValueError("assignment must be defined on exactly the source points")
        for x, y in self.assignment.items():
            if y not in self.target._index:
                raise ValueError(f"assignment sends {x!r} to unknown point {y!r}")

    def __call__(self, label: str) -> str:
        return self.assignment[label]


def is_morphism(f: MetricMap, tag: CategoryTag) -> CheckResult:
    """Check the map against a tag; the witness names the failing pair."""
    src, tgt = f.source, f.target
    labels = src.labels
    images = [tgt.index(f.assignment[x]) for x in labels]
    if tag is not CategoryTag.GEN:
        seen: dict[int, str] = {}
        for x, i in zip(labels, images):
            if i in seen:
                return CheckResult(False, ("not injective", (seen[i], x)))
            seen[i] = x
    if tag is CategoryTag.ISO and len(tgt) != len(src):
        return CheckResult(False, ("not surjective", None))
    for a in range(len(labels)):
        for b in range(a + 1, len(labels)):
            dx = src.dist[a][b]
            dy = tgt.dist[images[a]][images[b]]
            if tag is CategoryTag.ISO:
                if dy != dx:
                    return CheckResult(False, ("distance changed", (labels[a], labels[b])))
            elif dy > dx:
                return CheckResult(False, ("distance increased", (labels[a], labels[b])))
    return CheckResult(True)


def compose(f: MetricMap, g: MetricMap) -> MetricMap:
    """The map doing f first, then g."""
    if f.target != g.source:
        raise ValueError("middle spaces do not match")
    return MetricMap(
        f.source, g.target, {x: g.assignment[y] for x, y in f.assignment.items()}
    )


def identity_map(space: FiniteMetricSpace) -> MetricMap:
    return MetricMap(space, space, {x: x for x in space.labels})


def _motif_limit() -> int:
    raw = os.environ.get("CLUST_MAX_MOTIF")
    if raw is None:
        return DEFAULT_MOTIF_LIMIT
    try:
        return int(raw)
    except ValueError:
        raise MotifSizeError(f"CLUST_MAX_MOTIF must be an integer, got {raw!r}") from None


def _guard_motif(motif: FiniteMetricSpace, force: bool) -> None:
    limit = _motif_limit()
    if not force and len(motif) > limit:
        raise MotifSizeError(
            f"motif has {len(motif)} points, above the search guard of {limit}; "
            "pass force=True or raise CLUST_MAX_MOTIF"
        )


def _pin_indices(target: FiniteMetricSpace, pinned) -> tuple[int, ...]:
    if pinned is None:
        return ()
    a, b = pinned
    ia, ib = target.index(a), target.index(b)
    # a pin on a single repeated point only requires that point in the image
    return (ia,) if ia == ib else tuple(sorted({ia, ib}))


def _assignment_order(motif: FiniteMetricSpace) -> list[int]:
    """Motif points most-constrained-first: decreasing total distance,
    ties by label."""
    sums = [sum(row) for row in motif.dist]
    return sorted(
        range(len(motif)), key=lambda p: (-sums[p], motif.labels[p])
    )


def _find_assignment(
    motif: FiniteMetricSpace,
    target: FiniteMetricSpace,
    tag: CategoryTag,
    pins: tuple[int, ...],
    num: float,
    den: float,
) -> list[int] | None:
    """First assignment (motif index -> target index) satisfying the tag
    at blow-up factor num/den and covering the pins, or None.

    Candidates are tried in target label order, so the result is
    deterministic.  Distance tests compare d_target * den with
    num * d_motif; for "iso" the comparison is equality.
    """
    m, n = len(motif), len(target)
    if tag is CategoryTag.ISO and m != n:
        return None
    order = _assignment_order(motif)
    d_om = motif.dist
    d_tg = target.dist
    all_cands = target.sorted_indices
    injective = tag is not CategoryTag.GEN
    iso = tag is CategoryTag.ISO
    pin_cands = tuple(sorted(pins, key=lambda i: target.labels[i]))

    assigned: list[int] = [-1] * m
    used = [False] * n
    pin_cover = {p: 0 for p in pins}

    def rec(k: int, missing: int) -> bool:
        if k == m:
            return missing == 0
        slots = m - k
        if missing > slots:
            return False
        p = order[k]
        row = d_om[p]
        cands = (
            tuple(t for t in pin_cands if pin_cover[t] == 0)
            if missing == slots
            else all_cands
        )
        for t in cands:
            if injective and used[t]:
                continue
            col = d_tg[t]
            ok = True
            for j in range(k):
                q = order[j]
                lhs = col[assigned[q]] * den
                rhs = num * row[q]
                if (lhs != rhs) if iso else (lhs > rhs):
                    ok = False
                    break
            if not ok:
                continue
            assigned[p] = t
            if injective:
                used[t] = True
            covered_now = False
            if t in pin_cover:
                if pin_cover[t] == 0:
                    covered_now = True
                pin_cover[t] += 1
            if rec(k + 1, missing - covered_now):
                return True
            assigned[p] = -1
            if injective:
                used[t] = False
            if t in pin_cover:
                pin_cover[t] -= 1
        return False

    if rec(0, len(pins)):
        return list(assigned)
    return None


def exists_morphism(
    motif: FiniteMetricSpace,
    target: FiniteMetricSpace,
    tag: CategoryTag,
    pinned: tuple[str, str] | None = None,
    *,
    force: bool = False,
) -> MetricMap | None:
    """First tag-valid map of the motif into the target covering the
    pinned points, or None.  Deterministic for fixed inputs."""
    _guard_motif(motif, force)
    pins = _pin_indices(target, pinned)
    found = _find_assignment(motif, target, tag, pins, 1.0, 1.0)
    if found is None:
        return None
    assignment = {
        motif.labels[p]: target.labels[t] for p, t in enumerate(found)
    }
    return MetricMap(motif, target, assignment)


def _candidate_fractions(
    motif: FiniteMetricSpace, target: FiniteMetricSpace
) -> list[tuple[float, float]]:
    """All ratios target-distance / motif-distance as (num, den) pairs,
    deduplicated and sorted by value without dividing."""
    nums = {
        target.dist[i][j]
        for i in range(len(target))
        for j in range(i + 1, len(target))
        if 0 < target.dist[i][j] < math.inf
    }
    dens = {
        motif.dist[i][j]
        for i in range(len(motif))
        for j in range(i + 1, len(motif))
        if 0 < motif.dist[i][j] < math.inf
    }
    fractions = [(n, d) for n in nums for d in dens]

    def cmp(a: tuple[float, float], b: tuple[float, float]) -> int:
        left = a[0] * b[1]
        right = b[0] * a[1]
        return (left > right) - (left < right)

    fractions.sort(key=cmp_to_key(cmp))
    unique: list[tuple[float, float]] = []
    for frac in fractions:
        if not unique or cmp(unique[-1], frac) != 0:
            unique.append(frac)
    return unique


def minimal_scale(
    motif: FiniteMetricSpace,
    target: FiniteMetricSpace,
    tag: CategoryTag,
    pinned: tuple[str, str] | None = None,
    *,
    force: bool = False,
) -> float:
    """Least factor blowing the motif up until it maps into the target
    under the tag, covering the pinned points; +inf when no factor works.

    For "inj" and "gen" feasibility only improves as the factor grows, so
    the least feasible value is found by binary search over the candidate
    ratios d_target / d_motif.  For "iso" the feasible factors form a
    finite set and the candidates are scanned in increasing order.  A
    search whose constraints do not involve the factor at all (one-point
    motif) reports 1.  When arbitrarily small factors work (the target
    pair sits at distance zero) the infimum 0 is reported.
    """
    _guard_motif(motif, force)
    pins = _pin_indices(target, pinned)
    if len(motif) == 1:
        return 1.0 if _find_assignment(motif, target, tag, pins, 1.0, 1.0) else math.inf
    if tag is CategoryTag.ISO and len(motif) != len(target):
        return math.inf

    fractions = _candidate_fractions(motif, target)
    if tag is CategoryTag.ISO:
        for num, den in fractions:
            if _find_assignment(motif, target, tag, pins, num, den):
                return num / den
        return math.inf

    if _find_assignment(motif, target, tag, pins, 0.0, 1.0):
        return 0.0
    lo, hi = 0, len(fractions) - 1
    best: tuple[float, float] | None = None
    while lo <= hi:
        mid = (lo + hi) // 2
        num, den = fractions[mid]
        if _find_assignment(motif, target, tag, pins, num, den):
            best = (num, den)
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        return math.inf
    return best[0] / best[1]
