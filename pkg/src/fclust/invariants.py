"""Numerical invariants that can only shrink along injective
distance non-increasing maps.

Each invariant sends a space to a value in [0, +inf].  Whenever an
"inj" map X -> Y exists, the value at X is at least the value at Y;
``check_invariant_monotone`` probes exactly that inequality.  An empty
minimum is +inf and an empty maximum is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping

from fclust.category import CategoryTag, MetricMap, exists_morphism
from fclust.metric import FiniteMetricSpace, separation

KINDS = ("separation", "k_minus", "k_plus", "omega_minus", "omega_plus", "cardinality")
BASES = ("separation", "diameter")


def _base_value(name: str, space: FiniteMetricSpace) -> float:
    """Size of a motif under the chosen one-space invariant.  A one-point
    space has separation +inf (no pairs to separate) and diameter 0."""
    n = len(space)
    values = [space.dist[i][j] for i in range(n) for j in range(i + 1, n)]
    if name == "separation":
        return min(values, default=math.inf)
    return max(values, default=0.0)


@dataclass(frozen=True)
class InvariantSpec:
    """Description of one invariant.

    kind "separation": least pairwise distance (+inf on one point).
    kind "k_minus": least diameter of a k-point subset (+inf when the
        space has fewer than k points).
    kind "k_plus": the separation when the space has at most k points,
        0 otherwise (+inf on one point).
    kind "omega_minus": least base value of a motif that maps
        injectively into the space without increasing distances.
    kind "omega_plus": largest base value of a motif the space maps into
        that way.
    kind "cardinality": table lookup on the point count; the table must
        be non-increasing, with ``tail`` for counts past its end.
    """

    kind: str
    k: int = 0
    motifs: tuple[FiniteMetricSpace, ...] = ()
    base: str = "separation"
    zeta: tuple[float, ...] = ()  # value for sizes 1, 2, ..., len(zeta)
    tail: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown invariant kind {self.kind!r}")
        if self.kind in ("k_minus", "k_plus"):
            if not isinstance(self.k, int) or self.k < 1:
                raise ValueError("k must be a positive integer")
        if self.kind in ("omega_minus", "omega_plus"):
            if self.base not in BASES:
                raise ValueError(f"base must be one of {BASES}")
            object.__setattr__(self, "motifs", tuple(self.motifs))
        if self.kind == "cardinality":
            zeta = tuple(float(v) for v in self.zeta)
            object.__setattr__(self, "zeta", zeta)
            values = list(zeta) + [float(self.tail)]
            if not values:
                raise ValueError("cardinality table must not be empty")
            for a, b in zip(values, values[1:]):
                if b > a:
                    raise ValueError("cardinality table must be non-increasing")
            for v in values:
                if math.isnan(v) or v < 0:
                    raise ValueError("cardinality values must be in [0, +inf]")


def separation_invariant() -> InvariantSpec:
    return InvariantSpec("separation")


def k_minus(k: int) -> InvariantSpec:
    return InvariantSpec("k_minus", k=k)


def k_plus(k: int) -> InvariantSpec:
    return InvariantSpec("k_plus", k=k)


def omega_minus(motifs: Iterable[FiniteMetricSpace], base: str = "separation") -> InvariantSpec:
    return InvariantSpec("omega_minus", motifs=tuple(motifs), base=base)


def omega_plus(motifs: Iterable[FiniteMetricSpace], base: str = "separation") -> InvariantSpec:
    return InvariantSpec("omega_plus", motifs=tuple(motifs), base=base)


def cardinality_invariant(zeta: Iterable[float], tail: float = 0.0) -> InvariantSpec:
    return InvariantSpec("cardinality", zeta=tuple(zeta), tail=tail)


def evaluate_invariant(spec: InvariantSpec, space: FiniteMetricSpace) -> float:
    n = len(space)
    if spec.kind == "separation":
        return math.inf if n < 2 else separation(space)
    if spec.kind == "k_minus":
        if n < spec.k:
            return math.inf
        if spec.k == 1:
            return 0.0
        dist = space.dist
        return min(
            max(dist[i][j] for i, j in combinations(idx, 2))
            for idx in combinations(range(n), spec.k)
        )
    if spec.kind == "k_plus":
        if n > spec.k:
            return 0.0
        return math.inf if n < 2 else separation(space)
    if spec.kind == "omega_minus":
        hits = [
            _base_value(spec.base, motif)
            for motif in spec.motifs
            if exists_morphism(motif, space, CategoryTag.INJ, force=True) is not None
        ]
        return min(hits, default=math.inf)
    if spec.kind == "omega_plus":
        hits = [
            _base_value(spec.base, motif)
            for motif in spec.motifs
            # an injection needs room; the size check keeps the search small
            if len(space) <= len(motif)
            and exists_morphism(space, motif, CategoryTag.INJ, force=True) is not None
        ]
        return max(hits, default=0.0)
    if n <= len(spec.zeta):
        return spec.zeta[n - 1]
    return spec.tail


def check_invariant_monotone(
    spec: InvariantSpec, morphisms: Iterable[MetricMap]
) -> dict:
    """Assert value(source) >= value(target) along each map; collects the
    failures with their values."""
    checked = 0
    violations = []
    for index, f in enumerate(morphisms):
        checked += 1
        upper = evaluate_invariant(spec, f.source)
        lower = evaluate_invariant(spec, f.target)
        if not upper >= lower:
            violations.append(
                {
                    "index": index,
                    "source_value": upper,
                    "target_value": lower,
                    "source_labels": list(f.source.labels),
                    "target_labels": list(f.target.labels),
                }
            )
    return {"checked": checked, "violations": violations}
