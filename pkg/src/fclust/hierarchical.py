"""Scale-indexed partitions: persistent sets, dendrograms, and linkage.

A persistent set records how a partition of a fixed ground set coarsens
as a scale parameter grows.  It is stored as a step function: a strictly
increasing list of breakpoints together with one partition per interval
``[0, r_1), [r_1, r_2), ..., [r_last, inf)``.  This representation keeps
multi-way merges exact (several blocks may fuse at the same scale) and
makes equality of clusterings a plain structural comparison, with none
of the tie-breaking noise a binary merge tree would introduce.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Mapping

from .category import CategoryTag, CheckResult
from .flat import MotifSet, motif_metric_transform
from .metric import (
    FiniteMetricSpace,
    Partition,
    _derived_space,
    components_at_scale,
    equilateral_space,
    pullback_partition,
    singletons_partition,
    subdominant_ultrametric,
)

__all__ = [
    "PersistentSet",
    "Linkage",
    "single_linkage",
    "agglomerative",
    "trim_hierarchy",
    "clique_hierarchy",
    "is_persistence_preserving",
    "dendrogram_to_ultrametric",
    "scale_persistent",
]


@dataclass(frozen=True)
class PersistentSet:
    """A right-continuous, coarsening step function of partitions.

    ``partitions[i]`` holds on the interval starting at ``breakpoints[i-1]``
    (the first partition starts at 0).  Constructing one canonicalises:
    consecutive equal partitions are coalesced, so two persistent sets are
    equal iff they describe the same function of the scale.
    """

    ground: tuple[str, ...]
    breakpoints: tuple[float, ...]
    partitions: tuple[Partition, ...]

    def __post_init__(self):
        ground = tuple(str(x) for x in self.ground)
        breakpoints = tuple(float(r) for r in self.breakpoints)
        partitions = tuple(self.partitions)
        if not ground:
            raise ValueError("empty ground set")
        if len(partitions) != len(breakpoints) + 1:
            raise ValueError(
                f"{len(breakpoints)} breakpoints require "
                f"{len(breakpoints) + 1} partitions, got {len(partitions)}"
            )
        for r in breakpoints:
            if not (r > 0 and math.isfinite(r)):
                raise ValueError(f"breakpoints must be finite and positive, got {r!r}")
        if any(a >= b for a, b in zip(breakpoints, breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        ground_set = set(ground)
        for p in partitions:
            if set(p.ground) != ground_set:
                raise ValueError("partition ground set does not match")
        # canonical form: drop breakpoints that do not change the partition
        kept_b: list[float] = []
        kept_p: list[Partition] = [partitions[0]]
        for r, p in zip(breakpoints, partitions[1:]):
            if p != kept_p[-1]:
                kept_b.append(r)
                kept_p.append(p)
        for earlier, later in zip(kept_p, kept_p[1:]):
            if not earlier.refines(later):
                raise ValueError("partitions must coarsen as the scale grows")
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "breakpoints", tuple(kept_b))
        object.__setattr__(self, "partitions", tuple(kept_p))

    def at(self, r: float) -> Partition:
        """The partition in force at scale ``r`` (a step-function lookup)."""
        if not r >= 0:
            raise ValueError(f"scale must be non-negative, got {r!r}")
        return self.partitions[bisect_right(self.breakpoints, r)]

    @property
    def is_dendrogram(self) -> bool:
        """True when every pair of points eventually shares a block."""
        return self.partitions[-1].is_single_block


class Linkage(Enum):
    """How the distance between two blocks is read off the point distances."""

    SINGLE = "single"
    COMPLETE = "complete"
    AVERAGE = "average"


def single_linkage(space: FiniteMetricSpace) -> PersistentSet:
    """Cluster at every scale at once by chaining.

    The partition at scale ``r`` is exactly ``components_at_scale(space, r)``;
    the breakpoints are the distinct values of the chain-minimax distance,
    which is where components can change.
    """
    table = subdominant_ultrametric(space.dist)
    chained = _derived_space(space.labels, table)
    n = len(space.labels)
    values = sorted(
        {
            table[i][j]
            for i in range(n)
            for j in range(i + 1, n)
            if 0 < table[i][j] < math.inf
        }
    )
    partitions = [components_at_scale(chained, r) for r in (0.0, *values)]
    return PersistentSet(space.labels, tuple(values), tuple(partitions))


def _block_linkage(
    space: FiniteMetricSpace, a: tuple[int, ...], b: tuple[int, ...], kind: Linkage
) -> float:
    values = [space.dist[i][j] for i in a for j in b]
    if kind is Linkage.SINGLE:
        return min(values)
    if kind is Linkage.COMPLETE:
        return max(values)
    return math.fsum(values) / len(values)


def agglomerative(space: FiniteMetricSpace, kind: Linkage) -> PersistentSet:
    """Merge blocks bottom-up, several at a time.

    Each step finds the smallest inter-block linkage value ``r`` and fuses
    every group of blocks connected through linkages ``<= r`` in one go,
    recording ``r`` as a breakpoint.  With ``Linkage.SINGLE`` this agrees
    with :func:`single_linkage`; complete and average linkage recompute
    their max/mean formulas from the original point distances each step.
    """
    if not isinstance(kind, Linkage):
        raise ValueError(f"unknown linkage {kind!r}")
    blocks: list[tuple[int, ...]] = [(i,) for i in range(len(space.labels))]
    initial = singletons_partition(space.labels)
    breakpoints: list[float] = []
    partitions: list[Partition] = [initial]
    while len(blocks) > 1:
        links = {
            (i, j): _block_linkage(space, blocks[i], blocks[j], kind)
            for i, j in combinations(range(len(blocks)), 2)
        }
        r = min(links.values())
        if math.isinf(r):
            break
        parent = list(range(len(blocks)))

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for (i, j), value in links.items():
            if value <= r:
                parent[find(i)] = find(j)
        merged: dict[int, list[int]] = {}
        for i, block in enumerate(blocks):
            merged.setdefault(find(i), []).extend(block)
        blocks = [tuple(sorted(group)) for group in merged.values()]
        partition = Partition(
            space.labels, tuple(tuple(space.labels[i] for i in b) for b in blocks)
        )
        if r == 0.0:
            partitions[0] = partition
        else:
            breakpoints.append(r)
            partitions.append(partition)
    return PersistentSet(space.labels, tuple(breakpoints), tuple(partitions))


def trim_hierarchy(space: FiniteMetricSpace, m: int) -> PersistentSet:
    """Chaining, but blocks below ``m`` points shatter into singletons.

    At each scale the chaining classes of size at least ``m`` survive as
    blocks and every point in a smaller class stands alone.  ``m = 1``
    reproduces :func:`single_linkage`; for ``m > len(space)`` no class ever
    survives and the result is not a dendrogram.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError(f"minimum block size must be a positive integer, got {m!r}")
    base = single_linkage(space)

    def trimmed(p: Partition) -> Partition:
        blocks: list[tuple[str, ...]] = []
        for b in p.blocks:
            if len(b) >= m:
                blocks.append(b)
            else:
                blocks.extend((x,) for x in b)
        return Partition(p.ground, tuple(blocks))

    return PersistentSet(
        base.ground, base.breakpoints, tuple(trimmed(p) for p in base.partitions)
    )


def clique_hierarchy(
    space: FiniteMetricSpace, m: int, *, force: bool = False
) -> PersistentSet:
    """Chaining through m-point groups of bounded diameter, at every scale.

    Reweights each pair by the smallest factor that lets an equilateral
    m-point pattern cover it inside the space, then chains.  Slicing the
    result at ``delta`` agrees with flat clustering under
    ``Clique(m, delta)``; ``m = 2`` is plain single linkage.
    """
    if not isinstance(m, int) or m < 2:
        raise ValueError(f"group size must be an integer >= 2, got {m!r}")
    motifs = MotifSet((equilateral_space(m, 1.0),), CategoryTag.INJ, scalable=True)
    return single_linkage(motif_metric_transform(space, motifs, force=force))


def is_persistence_preserving(
    assignment: Mapping[str, str], theta_x: PersistentSet, theta_y: PersistentSet
) -> CheckResult:
    """Check that a point mapping never maps apart what is already together.

    At every scale the source partition must refine the pullback of the
    target partition.  Both step functions are constant between their
    combined breakpoints, so probing one interior point per interval is
    exhaustive; a failure reports such a probe scale as the witness.
    """
    if set(assignment.keys()) != set(theta_x.ground):
        raise ValueError("mapping domain must be the source ground set")
    if not set(assignment.values()) <= set(theta_y.ground):
        raise ValueError("mapping values must lie in the target ground set")
    cuts = sorted(set(theta_x.breakpoints) | set(theta_y.breakpoints))
    if not cuts:
        probes = [0.0]
    else:
        probes = [cuts[0] / 2.0]
        probes += [(a + b) / 2.0 for a, b in zip(cuts, cuts[1:])]
        probes.append(cuts[-1] + 1.0)
    for r in probes:
        fine = theta_x.at(r)
        coarse = pullback_partition(assignment, theta_y.at(r), ground=theta_x.ground)
        if not fine.refines(coarse):
            return CheckResult(False, r)
    return CheckResult(True)


def dendrogram_to_ultrametric(theta: PersistentSet) -> FiniteMetricSpace:
    """Distances from merge heights: d(x, y) = first scale sharing a block.

    Defined only for dendrograms.  The result satisfies the strong triangle
    inequality, and is a pseudometric exactly when some block is already
    present at scale 0.
    """
    if not theta.is_dendrogram:
        raise ValueError("some pair of points never shares a block")
    starts = (0.0, *theta.breakpoints)
    labels = theta.ground
    n = len(labels)
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            for start, p in zip(starts, theta.partitions):
                if p._block_of[labels[i]] == p._block_of[labels[j]]:
                    dist[i][j] = dist[j][i] = start
                    break
    return _derived_space(labels, dist)


def scale_persistent(theta: PersistentSet, factor: float) -> PersistentSet:
    """Stretch the scale axis by ``factor``, keeping the partitions.

    Slicing the result at ``factor * r`` gives the original slice at ``r``.
    If rounding makes two scaled breakpoints collide, the interval between
    them has vanished and the later partition wins at the shared scale.
    """
    if not (factor > 0 and math.isfinite(factor)):
        raise ValueError(f"scale factor must be positive and finite, got {factor!r}")
    breakpoints: list[float] = []
    partitions: list[Partition] = [theta.partitions[0]]
    last = 0.0
    for r, p in zip(theta.breakpoints, theta.partitions[1:]):
        scaled = r * factor
        if not math.isfinite(scaled):
            raise ValueError(f"scaled breakpoint {r} * {factor} overflows")
        if scaled == last:
            partitions[-1] = p
        else:
            breakpoints.append(scaled)
            partitions.append(p)
            last = scaled
    return PersistentSet(theta.ground, tuple(breakpoints), tuple(partitions))
