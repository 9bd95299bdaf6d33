"""Finite metric spaces, partitions, and scale-indexed component operations.

Distances are 64-bit floats.  Every comparison used by the clustering
operations is a plain float comparison on values obtained by min/max
selection, so results carry no arithmetic drift: a threshold equal to a
stored distance behaves exactly like that distance.
"""

from __future__ import annotations

import math
from dataclasses import InitVar, dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence


class MetricError(ValueError):
    """A distance table failed validation; the message names the witness."""


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def validate_metric(
    labels: Sequence[str],
    dist: Sequence[Sequence[float]],
    *,
    pseudometric: bool = False,
    allow_infinite: bool = False,
) -> None:
    """Check that ``dist`` is a metric table over ``labels``.

    Requirements: square table matching the label count, zero diagonal,
    symmetry, non-negative entries, triangle inequality.  Off-diagonal
    zeros are rejected unless ``pseudometric``; +inf entries are rejected
    unless ``allow_infinite``.  Raises MetricError naming the offending
    pair or triple.
    """
    n = len(labels)
    if n == 0:
        raise MetricError("a space needs at least one point")
    if len(set(labels)) != n:
        raise MetricError("duplicate point labels")
    if len(dist) != n or any(len(row) != n for row in dist):
        raise MetricError(f"distance table must be {n}x{n}")
    for i in range(n):
        for j in range(n):
            v = dist[i][j]
            if not _is_number(v) or math.isnan(v):
                raise MetricError(f"d({labels[i]}, {labels[j]}) is not a number")
            if v < 0:
                raise MetricError(f"d({labels[i]}, {labels[j]}) = {v} is negative")
            if math.isinf(v) and not allow_infinite:
                raise MetricError(
                    f"d({labels[i]}, {labels[j]}) is infinite; "
                    "pass allow_infinite to permit unreachable pairs"
                )
    for i in range(n):
        if dist[i][i] != 0:
            raise MetricError(f"d({labels[i]}, {labels[i]}) = {dist[i][i]}, diagonal must be 0")
    for i in range(n):
        for j in range(i + 1, n):
            if dist[i][j] != dist[j][i]:
                raise MetricError(
                    f"asymmetry: d({labels[i]}, {labels[j]}) = {dist[i][j]} "
                    f"but d({labels[j]}, {labels[i]}) = {dist[j][i]}"
                )
            if dist[i][j] == 0 and not pseudometric:
                raise MetricError(
                    f"d({labels[i]}, {labels[j]}) = 0 for distinct points; "
                    "pass pseudometric to permit"
                )
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                a, b, c = dist[j][k], dist[i][k], dist[i][j]
                # each side must not exceed the sum of the other two
                if b + c < a or a + c < b or a + b < c:
                    raise MetricError(
                        "triangle violation on "
                        f"({labels[i]}, {labels[j]}, {labels[k]}): "
                        f"d({labels[i]},{labels[j]})={c}, "
                        f"d({labels[j]},{labels[k]})={a}, "
                        f"d({labels[i]},{labels[k]})={b}"
                    )


@dataclass(frozen=True)
class FiniteMetricSpace:
    """An immutable finite (pseudo)metric space.

    ``pseudometric`` permits zero distance between distinct points;
    ``allow_infinite`` permits +inf entries (pairs no chain of motifs can
    connect).  Both flags default to the strict reading.
    """

    labels: tuple[str, ...]
    dist: tuple[tuple[float, ...], ...]
    pseudometric: bool = False
    allow_infinite: bool = False
    # scaling a valid table can bend a tight triangle equality by one ulp,
    # so operations that are sound by construction may skip re-validation
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        labels = tuple(str(x) for x in self.labels)
        dist = tuple(tuple(float(v) for v in row) for row in self.dist)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "dist", dist)
        if validate:
            validate_metric(
                labels, dist, pseudometric=self.pseudometric, allow_infinite=self.allow_infinite
            )

    def __len__(self) -> int:
        return len(self.labels)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    @cached_property
    def sorted_indices(self) -> tuple[int, ...]:
        """Point indices in label order; the deterministic candidate order."""
        return tuple(sorted(range(len(self.labels)), key=lambda i: self.labels[i]))

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"no point labelled {label!r}") from None

    def d(self, a: str, b: str) -> float:
        return self.dist[self.index(a)][self.index(b)]


def _derived_space(labels: Iterable[str], dist: Sequence[Sequence[float]]) -> FiniteMetricSpace:
    """Build a space from a computed table, inferring the permission flags."""
    labels = tuple(labels)
    n = len(labels)
    has_zero = any(dist[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    has_inf = any(math.isinf(dist[i][j]) for i in range(n) for j in range(i + 1, n))
    return FiniteMetricSpace(
        labels,
        tuple(tuple(row) for row in dist),
        pseudometric=has_zero,
        allow_infinite=has_inf,
    )


def equilateral_space(k: int, delta: float = 1.0) -> FiniteMetricSpace:
    """k points, every pair at distance delta.  k = 1 ignores delta."""
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if k >= 2 and not delta > 0:
        raise ValueError(f"side length must be positive, got {delta!r}")
    labels = tuple(f"p{i + 1}" for i in range(k))
    dist = tuple(
        tuple(0.0 if i == j else float(delta) for j in range(k)) for i in range(k)
    )
    return FiniteMetricSpace(labels, dist)


def separation(space: FiniteMetricSpace) -> float:
    """Smallest distance between distinct points.  Needs at least two points."""
    n = len(space)
    if n < 2:
        raise ValueError("separation needs at least two points")
    return min(space.dist[i][j] for i in range(n) for j in range(i + 1, n))


def diameter(space: FiniteMetricSpace) -> float:
    """Largest pairwise distance; 0 for a one-point space."""
    n = len(space)
    return max(
        (space.dist[i][j] for i in range(n) for j in range(i + 1, n)),
        default=0.0,
    )


def scale_space(space: FiniteMetricSpace, factor: float) -> FiniteMetricSpace:
    """Multiply every distance by a positive finite factor."""
    if not (_is_number(factor) and 0 < factor < math.inf):
        raise ValueError(f"scale factor must be positive and finite, got {factor!r}")
    dist = tuple(tuple(v * factor for v in row) for row in space.dist)
    return FiniteMetricSpace(
        space.labels,
        dist,
        pseudometric=space.pseudometric,
        allow_infinite=space.allow_infinite,
        validate=False,
    )


def restrict(space: FiniteMetricSpace, subset: Iterable[str]) -> FiniteMetricSpace:
    """Sub-space on ``subset``, keeping the ambient distances."""
    wanted = list(subset)
    if len(wanted) != len(set(wanted)):
        raise ValueError("subset contains duplicates")
    if not wanted:
        raise ValueError("subset must be non-empty")
    for lab in wanted:
        if lab not in space._index:
            raise KeyError(f"no point labelled {lab!r}")
    keep = set(wanted)
    idx = [i for i, lab in enumerate(space.labels) if lab in keep]
    labels = [space.labels[i] for i in idx]
    dist = [[space.dist[i][j] for j in idx] for i in idx]
    return _derived_space(labels, dist)


@dataclass(frozen=True)
class Partition:
    """A partition of a finite label set, held in canonical form.

    Blocks are sorted internally and ordered by least member, so two
    partitions of the same ground set are equal iff they have the same
    blocks.
    """

    ground: tuple[str, ...]
    blocks: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        ground = tuple(str(x) for x in self.ground)
        if len(set(ground)) != len(ground):
            raise ValueError("duplicate labels in ground set")
        blocks = tuple(sorted(tuple(sorted(str(x) for x in b)) for b in self.blocks))
        object.__setattr__(self, "ground", ground)
        object.__setattr__(self, "blocks", blocks)
        seen: set[str] = set()
        for b in blocks:
            if not b:
                raise ValueError("empty block")
            for x in b:
                if x in seen:
                    raise ValueError(f"label {x!r} appears in two blocks")
                seen.add(x)
        if seen != set(ground):
            raise ValueError("blocks do not cover the ground set exactly")

    @cached_property
    def _block_of(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for i, b in enumerate(self.blocks):
            for x in b:
                out[x] = i
        return out

    def block_of(self, label: str) -> tuple[str, ...]:
        return self.blocks[self._block_of[label]]

    @property
    def is_single_block(self) -> bool:
        return len(self.blocks) == 1

    @property
    def is_discrete(self) -> bool:
        return all(len(b) == 1 for b in self.blocks)

    def refines(self, other: "Partition") -> bool:
        """True when every block here sits inside a block of ``other``."""
        if set(self.ground) != set(other.ground):
            raise ValueError("refinement compares partitions of the same ground set")
        return all(
            len({other._block_of[x] for x in b}) == 1 for b in self.blocks
        )


def singletons_partition(ground: Iterable[str]) -> Partition:
    g = tuple(ground)
    return Partition(g, tuple((x,) for x in g))


def one_block_partition(ground: Iterable[str]) -> Partition:
    g = tuple(ground)
    return Partition(g, (g,))


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


def components_at_scale(
    space: FiniteMetricSpace, delta: float, *, strict: bool = False
) -> Partition:
    """Classes of the chaining relation: points joined by hops of length
    <= delta (or < delta when ``strict``)."""
    if not _is_number(delta) or math.isnan(delta) or delta < 0:
        raise ValueError(f"scale must be a number >= 0, got {delta!r}")
    n = len(space)
    uf = _UnionFind(n)
    for i in range(n):
        for j in range(i + 1, n):
            v = space.dist[i][j]
            if v < delta if strict else v <= delta:
                uf.union(i, j)
    groups: dict[int, list[str]] = {}
    for i in range(n):
        groups.setdefault(uf.find(i), []).append(space.labels[i])
    return Partition(space.labels, tuple(tuple(g) for g in groups.values()))


def subdominant_ultrametric(
    dist: Sequence[Sequence[float]],
) -> tuple[tuple[float, ...], ...]:
    """Largest ultrametric lying below the table: entry (i, j) is the
    least, over chains from i to j, of the longest hop in the chain.

    Computed as the maximum edge on the minimum-spanning-tree path, which
    realises the optimal chain.  Input must be square, symmetric,
    non-negative, zero on the diagonal; +inf entries are allowed and mark
    pairs that no finite chain connects.
    """
    n = len(dist)
    if n == 0:
        raise ValueError("table must be non-empty")
    for i in range(n):
        if len(dist[i]) != n:
            raise ValueError("table must be square")
        if dist[i][i] != 0:
            raise ValueError(f"diagonal entry ({i}, {i}) must be 0")
        for j in range(i + 1, n):
            if dist[i][j] != dist[j][i]:
                raise ValueError(f"asymmetric entries at ({i}, {j})")
            if not _is_number(dist[i][j]) or math.isnan(dist[i][j]) or dist[i][j] < 0:
                raise ValueError(f"entry ({i}, {j}) must be a number >= 0")
    if n == 1:
        return ((0.0,),)

    # Prim's algorithm on the complete graph; ties broken by smallest index.
    in_tree = [False] * n
    best = list(dist[0])
    parent = [0] * n
    in_tree[0] = True
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for _ in range(n - 1):
        u = -1
        for v in range(n):
            if not in_tree[v] and (u == -1 or best[v] < best[u]):
                u = v
        in_tree[u] = True
        w = best[u]
        adjacency[u].append((parent[u], w))
        adjacency[parent[u]].append((u, w))
        for v in range(n):
            if not in_tree[v] and dist[u][v] < best[v]:
                best[v] = dist[u][v]
                parent[v] = u

    out = [[0.0] * n for _ in range(n)]
    for source in range(n):
        stack = [(source, 0.0)]
        seen = [False] * n
        seen[source] = True
        while stack:
            node, high = stack.pop()
            out[source][node] = high
            for nxt, w in adjacency[node]:
                if not seen[nxt]:
                    seen[nxt] = True
                    stack.append((nxt, max(high, w)))
    for i in range(n):
        out[i][i] = 0.0
        for j in range(i + 1, n):
            out[j][i] = out[i][j]
    return tuple(tuple(row) for row in out)


def pullback_partition(
    mapping: Mapping[str, str],
    partition: Partition,
    ground: Sequence[str] | None = None,
) -> Partition:
    """Partition of the mapping's domain by preimage of blocks.

    Empty preimages are dropped.  ``ground`` defaults to the mapping keys.
    """
    g = tuple(ground) if ground is not None else tuple(mapping.keys())
    target_set = set(partition.ground)
    for x in g:
        if x not in mapping:
            raise KeyError(f"mapping is not defined on {x!r}")
        if mapping[x] not in target_set:
            raise ValueError(f"mapping sends {x!r} outside the partitioned set")
    blocks: dict[int, list[str]] = {}
    for x in g:
        blocks.setdefault(partition._block_of[mapping[x]], []).append(x)
    return Partition(g, tuple(tuple(b) for b in blocks.values()))


def quotient_at_scale(
    space: FiniteMetricSpace, r: float
) -> tuple[FiniteMetricSpace, dict[str, str]]:
    """Collapse the chaining classes at scale r to single points.

    Each class is named after its least member.  The quotient distance is
    the subdominant ultrametric of the table of least cross-class
    distances, so every quotient distance exceeds r and the projection
    never increases distance.  Returns (quotient space, projection).
    """
    if not _is_number(r) or math.isnan(r) or r < 0:
        raise ValueError(f"scale must be a number >= 0, got {r!r}")
    part = components_at_scale(space, r)
    reps = [b[0] for b in part.blocks]
    k = len(part.blocks)
    members = [[space.index(x) for x in b] for b in part.blocks]
    cross = [[0.0] * k for _ in range(k)]
    for a in range(k):
        for b in range(a + 1, k):
            v = min(space.dist[i][j] for i in members[a] for j in members[b])
            cross[a][b] = cross[b][a] = v
    table = subdominant_ultrametric(cross)
    quotient = _derived_space(reps, table)
    projection = {x: part.blocks[part._block_of[x]][0] for x in space.labels}
    return quotient, projection


def distance_values(space: FiniteMetricSpace, *, include_zero: bool = False) -> list[float]:
    """Sorted distinct off-diagonal distances (finite ones only)."""
    n = len(space)
    vals = {
        space.dist[i][j]
        for i in range(n)
        for j in range(i + 1, n)
        if not math.isinf(space.dist[i][j])
    }
    if not include_zero:
        vals.discard(0.0)
    return sorted(vals)
