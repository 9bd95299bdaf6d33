"""Flat clustering schemes on finite metric spaces.

A flat scheme sends a space to one partition.  The schemes here:

* ``Rips(delta)`` / ``RipsStrict(delta)``: chaining components at scale
  delta, with a non-strict or strict hop comparison.
* ``Representable(motifs)``: two points join when some motif maps into
  the space covering both; the partition is the connected components of
  that pair graph.
* ``Clique(m, delta)``: two points join when some m-point superset of
  them has diameter at most delta.
* ``NonExcisive(invariant, eta)``: chaining components at the scale
  ``eta(invariant(X))``, for a non-increasing eta.  Re-clustering a
  block of the output can split it, which is the point of the name.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Iterable

from fclust.category import (
    CategoryTag,
    CheckResult,
    MotifSizeError,
    exists_morphism,
    minimal_scale,
)
from fclust.invariants import InvariantSpec, evaluate_invariant
from fclust.metric import (
    FiniteMetricSpace,
    Partition,
    components_at_scale,
    equilateral_space,
    one_block_partition,
    restrict,
    scale_space,
    singletons_partition,
    subdominant_ultrametric,
)

CLIQUE_MAX_POINTS = 24
CLIQUE_MAX_SIZE = 5


@dataclass(frozen=True)
class MotifSet:
    """A family of motif spaces with the map class used to probe them.

    ``scalable`` declares that the family stands for all positive
    rescalings of its members, which is what the motif transform needs.
    """

    motifs: tuple[FiniteMetricSpace, ...]
    tag: CategoryTag = CategoryTag.INJ
    scalable: bool = False

    def __post_init__(self):
        object.__setattr__(self, "motifs", tuple(self.motifs))
        if not self.motifs:
            raise ValueError("motif family must be non-empty")
        if self.tag not in (CategoryTag.INJ, CategoryTag.GEN):
            raise ValueError("motif tag must be inj or gen")
        for om in self.motifs:
            n = len(om)
            for i in range(n):
                for j in range(i + 1, n):
                    if not 0 < om.dist[i][j] < math.inf:
                        raise ValueError(
                            "motif distances must be positive and finite"
                        )


@dataclass(frozen=True)
class Rips:
    delta: float

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError("scale must be >= 0")


@dataclass(frozen=True)
class RipsStrict:
    delta: float

    def __post_init__(self):
        if not self.delta >= 0:
            raise ValueError("scale must be >= 0")


@dataclass(frozen=True)
class Representable:
    motifs: MotifSet


@dataclass(frozen=True)
class Clique:
    m: int
    delta: float

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 2:
            raise ValueError("clique size must be an integer >= 2")
        if not self.delta >= 0:
            raise ValueError("scale must be >= 0")


@dataclass(frozen=True)
class EtaReciprocal:
    """eta(z) = 1/z, with eta(0) = +inf and eta(+inf) = 0."""


@dataclass(frozen=True)
class EtaTable:
    """Right-continuous non-increasing step function.

    ``initial`` holds below the first breakpoint; ``steps`` holds pairs
    (z_i, value_i) meaning eta(z) = value_i on [z_i, z_{i+1}).
    """

    initial: float
    steps: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        steps = tuple((float(z), float(v)) for z, v in self.steps)
        object.__setattr__(self, "steps", steps)
        values = [float(self.initial)] + [v for _, v in steps]
        for v in values:
            if math.isnan(v) or v < 0:
                raise ValueError("eta values must be in [0, +inf]")
        for a, b in zip(values, values[1:]):
            if b > a:
                raise ValueError("eta must be non-increasing")
        breaks = [z for z, _ in steps]
        if any(math.isnan(z) or z < 0 or math.isinf(z) for z in breaks):
            raise ValueError("eta breakpoints must be finite and >= 0")
        if any(b >= c for b, c in zip(breaks, breaks[1:])):
            raise ValueError("eta breakpoints must be strictly increasing")


EtaSpec = EtaReciprocal | EtaTable


def eta_value(eta: EtaSpec, z: float) -> float:
    if math.isnan(z) or z < 0:
        raise ValueError(f"eta is defined on [0, +inf], got {z!r}")
    if isinstance(eta, EtaReciprocal):
        if z == 0:
            return math.inf
        if math.isinf(z):
            return 0.0
        return 1.0 / z
    value = eta.initial
    for breakpoint, step in eta.steps:
        if z >= breakpoint:
            value = step
        else:
            break
    return value


@dataclass(frozen=True)
class NonExcisive:
    invariant: InvariantSpec
    eta: EtaSpec


FlatScheme = Rips | RipsStrict | Representable | Clique | NonExcisive


def triangle_with_center(delta: float) -> FiniteMetricSpace:
    """Equilateral triangle of side delta plus its midpoint, which sits
    at the circumradius delta/sqrt(3) from each corner."""
    if not delta > 0:
        raise ValueError("side length must be positive")
    r = delta / math.sqrt(3.0)
    labels = ("v1", "v2", "v3", "c")
    dist = (
        (0.0, delta, delta, r),
        (delta, 0.0, delta, r),
        (delta, delta, 0.0, r),
        (r, r, r, 0.0),
    )
    return FiniteMetricSpace(labels, dist)


def _pair_graph_components(
    space: FiniteMetricSpace, has_edge: Callable[[str, str], bool]
) -> Partition:
    labels = space.labels
    parent = {lab: lab for lab in labels}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(labels)):
        for j in range(i + 1, len(labels)):
            a, b = labels[i], labels[j]
            if find(a) != find(b) and has_edge(a, b):
                parent[find(a)] = find(b)
    groups: dict[str, list[str]] = {}
    for lab in labels:
        groups.setdefault(find(lab), []).append(lab)
    return Partition(labels, tuple(tuple(g) for g in groups.values()))


def cluster_flat(
    scheme: FlatScheme, space: FiniteMetricSpace, *, force: bool = False
) -> Partition:
    """Apply a flat scheme to a space."""
    if isinstance(scheme, Rips):
        return components_at_scale(space, scheme.delta)
    if isinstance(scheme, RipsStrict):
        return components_at_scale(space, scheme.delta, strict=True)
    if isinstance(scheme, Representable):
        motifs = scheme.motifs
        # covering a pair at some factor <= 1 is the same as covering it
        # with the unscaled motif: shrinking only tightens the distance
        # bound, so the unscaled test decides both the plain family and
        # its scalable closure
        def covered(a: str, b: str) -> bool:
            return any(
                exists_morphism(om, space, motifs.tag, pinned=(a, b), force=force)
                is not None
                for om in motifs.motifs
            )

        return _pair_graph_components(space, covered)
    if isinstance(scheme, Clique):
        m, delta = scheme.m, scheme.delta
        n = len(space)
        if not force and (n > CLIQUE_MAX_POINTS or m > CLIQUE_MAX_SIZE):
            raise MotifSizeError(
                f"clique scan on {n} points with m={m} exceeds the guard "
                f"({CLIQUE_MAX_POINTS} points, m \N{LESS-THAN OR EQUAL TO} {CLIQUE_MAX_SIZE}); pass force=True"
            )
        if m > n:
            return singletons_partition(space.labels)
        dist = space.dist
        index = space._index

        def close(i: int, j: int) -> bool:
            return dist[i][j] <= delta

        def covered(a: str, b: str) -> bool:
            i, j = index[a], index[b]
            if not close(i, j):
                return False
            if m == 2:
                return True
            rest = [
                k
                for k in range(n)
                if k not in (i, j) and close(k, i) and close(k, j)
            ]
            return any(
                all(close(p, q) for p, q in combinations(extra, 2))
                for extra in combinations(rest, m - 2)
            )

        return _pair_graph_components(space, covered)
    if isinstance(scheme, NonExcisive):
        level = eta_value(scheme.eta, evaluate_invariant(scheme.invariant, space))
        return components_at_scale(space, level)
    raise TypeError(f"not a flat scheme: {scheme!r}")


def one_block_scheme(space: FiniteMetricSpace) -> Partition:
    """The everything-in-one-block functor."""
    return one_block_partition(space.labels)


def singletons_scheme(space: FiniteMetricSpace) -> Partition:
    """The all-singletons functor."""
    return singletons_partition(space.labels)


def motif_metric_transform(
    space: FiniteMetricSpace, motifs: MotifSet, *, force: bool = False
) -> FiniteMetricSpace:
    """Replace each distance with the least blow-up factor at which some
    motif covers the pair, floored to its largest ultrametric minorant.

    The pair weight is +inf when no factor works (for instance when the
    space has fewer points than every motif).  Requires a scalable motif
    family, since the factor search ranges over all rescalings.
    """
    if not motifs.scalable:
        raise ValueError("the motif transform needs a scalable motif family")
    labels = space.labels
    n = len(labels)
    weight = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            value = min(
                minimal_scale(
                    om, space, motifs.tag, pinned=(labels[i], labels[j]), force=force
                )
                for om in motifs.motifs
            )
            weight[i][j] = weight[j][i] = value
    floored = subdominant_ultrametric(weight)
    has_zero = any(floored[i][j] == 0 for i in range(n) for j in range(i + 1, n))
    has_inf = any(math.isinf(floored[i][j]) for i in range(n) for j in range(i + 1, n))
    return FiniteMetricSpace(
        labels, floored, pseudometric=has_zero, allow_infinite=has_inf
    )


def factorize_check(
    motifs: MotifSet, space: FiniteMetricSpace, *, force: bool = False
) -> bool:
    """Compare clustering through the pair graph against thresholding the
    motif transform at factor 1.  The two routes share no code beyond the
    morphism search, so agreement is informative."""
    direct = cluster_flat(Representable(motifs), space, force=force)
    transformed = motif_metric_transform(space, motifs, force=force)
    return direct == components_at_scale(transformed, 1.0)


def is_excisive_on(
    scheme: FlatScheme, space: FiniteMetricSpace, *, force: bool = False
) -> CheckResult:
    """Re-cluster each output block on its own; the witness is the first
    block that fails to come back in one piece."""
    partition = cluster_flat(scheme, space, force=force)
    for block in partition.blocks:
        again = cluster_flat(scheme, restrict(space, block), force=force)
        if not again.is_single_block:
            return CheckResult(False, block)
    return CheckResult(True)


def richness_witness(partition: Partition, delta: float, alpha: float) -> FiniteMetricSpace:
    """Ultrametric space whose chaining components at scale delta realise
    the given partition: distance delta inside blocks, alpha*delta across."""
    if not delta > 0:
        raise ValueError("within-block distance must be positive")
    if not alpha > 1:
        raise ValueError("cross-block stretch must exceed 1")
    labels = partition.ground
    n = len(labels)
    far = alpha * delta
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            same = partition._block_of[labels[i]] == partition._block_of[labels[j]]
            dist[i][j] = dist[j][i] = delta if same else far
    return FiniteMetricSpace(labels, tuple(tuple(r) for r in dist))


def scale_invariance_probe(
    scheme: FlatScheme | Callable[[FiniteMetricSpace], Partition],
    corpus: Iterable[FiniteMetricSpace],
    lambdas: Iterable[float],
    *,
    k_max: int = 6,
    force: bool = False,
) -> dict:
    """Test a scheme for invariance under rescaling, and when it is
    invariant, verify the collapse pattern that invariance forces.

    The pattern is keyed by the set K of sizes k for which the scheme
    puts k equidistant points in one piece: with K empty every probed
    space (of size up to k_max, past which K is not known) must come
    back as singletons; otherwise spaces with at least min(K) points
    come back in one piece and smaller ones as singletons.
    """
    if callable(scheme) and not isinstance(scheme, FlatScheme):
        cluster = scheme
    else:
        cluster = lambda x: cluster_flat(scheme, x, force=force)  # noqa: E731
    corpus = list(corpus)
    lambdas = list(lambdas)
    witnesses = []
    for index, x in enumerate(corpus):
        base = cluster(x)
        for lam in lambdas:
            rescaled = cluster(scale_space(x, lam))
            if rescaled != base:
                witnesses.append(
                    {
                        "index": index,
                        "factor": lam,
                        "blocks": [list(b) for b in base.blocks],
                        "rescaled_blocks": [list(b) for b in rescaled.blocks],
                    }
                )
    report: dict = {"scale_invariant": not witnesses, "witnesses": witnesses}
    if witnesses:
        return report
    one_piece = [
        k for k in range(2, k_max + 1) if cluster(equilateral_space(k, 1.0)).is_single_block
    ]
    report["one_piece_cardinalities"] = one_piece
    pattern = []
    cutoff = min(one_piece) if one_piece else None
    for index, x in enumerate(corpus):
        n = len(x)
        if n < 2:
            continue
        if cutoff is None:
            if n > k_max:
                continue
            expect_one = False
        else:
            expect_one = n >= cutoff
        got = cluster(x)
        good = got.is_single_block if expect_one else got.is_discrete
        if not good:
            pattern.append({"index": index, "size": n, "blocks": [list(b) for b in got.blocks]})
    report["collapse_pattern_violations"] = pattern
    return report
