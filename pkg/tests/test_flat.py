"""Flat schemes: chaining, pair-graph clustering, the motif transform."""

from __future__ import annotations

import math
import random

import pytest

from fclust.category import CategoryTag, MetricMap, MotifSizeError, is_morphism
from fclust.flat import (
    Clique,
    EtaReciprocal,
    EtaTable,
    MotifSet,
    NonExcisive,
    Representable,
    Rips,
    RipsStrict,
    cluster_flat,
    eta_value,
    factorize_check,
    is_excisive_on,
    motif_metric_transform,
    one_block_scheme,
    richness_witness,
    scale_invariance_probe,
    singletons_scheme,
    triangle_with_center,
)
from fclust.invariants import k_minus, separation_invariant
from fclust.metric import (
    Partition,
    components_at_scale,
    distance_values,
    equilateral_space,
    pullback_partition,
    restrict,
    scale_space,
    separation,
    subdominant_ultrametric,
)
from helpers import space_from_edges, space_from_points
from test_metric import random_space

INJ, GEN = CategoryTag.INJ, CategoryTag.GEN


def pair_motifs(delta: float, *, scalable: bool = False) -> MotifSet:
    return MotifSet((equilateral_space(2, delta),), INJ, scalable=scalable)


def five_point_two_cluster_space():
    """Two groups far apart: a 1-2-3 triangle and a tight pair.

    Separation 1/2; reciprocal eta therefore clusters at scale 2, which
    glues the triangle through its short sides and keeps the groups apart.
    """
    edges = {
        frozenset({"A", "B"}): 2.0,
        frozenset({"A", "C"}): 3.0,
        frozenset({"B", "C"}): 1.0,
        frozenset({"D", "E"}): 0.5,
    }
    for a in ("A", "B", "C"):
        for b in ("D", "E"):
            edges[frozenset({a, b})] = 5.0
    return space_from_edges(("A", "B", "C", "D", "E"), edges)


class TestEta:
    def test_reciprocal(self):
        eta = EtaReciprocal()
        assert eta_value(eta, 2.0) == 0.5
        assert eta_value(eta, 0.0) == math.inf
        assert eta_value(eta, math.inf) == 0.0

    def test_table_steps_are_right_continuous(self):
        eta = EtaTable(initial=5.0, steps=((1.0, 3.0), (2.0, 1.0)))
        assert eta_value(eta, 0.5) == 5.0
        assert eta_value(eta, 1.0) == 3.0
        assert eta_value(eta, 1.999) == 3.0
        assert eta_value(eta, 2.0) == 1.0
        assert eta_value(eta, math.inf) == 1.0

    def test_table_must_be_non_increasing(self):
        with pytest.raises(ValueError):
            EtaTable(initial=1.0, steps=((1.0, 2.0),))
        with pytest.raises(ValueError):
            EtaTable(initial=3.0, steps=((2.0, 2.0), (1.0, 1.0)))

    def test_rejects_negative_argument(self):
        with pytest.raises(ValueError):
            eta_value(EtaReciprocal(), -1.0)


class TestRips:
    def test_threshold_including_boundary(self):
        x = space_from_points([0.0, 1.0, 3.0])
        assert cluster_flat(Rips(1.0), x).blocks == (("p1", "p2"), ("p3",))
        assert cluster_flat(RipsStrict(1.0), x).is_discrete
        assert cluster_flat(RipsStrict(1.0000001), x).blocks == (("p1", "p2"), ("p3",))

    def test_strict_and_plain_differ_exactly_on_the_boundary_pair(self):
        for delta in (0.5, 1.0, 2.0):
            pair = equilateral_space(2, delta)
            plain = cluster_flat(Rips(delta), pair)
            strict = cluster_flat(RipsStrict(delta), pair)
            assert plain.is_single_block and strict.is_discrete

    def test_gen_functorial(self):
        # collapsing maps can only merge blocks, never split them
        rng = random.Random(17)
        for _ in range(20):
            x = random_space(rng.randint(2, 7), rng)
            y, proj = __import__("fclust.metric", fromlist=["quotient_at_scale"]).quotient_at_scale(
                x, rng.choice([0.0] + distance_values(x))
            )
            f = MetricMap(x, y, proj)
            assert is_morphism(f, GEN)
            for delta in distance_values(x):
                fine = cluster_flat(Rips(delta), x)
                coarse = cluster_flat(Rips(delta), y)
                assert fine.refines(pullback_partition(f.assignment, coarse))


class TestRepresentable:
    def test_pair_motif_equals_chaining(self):
        rng = random.Random(23)
        for _ in range(15):
            x = random_space(rng.randint(1, 8), rng)
            for delta in distance_values(x) + [0.25]:
                scheme = Representable(pair_motifs(delta))
                assert cluster_flat(scheme, x) == cluster_flat(Rips(delta), x)

    def test_gen_tag_pair_motif_also_equals_chaining(self):
        rng = random.Random(29)
        for _ in range(10):
            x = random_space(rng.randint(2, 6), rng)
            for delta in distance_values(x):
                scheme = Representable(MotifSet((equilateral_space(2, delta),), GEN))
                assert cluster_flat(scheme, x) == cluster_flat(Rips(delta), x)

    def test_motif_clusters_itself_into_one_block(self):
        for motif in (equilateral_space(3, 2.0), triangle_with_center(1.0)):
            scheme = Representable(MotifSet((motif,), INJ))
            assert cluster_flat(scheme, motif).is_single_block

    def test_morphism_images_land_in_one_block(self):
        from fclust.category import exists_morphism

        rng = random.Random(31)
        scheme_motifs = MotifSet((equilateral_space(3, 1.5),), INJ)
        for _ in range(10):
            x = random_space(rng.randint(3, 7), rng)
            partition = cluster_flat(Representable(scheme_motifs), x)
            found = exists_morphism(scheme_motifs.motifs[0], x, INJ)
            if found is not None:
                image = set(found.assignment.values())
                assert len({partition._block_of[v] for v in image}) == 1

    def test_larger_family_clusters_more_coarsely(self):
        rng = random.Random(37)
        small = MotifSet((equilateral_space(2, 1.0),), INJ)
        large = MotifSet((equilateral_space(2, 1.0), equilateral_space(2, 2.0)), INJ)
        for _ in range(10):
            x = random_space(rng.randint(2, 7), rng)
            assert cluster_flat(Representable(small), x).refines(
                cluster_flat(Representable(large), x)
            )

    def test_matches_clique_scan(self):
        # two independent pair tests: a motif search against a direct
        # subset scan
        rng = random.Random(41)
        for _ in range(12):
            x = random_space(rng.randint(2, 7), rng)
            for m in (2, 3, 4):
                for delta in distance_values(x)[::2]:
                    via_motif = cluster_flat(
                        Representable(MotifSet((equilateral_space(m, delta),), INJ)), x
                    )
                    via_scan = cluster_flat(Clique(m, delta), x)
                    assert via_motif == via_scan, (m, delta)


class TestClique:
    def test_chain_joins_pairwise_but_not_in_triples(self):
        x = space_from_points([0.0, 1.0, 2.0, 3.0, 4.0])
        assert cluster_flat(Clique(2, 1.0), x).is_single_block
        assert cluster_flat(Clique(3, 1.0), x).is_discrete

    def test_triples_join_denser_chains(self):
        x = space_from_points([0.0, 0.5, 1.0, 1.5, 2.0])
        assert cluster_flat(Clique(3, 1.0), x).is_single_block

    def test_small_spaces_fall_apart(self):
        x = equilateral_space(2, 1.0)
        assert cluster_flat(Clique(3, 5.0), x).is_discrete

    def test_guard(self):
        x = random_space(7, random.Random(3))
        with pytest.raises(MotifSizeError):
            cluster_flat(Clique(6, 1.0), x)
        cluster_flat(Clique(6, 1.0), x, force=True)

    def test_rejects_m_below_two(self):
        with pytest.raises(ValueError):
            Clique(1, 1.0)


class TestNonExcisive:
    def test_two_cluster_example(self):
        x = five_point_two_cluster_space()
        assert separation(x) == 0.5
        scheme = NonExcisive(separation_invariant(), EtaReciprocal())
        assert cluster_flat(scheme, x).blocks == (("A", "B", "C"), ("D", "E"))

    def test_restriction_splits_a_block(self):
        x = five_point_two_cluster_space()
        scheme = NonExcisive(separation_invariant(), EtaReciprocal())
        sub = restrict(x, ("A", "B", "C"))
        assert separation(sub) == 1.0
        assert cluster_flat(scheme, sub).blocks == (("A",), ("B", "C"))

    def test_is_excisive_on_reports_the_splitting_block(self):
        x = five_point_two_cluster_space()
        scheme = NonExcisive(separation_invariant(), EtaReciprocal())
        verdict = is_excisive_on(scheme, x)
        assert not verdict
        assert verdict.witness == ("A", "B", "C")

    def test_inj_functorial(self):
        from test_invariants import random_inj_morphism

        rng = random.Random(43)
        scheme = NonExcisive(separation_invariant(), EtaReciprocal())
        for _ in range(25):
            f = random_inj_morphism(rng)
            fine = cluster_flat(scheme, f.source)
            coarse = cluster_flat(scheme, f.target)
            assert fine.refines(pullback_partition(f.assignment, coarse))


class TestExcisive:
    def test_rips_is_excisive(self):
        rng = random.Random(47)
        for _ in range(15):
            x = random_space(rng.randint(1, 7), rng)
            for delta in [0.0] + distance_values(x):
                assert is_excisive_on(Rips(delta), x)

    def test_representable_schemes_are_excisive(self):
        rng = random.Random(53)
        families = [
            pair_motifs(1.0),
            MotifSet((equilateral_space(3, 1.2),), INJ),
            MotifSet((triangle_with_center(1.0),), INJ),
            MotifSet((equilateral_space(3, 1.0), equilateral_space(4, 2.0)), INJ),
        ]
        for _ in range(10):
            x = random_space(rng.randint(1, 6), rng)
            for motifs in families:
                assert is_excisive_on(Representable(motifs), x)

    def test_one_point_block_is_fine(self):
        assert is_excisive_on(Rips(0.5), space_from_points([0.0, 10.0]))


class TestTriangleWithCenter:
    def test_center_sits_at_the_circumradius(self):
        motif = triangle_with_center(3.0)
        assert motif.d("v1", "v2") == 3.0
        assert motif.d("v1", "c") == 3.0 / math.sqrt(3.0)

    def test_is_a_valid_motif(self):
        MotifSet((triangle_with_center(1.0),), INJ, scalable=True)


class TestMotifTransform:
    def test_pair_motif_gives_the_ultrametric_floor(self):
        x = space_from_points([0.0, 1.0, 3.0])
        out = motif_metric_transform(x, pair_motifs(1.0, scalable=True))
        assert out.dist == subdominant_ultrametric(x.dist)

    def test_triple_motif_on_a_triangle_needs_the_diameter(self):
        x = space_from_edges(
            ("A", "B", "C"),
            {
                frozenset({"A", "B"}): 4.0,
                frozenset({"A", "C"}): 3.0,
                frozenset({"B", "C"}): 5.0,
            },
        )
        motifs = MotifSet((equilateral_space(3, 1.0),), INJ, scalable=True)
        out = motif_metric_transform(x, motifs)
        # any injective triple covers the whole space, so every pair
        # needs the factor that stretches the unit triangle over side 5
        assert all(
            out.d(a, b) == 5.0 for a, b in (("A", "B"), ("A", "C"), ("B", "C"))
        )

    def test_too_small_spaces_get_infinite_weights(self):
        x = equilateral_space(2, 1.0)
        motifs = MotifSet((equilateral_space(3, 1.0),), INJ, scalable=True)
        out = motif_metric_transform(x, motifs)
        assert math.isinf(out.d("p1", "p2"))

    def test_requires_scalable_family(self):
        with pytest.raises(ValueError):
            motif_metric_transform(equilateral_space(3), pair_motifs(1.0))

    def test_factorization_on_random_spaces(self):
        rng = random.Random(59)
        families = [
            MotifSet((equilateral_space(2, 1.0),), INJ, scalable=True),
            MotifSet((equilateral_space(3, 1.0),), INJ, scalable=True),
            MotifSet((equilateral_space(3, 1.0), equilateral_space(4, 1.0)), INJ, scalable=True),
            MotifSet((triangle_with_center(1.0),), INJ, scalable=True),
        ]
        for _ in range(12):
            x = random_space(rng.randint(1, 7), rng)
            for motifs in families:
                assert factorize_check(motifs, x)


class TestRichnessWitness:
    def test_realises_the_partition(self):
        p = Partition(("a", "b", "c", "d"), (("a", "b"), ("c",), ("d",)))
        x = richness_witness(p, 1.0, 2.0)
        assert cluster_flat(Rips(1.0), x) == p
        assert x.d("a", "b") == 1.0 and x.d("a", "c") == 2.0

    def test_single_block(self):
        p = Partition(("a", "b"), (("a", "b"),))
        x = richness_witness(p, 0.5, 3.0)
        assert cluster_flat(Rips(0.5), x) == p

    def test_rejects_bad_parameters(self):
        p = Partition(("a",), (("a",),))
        with pytest.raises(ValueError):
            richness_witness(p, 0.0, 2.0)
        with pytest.raises(ValueError):
            richness_witness(p, 1.0, 1.0)


class TestScaleInvarianceProbe:
    def corpus(self):
        rng = random.Random(61)
        return [random_space(rng.randint(2, 6), rng) for _ in range(6)] + [
            equilateral_space(2, 1.0)
        ]

    def test_rips_is_not_scale_invariant(self):
        report = scale_invariance_probe(Rips(1.0), self.corpus(), [3.0])
        assert not report["scale_invariant"]
        assert report["witnesses"]
        first = report["witnesses"][0]
        assert first["blocks"] != first["rescaled_blocks"]

    def test_one_block_scheme_passes_with_full_cardinality_set(self):
        report = scale_invariance_probe(one_block_scheme, self.corpus(), [0.5, 3.0])
        assert report["scale_invariant"]
        assert report["one_piece_cardinalities"] == [2, 3, 4, 5, 6]
        assert report["collapse_pattern_violations"] == []

    def test_singletons_scheme_passes_with_empty_cardinality_set(self):
        report = scale_invariance_probe(singletons_scheme, self.corpus(), [0.5, 3.0])
        assert report["scale_invariant"]
        assert report["one_piece_cardinalities"] == []
        assert report["collapse_pattern_violations"] == []
