"""Seeded generation and the probe battery."""

from __future__ import annotations

import math

import pytest

from fclust.category import CategoryTag, is_morphism
from fclust.harness import (
    PROBES,
    CorpusModel,
    CorpusSpec,
    MorphismCorpusSpec,
    MorphismModel,
    SplitMix64,
    generate_corpus,
    generate_morphisms,
    random_dendrogram,
    run_probe,
)
from fclust.hierarchical import single_linkage
from fclust.metric import subdominant_ultrametric, validate_metric


class TestSplitMix64:
    def test_reference_stream_from_seed_zero(self):
        # first outputs of the published algorithm for seed 0
        rng = SplitMix64(0)
        assert rng.next_u64() == 0xE220A8397B1DCDAF
        assert rng.next_u64() == 0x6E789E6AA1B965F4
        assert rng.next_u64() == 0x06C45D188009454F

    def test_seed_wraps_to_64_bits(self):
        assert SplitMix64(1 << 64).next_u64() == SplitMix64(0).next_u64()

    def test_random_range(self):
        rng = SplitMix64(42)
        values = [rng.random() for _ in range(200)]
        assert all(0.0 <= v < 1.0 for v in values)
        assert len(set(values)) > 190

    def test_randint_bounds_and_determinism(self):
        rng = SplitMix64(7)
        values = [rng.randint(3, 9) for _ in range(100)]
        assert set(values) <= set(range(3, 10))
        again = SplitMix64(7)
        assert values == [again.randint(3, 9) for _ in range(100)]
        with pytest.raises(ValueError):
            rng.randint(5, 4)

    def test_shuffle_and_sample(self):
        rng = SplitMix64(11)
        items = list(range(10))
        rng.shuffle(items)
        assert sorted(items) == list(range(10))
        picked = rng.sample(range(10), 4)
        assert len(picked) == len(set(picked)) == 4
        with pytest.raises(ValueError):
            rng.sample([1, 2], 3)


class TestCorpus:
    def test_deterministic(self):
        spec = CorpusSpec(CorpusModel.EUCLIDEAN_PLANE, 5, 4, seed=9)
        assert generate_corpus(spec) == generate_corpus(spec)

    def test_one_point_plane(self):
        (x,) = generate_corpus(CorpusSpec(CorpusModel.EUCLIDEAN_PLANE, 1, 1, seed=1))
        assert len(x) == 1

    def test_all_models_validate(self):
        for model in CorpusModel:
            for x in generate_corpus(CorpusSpec(model, 6, 5, seed=13)):
                validate_metric(
                    x.labels,
                    x.dist,
                    pseudometric=x.pseudometric,
                    allow_infinite=x.allow_infinite,
                )

    def test_ultrametric_model_is_ultrametric(self):
        for x in generate_corpus(CorpusSpec(CorpusModel.RANDOM_ULTRAMETRIC, 7, 10, seed=17)):
            assert x.dist == subdominant_ultrametric(x.dist)

    def test_graph_metric_hits_the_triangle_exactly_sometimes(self):
        # path sums are exact, so shortest paths through midpoints show up
        found_tight = False
        for x in generate_corpus(CorpusSpec(CorpusModel.GRAPH_METRIC, 7, 10, seed=19)):
            n = len(x)
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        if i != j != k != i:
                            if x.dist[i][j] == x.dist[i][k] + x.dist[k][j]:
                                found_tight = True
        assert found_tight

    def test_rejects_bad_specs(self):
        with pytest.raises(ValueError):
            CorpusSpec(CorpusModel.EUCLIDEAN_PLANE, 0, 1, seed=0)
        with pytest.raises(ValueError):
            CorpusSpec(CorpusModel.EUCLIDEAN_PLANE, 3, 0, seed=0)
        with pytest.raises(ValueError):
            CorpusSpec(CorpusModel.GRAPH_METRIC, 3, 1, seed=0, density=1.5)


class TestMorphisms:
    def pool(self):
        return generate_corpus(CorpusSpec(CorpusModel.GRAPH_METRIC, 6, 6, seed=23))

    def test_quotient_compose_maps_are_gen_valid(self):
        spec = MorphismCorpusSpec(MorphismModel.QUOTIENT_COMPOSE, 30, seed=29)
        assert spec.tag is CategoryTag.GEN
        maps = generate_morphisms(self.pool(), spec)
        assert len(maps) == 30
        assert all(is_morphism(f, CategoryTag.GEN) for f in maps)

    def test_shrink_embed_maps_are_inj_valid(self):
        spec = MorphismCorpusSpec(MorphismModel.SHRINK_EMBED, 30, seed=31)
        assert spec.tag is CategoryTag.INJ
        maps = generate_morphisms(self.pool(), spec)
        assert all(is_morphism(f, CategoryTag.INJ) for f in maps)

    def test_variety(self):
        gen = generate_morphisms(
            self.pool(), MorphismCorpusSpec(MorphismModel.QUOTIENT_COMPOSE, 40, seed=37)
        )
        image_sizes = {len(set(f.assignment.values())) for f in gen}
        assert len(image_sizes) > 1  # collapsing and non-collapsing maps
        inj = generate_morphisms(
            self.pool(), MorphismCorpusSpec(MorphismModel.SHRINK_EMBED, 40, seed=37)
        )
        assert any(len(f.target) > len(f.source) for f in inj)  # proper embeddings
        assert any(len(f.target) == len(f.source) for f in inj)

    def test_deterministic(self):
        spec = MorphismCorpusSpec(MorphismModel.SHRINK_EMBED, 10, seed=41)
        a = generate_morphisms(self.pool(), spec)
        b = generate_morphisms(self.pool(), spec)
        assert [(f.source, f.target, f.assignment) for f in a] == [
            (f.source, f.target, f.assignment) for f in b
        ]


class TestRandomDendrogram:
    def test_single_linkage_realises_it(self):
        rng = SplitMix64(43)
        for _ in range(10):
            theta = random_dendrogram(rng, rng.randint(1, 10))
            assert theta.is_dendrogram


class TestProbes:
    def test_unknown_probe(self):
        with pytest.raises(ValueError):
            run_probe("NO_SUCH_PROBE")
        with pytest.raises(ValueError):
            run_probe("FACTORIZATION", trials=0)

    def test_reports_are_deterministic(self):
        for probe in PROBES:
            a = run_probe(probe, seed=5, trials=4)
            b = run_probe(probe, seed=5, trials=4)
            assert a == b

    def test_report_shape(self):
        report = run_probe("richness_roundtrip", seed=3, trials=5)
        assert report["probe"] == "RICHNESS_ROUNDTRIP"
        assert report["trials"] == 5
        assert report["violations"] == []

    @pytest.mark.parametrize("probe", PROBES)
    def test_all_probes_run_clean(self, probe):
        report = run_probe(probe, seed=12, trials=6)
        assert report["violations"] == [], report["violations"][:3]

    def test_counterexample_details(self):
        report = run_probe("COUNTEREXAMPLES")
        assert report["violations"] == []
        assert report["details"]["complete_witness"] == 3.5
        assert 3.0 < report["details"]["average_witness"] < 4.0
        assert report["details"]["non_excisive_witness"] == ["A", "B", "C"]
