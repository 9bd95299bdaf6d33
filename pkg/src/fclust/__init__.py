"""Scale-indexed clustering of finite metric spaces.

The package provides finite metric spaces and partitions, the three
morphism classes between spaces (isometries, injective distance
non-increasing maps, and all distance non-increasing maps), flat and
hierarchical clustering schemes built from motif morphisms, invariants
that respect those morphisms, a randomized probe harness, and a CLI.
"""

from fclust.category import (
    DEFAULT_MOTIF_LIMIT,
    CategoryTag,
    CheckResult,
    MetricMap,
    MotifSizeError,
    compose,
    exists_morphism,
    identity_map,
    is_morphism,
    minimal_scale,
)
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
from fclust.hierarchical import (
    Linkage,
    PersistentSet,
    agglomerative,
    clique_hierarchy,
    dendrogram_to_ultrametric,
    is_persistence_preserving,
    scale_persistent,
    single_linkage,
    trim_hierarchy,
)
from fclust.invariants import (
    InvariantSpec,
    cardinality_invariant,
    check_invariant_monotone,
    evaluate_invariant,
    k_minus,
    k_plus,
    omega_minus,
    omega_plus,
    separation_invariant,
)
from fclust.metric import (
    FiniteMetricSpace,
    MetricError,
    Partition,
    components_at_scale,
    diameter,
    distance_values,
    equilateral_space,
    one_block_partition,
    pullback_partition,
    quotient_at_scale,
    restrict,
    scale_space,
    separation,
    singletons_partition,
    subdominant_ultrametric,
    validate_metric,
)
from fclust.serialize import (
    dumps_canonical,
    invariant_to_obj,
    morphism_to_obj,
    obj_to_invariant,
    obj_to_morphism,
    obj_to_partition,
    obj_to_persistent,
    obj_to_scheme,
    obj_to_space,
    partition_to_obj,
    persistent_to_dot,
    persistent_to_obj,
    scheme_to_obj,
    space_to_obj,
)

__all__ = [
    # metric
    "FiniteMetricSpace",
    "MetricError",
    "Partition",
    "components_at_scale",
    "diameter",
    "distance_values",
    "equilateral_space",
    "one_block_partition",
    "pullback_partition",
    "quotient_at_scale",
    "restrict",
    "scale_space",
    "separation",
    "singletons_partition",
    "subdominant_ultrametric",
    "validate_metric",
    # category
    "CategoryTag",
    "CheckResult",
    "DEFAULT_MOTIF_LIMIT",
    "MetricMap",
    "MotifSizeError",
    "compose",
    "exists_morphism",
    "identity_map",
    "is_morphism",
    "minimal_scale",
    # invariants
    "InvariantSpec",
    "cardinality_invariant",
    "check_invariant_monotone",
    "evaluate_invariant",
    "k_minus",
    "k_plus",
    "omega_minus",
    "omega_plus",
    "separation_invariant",
    # flat
    "Clique",
    "EtaReciprocal",
    "EtaTable",
    "MotifSet",
    "NonExcisive",
    "Representable",
    "Rips",
    "RipsStrict",
    "cluster_flat",
    "eta_value",
    "factorize_check",
    "is_excisive_on",
    "motif_metric_transform",
    "one_block_scheme",
    "richness_witness",
    "scale_invariance_probe",
    "singletons_scheme",
    "triangle_with_center",
    # hierarchical
    "Linkage",
    "PersistentSet",
    "agglomerative",
    "clique_hierarchy",
    "dendrogram_to_ultrametric",
    "is_persistence_preserving",
    "scale_persistent",
    "single_linkage",
    "trim_hierarchy",
    # harness
    "PROBES",
    "CorpusModel",
    "CorpusSpec",
    "MorphismCorpusSpec",
    "MorphismModel",
    "SplitMix64",
    "generate_corpus",
    "generate_morphisms",
    "random_dendrogram",
    "run_probe",
    # serialization
    "dumps_canonical",
    "invariant_to_obj",
    "morphism_to_obj",
    "obj_to_invariant",
    "obj_to_morphism",
    "obj_to_partition",
    "obj_to_persistent",
    "obj_to_scheme",
    "obj_to_space",
    "partition_to_obj",
    "persistent_to_dot",
    "persistent_to_obj",
    "scheme_to_obj",
    "space_to_obj",
]
