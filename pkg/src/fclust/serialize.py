"""JSON and DOT forms of every domain object.

Numbers are written with Python's shortest-round-trip float formatting,
and +infinity travels as the string ``"inf"`` (JSON has no spelling for
it).  Dumps are canonical — sorted keys, two-space indent, trailing
newline — so identical values always produce identical bytes.
"""

from __future__ import annotations

import json
import math
from typing import Any, Mapping

from .category import CategoryTag, MetricMap
from .flat import (
    Clique,
    EtaReciprocal,
    EtaSpec,
    EtaTable,
    FlatScheme,
    MotifSet,
    NonExcisive,
    Representable,
    Rips,
    RipsStrict,
)
from .hierarchical import PersistentSet
from .invariants import BASES, InvariantSpec
from .metric import FiniteMetricSpace, Partition

__all__ = [
    "dumps_canonical",
    "space_to_obj",
    "obj_to_space",
    "partition_to_obj",
    "obj_to_partition",
    "persistent_to_obj",
    "obj_to_persistent",
    "morphism_to_obj",
    "obj_to_morphism",
    "invariant_to_obj",
    "obj_to_invariant",
    "scheme_to_obj",
    "obj_to_scheme",
    "persistent_to_dot",
]


def _enc(value: Any) -> Any:
    """Make a tree JSON-ready: tuples to lists, +inf to \"inf\"."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            if value < 0:
                raise ValueError("-inf has no serialized form")
            return "inf"
        if math.isnan(value):
            raise ValueError("NaN has no serialized form")
        return value
    if isinstance(value, Mapping):
        return {str(k): _enc(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_enc(v) for v in value]
    raise ValueError(f"cannot serialize {type(value).__name__}")


def dumps_canonical(obj: Any) -> str:
    return json.dumps(_enc(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _num(value: Any, what: str) -> float:
    if value == "inf":
        return math.inf
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{what} must be a number or \"inf\", got {value!r}")
    return float(value)


def _str_list(value: Any, what: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(x, str) for x in value):
        raise ValueError(f"{what} must be a list of strings")
    return tuple(value)


def _require(obj: Any, what: str) -> dict:
    if not isinstance(obj, dict):
        raise ValueError(f"{what} must be a JSON object, got {type(obj).__name__}")
    return obj


# -- metric spaces ----------------------------------------------------------


def space_to_obj(space: FiniteMetricSpace) -> dict:
    return {
        "labels": list(space.labels),
        "dist": [list(row) for row in space.dist],
        "pseudometric": space.pseudometric,
    }


def obj_to_space(obj: Any, *, pseudometric: bool | None = None) -> FiniteMetricSpace:
    """Rebuild and re-validate a space; ``pseudometric`` overrides the file."""
    obj = _require(obj, "metric space")
    labels = _str_list(obj.get("labels"), "labels")
    raw = obj.get("dist")
    if not isinstance(raw, list) or not all(isinstance(row, list) for row in raw):
        raise ValueError("dist must be a table (list of rows)")
    dist = tuple(
        tuple(_num(v, f"dist[{i}][{j}]") for j, v in enumerate(row))
        for i, row in enumerate(raw)
    )
    flag = obj.get("pseudometric", False) if pseudometric is None else pseudometric
    if not isinstance(flag, bool):
        raise ValueError("pseudometric must be a boolean")
    allow_inf = any(math.isinf(v) for row in dist for v in row)
    return FiniteMetricSpace(labels, dist, pseudometric=flag, allow_infinite=allow_inf)


# -- partitions and persistent sets -----------------------------------------


def partition_to_obj(partition: Partition) -> dict:
    return {
        "ground": list(partition.ground),
        "blocks": [list(b) for b in partition.blocks],
    }


def obj_to_partition(obj: Any) -> Partition:
    obj = _require(obj, "partition")
    ground = _str_list(obj.get("ground"), "ground")
    raw = obj.get("blocks")
    if not isinstance(raw, list):
        raise ValueError("blocks must be a list of lists")
    blocks = tuple(_str_list(b, "each block") for b in raw)
    return Partition(ground, blocks)


def persistent_to_obj(theta: PersistentSet) -> dict:
    starts = (0.0, *theta.breakpoints)
    return {
        "ground": list(theta.ground),
        "levels": [
            {"from": start, "partition": partition_to_obj(p)}
            for start, p in zip(starts, theta.partitions)
        ],
    }


def obj_to_persistent(obj: Any) -> PersistentSet:
    obj = _require(obj, "persistent set")
    ground = _str_list(obj.get("ground"), "ground")
    levels = obj.get("levels")
    if not isinstance(levels, list) or not levels:
        raise ValueError("levels must be a non-empty list")
    starts = []
    partitions = []
    for i, level in enumerate(levels):
        level = _require(level, f"levels[{i}]")
        starts.append(_num(level.get("from"), f"levels[{i}].from"))
        partitions.append(obj_to_partition(level.get("partition")))
    if starts[0] != 0.0:
        raise ValueError("the first level must start at 0")
    return PersistentSet(ground, tuple(starts[1:]), tuple(partitions))


# -- morphisms ---------------------------------------------------------------


def morphism_to_obj(f: MetricMap) -> dict:
    return {
        "source": space_to_obj(f.source),
        "target": space_to_obj(f.target),
        "assignment": dict(f.assignment),
    }


def obj_to_morphism(obj: Any) -> MetricMap:
    obj = _require(obj, "morphism")
    source = obj_to_space(obj.get("source"))
    target = obj_to_space(obj.get("target"))
    raw = _require(obj.get("assignment"), "assignment")
    assignment = {}
    for k, v in raw.items():
        if not isinstance(v, str):
            raise ValueError("assignment values must be labels")
        assignment[str(k)] = v
    return MetricMap(source, target, assignment)


# -- invariant specs ---------------------------------------------------------


def invariant_to_obj(spec: InvariantSpec) -> dict:
    out: dict[str, Any] = {"kind": spec.kind}
    if spec.kind in ("k_minus", "k_plus"):
        out["k"] = spec.k
    elif spec.kind in ("omega_minus", "omega_plus"):
        out["motifs"] = [space_to_obj(m) for m in spec.motifs]
        out["base"] = spec.base
    elif spec.kind == "cardinality":
        out["table"] = list(spec.zeta)
        out["tail"] = spec.tail
    return out


def obj_to_invariant(obj: Any) -> InvariantSpec:
    obj = _require(obj, "invariant spec")
    kind = obj.get("kind")
    if kind == "separation":
        return InvariantSpec("separation")
    if kind in ("k_minus", "k_plus"):
        k = obj.get("k")
        if not isinstance(k, int) or isinstance(k, bool):
            raise ValueError("k must be an integer")
        return InvariantSpec(kind, k=k)
    if kind in ("omega_minus", "omega_plus"):
        raw = obj.get("motifs")
        if not isinstance(raw, list) or not raw:
            raise ValueError("motifs must be a non-empty list of metric spaces")
        base = obj.get("base", "separation")
        if base not in BASES:
            raise ValueError(f"base must be one of {BASES}")
        return InvariantSpec(
            kind, motifs=tuple(obj_to_space(m) for m in raw), base=base
        )
    if kind == "cardinality":
        raw = obj.get("table")
        if not isinstance(raw, list):
            raise ValueError("table must be a list of values")
        table = tuple(_num(v, f"table[{i}]") for i, v in enumerate(raw))
        tail = _num(obj.get("tail", 0.0), "tail")
        return InvariantSpec("cardinality", zeta=table, tail=tail)
    raise ValueError(f"unknown invariant kind {kind!r}")


# -- flat scheme specs --------------------------------------------------------


def _eta_to_obj(eta: EtaSpec) -> dict:
    if isinstance(eta, EtaReciprocal):
        return {"kind": "reciprocal"}
    return {
        "kind": "table",
        "initial": eta.initial,
        "steps": [[z, v] for z, v in eta.steps],
    }


def _obj_to_eta(obj: Any) -> EtaSpec:
    obj = _require(obj, "eta spec")
    kind = obj.get("kind")
    if kind == "reciprocal":
        return EtaReciprocal()
    if kind == "table":
        raw = obj.get("steps", [])
        if not isinstance(raw, list):
            raise ValueError("steps must be a list of [threshold, value] pairs")
        steps = []
        for i, pair in enumerate(raw):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ValueError("steps must be a list of [threshold, value] pairs")
            steps.append(
                (_num(pair[0], f"steps[{i}][0]"), _num(pair[1], f"steps[{i}][1]"))
            )
        return EtaTable(_num(obj.get("initial"), "initial"), tuple(steps))
    raise ValueError(f"unknown eta kind {kind!r}")


def scheme_to_obj(scheme: FlatScheme) -> dict:
    if isinstance(scheme, Rips):
        return {"kind": "rips", "delta": scheme.delta}
    if isinstance(scheme, RipsStrict):
        return {"kind": "rips_strict", "delta": scheme.delta}
    if isinstance(scheme, Clique):
        return {"kind": "clique", "m": scheme.m, "delta": scheme.delta}
    if isinstance(scheme, Representable):
        return {
            "kind": "representable",
            "motifs": [space_to_obj(m) for m in scheme.motifs.motifs],
            "tag": scheme.motifs.tag.value,
            "scalable": scheme.motifs.scalable,
        }
    if isinstance(scheme, NonExcisive):
        return {
            "kind": "nonexcisive",
            "invariant": invariant_to_obj(scheme.invariant),
            "eta": _eta_to_obj(scheme.eta),
        }
    raise ValueError(f"cannot serialize scheme {scheme!r}")


def obj_to_scheme(obj: Any) -> FlatScheme:
    obj = _require(obj, "scheme spec")
    kind = obj.get("kind")
    if kind == "rips":
        return Rips(_num(obj.get("delta"), "delta"))
    if kind == "rips_strict":
        return RipsStrict(_num(obj.get("delta"), "delta"))
    if kind == "clique":
        m = obj.get("m")
        if not isinstance(m, int) or isinstance(m, bool):
            raise ValueError("m must be an integer")
        return Clique(m, _num(obj.get("delta"), "delta"))
    if kind == "representable":
        raw = obj.get("motifs")
        if not isinstance(raw, list) or not raw:
            raise ValueError("motifs must be a non-empty list of metric spaces")
        tag_value = obj.get("tag", "inj")
        try:
            tag = CategoryTag(tag_value)
        except ValueError:
            raise ValueError(f"unknown category tag {tag_value!r}") from None
        scalable = obj.get("scalable", False)
        if not isinstance(scalable, bool):
            raise ValueError("scalable must be a boolean")
        motifs = MotifSet(
            tuple(obj_to_space(m) for m in raw), tag, scalable=scalable
        )
        return Representable(motifs)
    if kind == "nonexcisive":
        return NonExcisive(
            obj_to_invariant(obj.get("invariant")), _obj_to_eta(obj.get("eta"))
        )
    raise ValueError(f"unknown scheme kind {kind!r}")


# -- DOT export ---------------------------------------------------------------


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dot_number(x: float) -> str:
    return "inf" if math.isinf(x) else repr(x)


def persistent_to_dot(theta: PersistentSet) -> str:
    """The merge tree, one box per block, edges from finer into coarser.

    Every block ever formed becomes a node carrying the scale at which it
    appeared (``merged_at``); an edge joins each block to the block it sits
    inside at the next level where its surroundings change.
    """
    lines = [
        "digraph mergetree {",
        "  rankdir=BT;",
        "  node [shape=box, fontname=\"Helvetica\"];",
    ]
    starts = (0.0, *theta.breakpoints)
    node_of: dict[tuple[str, ...], str] = {}
    owner: dict[str, str] = {}
    counter = 0
    for start, partition in zip(starts, theta.partitions):
        for block in partition.blocks:
            if block in node_of:
                continue
            name = f"b{counter}"
            counter += 1
            label = "{" + ",".join(block) + "}"
            lines.append(
                f"  {name} [label={_dot_quote(label)}, merged_at={_dot_quote(_dot_number(start))}];"
            )
            children = sorted({owner[x] for x in block if x in owner})
            for child in children:
                lines.append(f"  {child} -> {name};")
            node_of[block] = name
            for x in block:
                owner[x] = name
    lines.append("}")
    return "\n".join(lines) + "\n"
