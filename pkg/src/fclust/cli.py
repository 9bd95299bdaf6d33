"""Command-line front end.

Subcommands:

* ``cluster``    flat clustering of a metric-space file under a scheme spec
* ``hclust``     scale-indexed clustering (linkage, trimming, or group chaining)
* ``transform``  the motif reweighting of a space under a scalable family
* ``invariant``  evaluate an invariant spec on a space
* ``check``      run seeded probes; violations set the exit status
* ``convert``    re-emit a file canonically, or as DOT for persistent sets

Exit status: 0 success, 1 probe violations, 2 usage errors, 3 invalid data.
Spec-valued flags accept either inline JSON (anything starting with ``{``)
or a path to a JSON file.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from typing import Any

from .flat import Representable, cluster_flat, motif_metric_transform
from .harness import PROBES, run_probe
from .hierarchical import (
    Linkage,
    agglomerative,
    clique_hierarchy,
    single_linkage,
    trim_hierarchy,
)
from .invariants import evaluate_invariant
from .metric import FiniteMetricSpace, MetricError
from .serialize import (
    dumps_canonical,
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
    space_to_obj,
)

USAGE_ERROR = 2
DATA_ERROR = 3


def _load_doc(text_or_path: str) -> Any:
    """Inline JSON when the argument starts with '{', else a file path."""
    if text_or_path.lstrip().startswith("{"):
        return json.loads(text_or_path)
    with open(text_or_path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_space(args: argparse.Namespace) -> FiniteMetricSpace:
    override = True if getattr(args, "pseudometric", False) else None
    return obj_to_space(_load_doc(args.input), pseudometric=override)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _cmd_cluster(args: argparse.Namespace) -> int:
    scheme = obj_to_scheme(_load_doc(args.scheme))
    space = _load_space(args)
    partition = cluster_flat(scheme, space, force=args.force)
    _emit(dumps_canonical(partition_to_obj(partition)), args.output)
    return 0


def _build_hierarchy(args: argparse.Namespace, space: FiniteMetricSpace):
    chosen = [
        name
        for name, value in (
            ("--linkage", args.linkage != "single"),
            ("--trim", args.trim is not None),
            ("--motif", args.motif is not None),
        )
        if value
    ]
    if len(chosen) > 1:
        raise _Usage(f"{' and '.join(chosen)} cannot be combined")
    if args.trim is not None:
        return trim_hierarchy(space, args.trim)
    if args.motif is not None:
        return clique_hierarchy(space, args.motif, force=args.force)
    if args.linkage == "single":
        return single_linkage(space)
    return agglomerative(space, Linkage(args.linkage))


def _cmd_hclust(args: argparse.Namespace) -> int:
    space = _load_space(args)
    theta = _build_hierarchy(args, space)
    if args.format == "dot":
        _emit(persistent_to_dot(theta), args.output)
    else:
        _emit(dumps_canonical(persistent_to_obj(theta)), args.output)
    if args.render is not None:
        from .plotting import render_dendrogram

        render_dendrogram(theta, args.render)
    return 0


def _cmd_transform(args: argparse.Namespace) -> int:
    scheme = obj_to_scheme(_load_doc(args.scheme))
    if not isinstance(scheme, Representable):
        raise ValueError("transform needs a representable scheme spec")
    space = _load_space(args)
    out = motif_metric_transform(space, scheme.motifs, force=args.force)
    _emit(dumps_canonical(space_to_obj(out)), args.output)
    return 0


def _cmd_invariant(args: argparse.Namespace) -> int:
    spec = obj_to_invariant(_load_doc(args.spec))
    space = _load_space(args)
    value = evaluate_invariant(spec, space)
    text = "inf" if math.isinf(value) else repr(value)
    _emit(text + "\n", args.output)
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    names = list(PROBES) if args.probe.upper() == "ALL" else [args.probe]
    reports = [run_probe(p, seed=args.seed, trials=args.trials) for p in names]
    payload = reports[0] if len(reports) == 1 else reports
    _emit(dumps_canonical(payload), args.output)
    if args.figures is not None:
        os.makedirs(args.figures, exist_ok=True)
        with open(
            os.path.join(args.figures, "summary.csv"), "w", encoding="utf-8", newline=""
        ) as fh:
            writer = csv.writer(fh)
            writer.writerow(["probe", "trials", "violations"])
            for report in reports:
                writer.writerow(
                    [report["probe"], report["trials"], len(report["violations"])]
                )
        from .plotting import render_probe_summary

        render_probe_summary(reports, os.path.join(args.figures, "summary.png"))
    return 1 if any(r["violations"] for r in reports) else 0


def _detect(obj: Any):
    if not isinstance(obj, dict):
        raise ValueError("input must be a JSON object")
    if "dist" in obj:
        return "space", obj_to_space(obj)
    if "levels" in obj:
        return "persistent", obj_to_persistent(obj)
    if "blocks" in obj:
        return "partition", obj_to_partition(obj)
    if "assignment" in obj:
        return "morphism", obj_to_morphism(obj)
    raise ValueError("unrecognized file contents (not a space, partition, "
                     "persistent set, or morphism)")


def _cmd_convert(args: argparse.Namespace) -> int:
    kind, value = _detect(_load_doc(args.input))
    if args.format == "dot":
        if kind != "persistent":
            raise ValueError("DOT output is defined for persistent sets only")
        _emit(persistent_to_dot(value), args.output)
        return 0
    back = {
        "space": space_to_obj,
        "persistent": persistent_to_obj,
        "partition": partition_to_obj,
        "morphism": morphism_to_obj,
    }[kind](value)
    _emit(dumps_canonical(back), args.output)
    return 0


class _Usage(Exception):
    """A flag combination argparse cannot express on its own."""


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fclust",
        description="Clustering functors on finite metric spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, scheme: bool = False) -> None:
        p.add_argument("--input", required=True, help="metric-space JSON file")
        p.add_argument("--output", help="write here instead of standard output")
        p.add_argument("--force", action="store_true", help="lift complexity guards")
        p.add_argument(
            "--pseudometric",
            action="store_true",
            help="accept zero distances between distinct points",
        )
        if scheme:
            p.add_argument(
                "--scheme", required=True, help="scheme spec (inline JSON or path)"
            )

    p = sub.add_parser("cluster", help="flat clustering under a scheme")
    common(p, scheme=True)
    p.set_defaults(fn=_cmd_cluster)

    p = sub.add_parser("hclust", help="clustering at every scale")
    common(p)
    p.add_argument(
        "--linkage",
        choices=[k.value for k in Linkage],
        default="single",
        help="block-merging rule (default: single)",
    )
    p.add_argument("--trim", type=int, help="single linkage, blocks under M shatter")
    p.add_argument("--motif", type=int, help="chain through equilateral M-point groups")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.add_argument("--render", help="also draw the dendrogram to this PNG file")
    p.set_defaults(fn=_cmd_hclust)

    p = sub.add_parser("transform", help="motif reweighting of a space")
    common(p, scheme=True)
    p.set_defaults(fn=_cmd_transform)

    p = sub.add_parser("invariant", help="evaluate an invariant on a space")
    common(p)
    p.add_argument("--spec", required=True, help="invariant spec (inline JSON or path)")
    p.set_defaults(fn=_cmd_invariant)

    p = sub.add_parser("check", help="run seeded probes")
    p.add_argument(
        "--probe",
        required=True,
        help="one of %s, or ALL" % ", ".join(PROBES),
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, help="override the probe's default size")
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument(
        "--figures",
        help="directory for summary.csv and summary.png alongside the report",
    )
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("convert", help="canonical re-emission / DOT export")
    p.add_argument("--input", required=True)
    p.add_argument("--output")
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(fn=_cmd_convert)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as stop:
        return int(stop.code or 0)
    try:
        return args.fn(args)
    except _Usage as err:
        print(f"usage error: {err}", file=sys.stderr)
        return USAGE_ERROR
    except (MetricError, ValueError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return DATA_ERROR
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
