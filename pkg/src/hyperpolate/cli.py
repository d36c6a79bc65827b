"""Command-line front end: classify, search, bench.

Exit codes: 0 success, 2 input error, 3 unsupported geometry, 4 unknown
case.  Query classifications stream as JSON lines; search candidates and
benchmark reports are single JSON documents; grid dumps are CSV.
"""

import argparse
import json
import sys

from . import benchmark
from .errors import (
    HyperpolateError,
    InvalidInputError,
    UnknownCaseError,
    UnsupportedGeometryError,
)
from .expressions import Grammar
from .geometry import HYPERPOLATION, INTERPOLATION, Tolerances, classify, hyperpolation_distance
from .io import read_dataset_csv, read_queries_csv, write_grid_csv, write_json
from .symbolic import candidate_to_dict, search_hyperpolation, tie_sets

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GEOMETRY = 3
EXIT_UNKNOWN_CASE = 4


def _add_common(parser):
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--tol-hull", type=float, dest="tol_hull")
    parser.add_argument("--tol-subspace", type=float, dest="tol_subspace")
    parser.add_argument("--tol-point", type=float, dest="tol_point")
    parser.add_argument("--sigma", type=float, help="dataset noise level")


def _add_search_flags(parser):
    parser.add_argument("--grammar-depth", type=int, dest="grammar_depth")
    parser.add_argument("--max-nodes", type=int, dest="max_nodes")
    parser.add_argument("--budget", type=int)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hyperpolate",
        description="Classify generalisation queries and hyperpolate datasets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="tag query points by regime")
    _add_common(p)
    p.add_argument("--data", required=True, help="dataset CSV (x1,...,xn,f)")
    p.add_argument("--queries", required=True, help="query CSV (x1,...,xn)")
    p.add_argument("--out", help="write JSON lines here instead of stdout")

    p = sub.add_parser("search", help="rank hyperpolation candidates")
    _add_common(p)
    _add_search_flags(p)
    p.add_argument("--data", required=True)
    p.add_argument("--top", type=int, help="truncate after this many candidates, keeping tie sets whole")
    p.add_argument("--out", help="write candidates JSON here instead of stdout")

    p = sub.add_parser("bench", help="run benchmark cases and write reports")
    _add_common(p)
    _add_search_flags(p)
    p.add_argument("case", help="built-in case name, 'all', or a case-spec JSON file")
    p.add_argument("--methods", default="extrusion,nn_ambient,symbolic")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", default=".", help="output directory for report/grid files")
    return parser


def _merge_config(args):
    if not getattr(args, "config", None):
        return args
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    for key, value in config.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, value)
    return args


def _tolerances(args):
    kwargs = {}
    if getattr(args, "tol_point", None) is not None:
        kwargs["point_tol"] = args.tol_point
    if getattr(args, "tol_hull", None) is not None:
        kwargs["hull_tol"] = args.tol_hull
    if getattr(args, "tol_subspace", None) is not None:
        kwargs["subspace_tol"] = args.tol_subspace
    return Tolerances(**kwargs)


def _grammar(args):
    kwargs = {"variables": ("t",)}
    if getattr(args, "max_nodes", None) is not None:
        kwargs["max_nodes"] = args.max_nodes
    if getattr(args, "grammar_depth", None) is not None:
        kwargs["max_depth"] = args.grammar_depth
    return Grammar(**kwargs)


def _emit(text, out_path):
    if out_path:
        from .io import atomic_write_text

        atomic_write_text(out_path, text)
    else:
        sys.stdout.write(text)


def cmd_classify(args):
    data = read_dataset_csv(args.data, noise_sigma=args.sigma or 0.0)
    queries = read_queries_csv(args.queries)
    if queries.size and queries.shape[1] != data.ambient_dim:
        raise InvalidInputError(
            f"queries have dimension {queries.shape[1]}, dataset {data.ambient_dim}"
        )
    tols = _tolerances(args)
    lines = []
    for q in queries:
        regime = classify(q, data, tols=tols)
        record = {
            "point": [float(v) for v in q],
            "regime": regime.tag,
            "distance": hyperpolation_distance(q, data, tol=tols.subspace_tol),
        }
        if regime.tag == INTERPOLATION and regime.weights is not None:
            record["witness"] = [float(w) for w in regime.weights]
        if regime.tag == HYPERPOLATION:
            record["witness"] = regime.residual
        lines.append(json.dumps(record, sort_keys=True))
    _emit("".join(line + "\n" for line in lines), args.out)
    return EXIT_OK


def _truncate_keeping_ties(candidates, top):
    if top is None or top >= len(candidates):
        return candidates
    groups = tie_sets(candidates)
    kept = []
    for group in groups:
        if len(kept) >= top:
            break
        kept.extend(group)  # a tie set is never split
    return kept


def cmd_search(args):
    data = read_dataset_csv(args.data, noise_sigma=args.sigma or 0.0)
    candidates = search_hyperpolation(
        data, grammar=_grammar(args), budget=args.budget
    )
    candidates = _truncate_keeping_ties(candidates, args.top)
    payload = [candidate_to_dict(c) for c in candidates]
    _emit(json.dumps(payload, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _load_case_spec(path):
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        return benchmark.BenchmarkCase(
            name=raw["name"],
            truth=raw["truth"],
            slice_base=tuple(raw["slice_base"]),
            slice_direction=tuple(raw["slice_direction"]),
            sample_params=tuple(raw["sample_params"]),
            noise_sigma=raw.get("noise_sigma", 0.0),
            seed=raw.get("seed", 0),
            grid_ranges=tuple(tuple(r) for r in raw.get("grid_ranges", ((-40, 40), (-40, 40)))),
            grid_step=raw.get("grid_step", 1.0),
        )
    except KeyError as exc:
        raise UnknownCaseError(f"case spec missing field {exc}") from None


def cmd_bench(args):
    import os

    if args.case == "all":
        names = sorted(benchmark.BUILTIN_CASES)
    elif args.case in benchmark.BUILTIN_CASES:
        names = [args.case]
    elif os.path.exists(args.case):
        names = [_load_case_spec(args.case)]
    else:
        raise UnknownCaseError(f"unknown case {args.case!r}")
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    grammar = _grammar(args)
    os.makedirs(args.out, exist_ok=True)
    for spec in names:
        case = benchmark.BUILTIN_CASES[spec] if isinstance(spec, str) else spec
        if args.seed is not None:
            case = benchmark.BenchmarkCase(**{**case.__dict__, "seed": args.seed})
        if args.sigma is not None:
            case = benchmark.BenchmarkCase(**{**case.__dict__, "noise_sigma": args.sigma})
        report, predictions, truth, queries = benchmark.evaluate_methods(
            methods, case, grammar=grammar, budget=args.budget
        )
        write_json(os.path.join(args.out, f"report_{case.name}.json"), report.to_dict())
        write_grid_csv(
            os.path.join(args.out, f"grid_{case.name}.csv"),
            queries,
            truth,
            predictions,
        )
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _merge_config(args)
        if args.command == "classify":
            return cmd_classify(args)
        if args.command == "search":
            return cmd_search(args)
        return cmd_bench(args)
    except UnsupportedGeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except UnknownCaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_CASE
    except (InvalidInputError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except HyperpolateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
