"""Command-line front door: parse graph files, run computations, emit
CSV/JSON reports and figure files.

Exit codes: 0 success, 1 domain error (validation, bad arguments to the
mathematics), 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .constructions import (
    counterexample_pair,
    golden_counterexample_params,
    make_standard,
    random_metric_graph,
)
from .fileio import (
    GraphFileError,
    diagram_to_csv_text,
    json_number,
    parse_length,
    read_graph,
    write_graph,
    write_transform_dir,
)
from .graphs import GraphError, GraphPoint, validate
from .persistence import diagram_of
from .symmetry import canonical_tree_code
from .transform import (
    barcode_transform,
    measured_persistence_distortion_estimate,
    measured_transform,
    persistence_distortion_estimate,
)
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_IO = 2


def _load_graph(path: str):
    graph = read_graph(path)
    validate(graph).raise_on_error()
    return graph


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _diagram_json(diagram) -> dict:
    return {
        "points": [
            {
                "dim": p.dim,
                "birth": json_number(p.birth),
                "death": json_number(p.death),
                "subtype": p.subtype,
            }
            for p in diagram.points
        ]
    }


def cmd_pd(args) -> int:
    graph = _load_graph(args.graph)
    point = GraphPoint.parse(args.basepoint)
    diagram = diagram_of(graph, graph.canonical_point(point), method=args.method)
    if args.format == "csv":
        _emit(diagram_to_csv_text(diagram), args.out)
    elif args.format == "json":
        _emit(json.dumps(_diagram_json(diagram), indent=2, sort_keys=True) + "\n", args.out)
    else:  # svg: figure plus the delimited output alongside
        if not args.out:
            raise GraphError("--out is required with --format svg")
        from .plotting import save_diagram_plot

        out = Path(args.out)
        save_diagram_plot(diagram, out, title=f"diagram at {args.basepoint}")
        out.with_suffix(".csv").write_text(diagram_to_csv_text(diagram))
    return EXIT_OK


def cmd_bt(args) -> int:
    graph = _load_graph(args.graph)
    delta = parse_length(args.delta)
    if delta <= 0:
        raise GraphError("--delta must be positive")
    sample = barcode_transform(graph, delta)
    manifest = write_transform_dir(sample, args.out, graph_text=Path(args.graph).read_text())
    if args.plot:
        from .plotting import save_diagram_sets_plot

        save_diagram_sets_plot(
            [(Path(args.graph).stem, sample.diagrams)],
            Path(args.out) / "transform.svg",
            title=f"sampled transform (delta_hat={manifest['delta_hat']['rational']})",
        )
    sys.stdout.write(
        f"wrote {len(sample)} diagrams to {args.out} (delta_hat={manifest['delta_hat']['rational']})\n"
    )
    return EXIT_OK


def _parse_density(spec: str):
    if spec == "uniform":
        return "uniform"
    data = json.loads(Path(spec).read_text())
    return {k: parse_length(str(v)) for k, v in data.items()}


def cmd_pdist(args) -> int:
    graph_a = _load_graph(args.graph_a)
    graph_b = _load_graph(args.graph_b)
    delta = parse_length(args.delta)
    if delta <= 0:
        raise GraphError("--delta must be positive")
    tol = parse_length(args.tol)
    if tol < 0:
        raise GraphError("--tol must be nonnegative")
    est = persistence_distortion_estimate(graph_a, graph_b, delta)
    report = {
        "estimate": json_number(est.estimate),
        "lower": json_number(est.lower),
        "upper": json_number(est.upper),
        "delta_hat_a": json_number(est.delta_hat_a),
        "delta_hat_b": json_number(est.delta_hat_b),
        "tolerance": json_number(tol),
        # certified: the true distortion exceeds the tolerance even after
        # subtracting the sampling slack
        "certified_distinct": bool(est.lower > tol),
    }
    if args.measured is not None:
        density = _parse_density(args.measured)
        measured_a = measured_transform(graph_a, delta, density)
        measured_b = measured_transform(graph_b, delta, density)
        m = measured_persistence_distortion_estimate(measured_a, measured_b)
        report["measured_estimate"] = json_number(m.estimate)
        report["measured_error_bound"] = json_number(m.error_bound)
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.format == "svg":
        if not args.out:
            raise GraphError("--out is required with --format svg")
        from .plotting import save_diagram_sets_plot

        out = Path(args.out)
        save_diagram_sets_plot(
            [
                (Path(args.graph_a).stem, est.sample_a.diagrams),
                (Path(args.graph_b).stem, est.sample_b.diagrams),
            ],
            out,
            title=f"sampled transforms (estimate={report['estimate']['rational']})",
        )
        out.with_suffix(".json").write_text(text)
    else:
        _emit(text, args.out)
    return EXIT_OK


def cmd_canon(args) -> int:
    graph = _load_graph(args.graph)
    code = canonical_tree_code(graph)
    if args.graph_b:
        other = canonical_tree_code(_load_graph(args.graph_b))
        sys.stdout.write(code + "\n" + other + "\n")
        sys.stdout.write("equal\n" if code == other else "different\n")
    else:
        sys.stdout.write(code + "\n")
    return EXIT_OK


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "random":
        if len(args.params) != 2:
            raise GraphError("random expects <n_vertices> <extra_edges>")
        graph = random_metric_graph(args.seed, int(args.params[0]), int(args.params[1]))
        write_graph(graph, args.out)
    elif kind == "counterexample":
        g, h = counterexample_pair(golden_counterexample_params())
        stem = Path(args.out)
        path_g = stem.with_name(stem.stem + "_g" + (stem.suffix or ".graph"))
        path_h = stem.with_name(stem.stem + "_h" + (stem.suffix or ".graph"))
        write_graph(g, path_g)
        write_graph(h, path_h)
        sys.stdout.write(f"wrote {path_g} and {path_h}\n")
        return EXIT_OK
    else:
        graph = make_standard(kind, [parse_length(p) for p in args.params])
        write_graph(graph, args.out)
    sys.stdout.write(f"wrote {args.out}\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise GraphError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    report = run_suite(args.suite)
    if args.format == "json":
        text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
        _emit(text, args.out)
    else:
        lines = []
        for case in report.cases:
            status = "PASS" if case.ok else "FAIL"
            detail = f"  ({case.detail})" if case.detail else ""
            lines.append(f"[{status}] {report.suite}/{case.name}{detail}")
        lines.append(f"suite {report.suite}: {'PASS' if report.ok else 'FAIL'}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphbt",
        description="Barcode transforms of compact metric graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pd", help="diagram of the distance function at a basepoint")
    p.add_argument("graph")
    p.add_argument("--basepoint", required=True, help="'vertex:<id>' or '<edgeID>:<offset>'")
    p.add_argument("--method", choices=["sweep", "reduction"], default="sweep")
    p.add_argument("--format", choices=["csv", "json", "svg"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pd)

    p = sub.add_parser("bt", help="sampled barcode transform to a directory")
    p.add_argument("graph")
    p.add_argument("--delta", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--plot", action="store_true", help="also render an overview figure")
    p.set_defaults(func=cmd_bt)

    p = sub.add_parser("pdist", help="persistence distortion estimate between two graphs")
    p.add_argument("graph_a")
    p.add_argument("graph_b")
    p.add_argument("--delta", required=True)
    p.add_argument("--tol", default="0",
                   help="distinctness threshold for the certified_distinct field")
    p.add_argument("--measured", nargs="?", const="uniform", default=None,
                   help="add the Wasserstein estimate; value is 'uniform' or a JSON density file")
    p.add_argument("--format", choices=["json", "svg"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_pdist)

    p = sub.add_parser("canon", help="canonical code of a metric tree")
    p.add_argument("graph")
    p.add_argument("graph_b", nargs="?", default=None)
    p.set_defaults(func=cmd_canon)

    p = sub.add_parser("gen", help="generate a graph file")
    p.add_argument("kind", help="circle|interval|theta|dumbbell|star|path|random|counterexample")
    p.add_argument("params", nargs="*")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", help="|".join(sorted(SUITES)))
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (GraphFileError, FileNotFoundError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GraphError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
