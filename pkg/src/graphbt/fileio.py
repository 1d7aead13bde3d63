"""File formats: graph text files, diagram CSV, distance-matrix CSV, and
transform directories with manifests.

All numbers are written as exact rationals ("num/den"); parsers also accept
integers and decimal strings.  JSON surfaces carry both the rational string
and a float rendering.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .graphs import GraphError, GraphPoint, MetricGraph, as_length, distance_matrix
from .persistence import Diagram, DiagramPoint
from .transform import BarcodeSample

__all__ = [
    "GraphFileError",
    "format_length",
    "parse_length",
    "parse_graph",
    "read_graph",
    "graph_to_text",
    "write_graph",
    "diagram_to_csv_text",
    "write_diagram_csv",
    "parse_diagram_csv",
    "read_diagram_csv",
    "distance_matrix_csv_text",
    "json_number",
    "write_transform_dir",
    "read_transform_dir",
]


class GraphFileError(ValueError):
    """A file could not be parsed."""


def format_length(value: Fraction) -> str:
    value = as_length(value)
    return f"{value.numerator}/{value.denominator}"


def parse_length(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise GraphFileError(f"cannot parse length {text!r}") from exc


# -- graph files -----------------------------------------------------------------


def parse_graph(text: str, source: str = "<string>") -> MetricGraph:
    """Parse the line format: 'v <id>' / 'e <id> <u> <v> <length>' / '# ...'."""
    vertices: list[str] = []
    edges: list[tuple[str, str, str, Fraction]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "v" and len(parts) == 2:
            vertices.append(parts[1])
        elif parts[0] == "e" and len(parts) == 5:
            edges.append((parts[1], parts[2], parts[3], parse_length(parts[4])))
        else:
            raise GraphFileError(f"{source}:{lineno}: cannot parse line {raw!r}")
    return MetricGraph(vertices, edges)


def read_graph(path) -> MetricGraph:
    path = Path(path)
    return parse_graph(path.read_text(), source=str(path))


def graph_to_text(graph: MetricGraph) -> str:
    lines = [f"v {v}" for v in graph.vertices]
    lines += [f"e {e.id} {e.u} {e.v} {format_length(e.length)}" for e in graph.edges]
    return "\n".join(lines) + "\n"


def write_graph(graph: MetricGraph, path) -> None:
    Path(path).write_text(graph_to_text(graph))


# -- diagram CSV -------------------------------------------------------------------


def diagram_to_csv_text(diagram: Diagram) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["dim", "birth", "death", "subtype"])
    for p in diagram.points:
        writer.writerow([p.dim, format_length(p.birth), format_length(p.death), p.subtype or ""])
    return buf.getvalue()


def write_diagram_csv(diagram: Diagram, path) -> None:
    Path(path).write_text(diagram_to_csv_text(diagram))


def parse_diagram_csv(text: str, source: str = "<string>") -> Diagram:
    """Read a diagram; the subtype column is optional and ignored."""
    reader = csv.reader(io.StringIO(text))
    rows = [row for row in reader if row]
    if not rows:
        raise GraphFileError(f"{source}: empty diagram file")
    start = 1 if rows[0][:3] == ["dim", "birth", "death"] else 0
    points = []
    for row in rows[start:]:
        if len(row) < 3:
            raise GraphFileError(f"{source}: diagram row too short: {row!r}")
        points.append(
            DiagramPoint(int(row[0]), parse_length(row[1]), parse_length(row[2]), None)
        )
    return Diagram(points)


def read_diagram_csv(path) -> Diagram:
    path = Path(path)
    return parse_diagram_csv(path.read_text(), source=str(path))


# -- distance matrices ---------------------------------------------------------------


def distance_matrix_csv_text(graph: MetricGraph, points: Sequence[GraphPoint], labels: Sequence[str] | None = None) -> str:
    if labels is None:
        labels = [graph.canonical_point(p).label() for p in points]
    if len(labels) != len(points):
        raise GraphError("one label per point is required")
    matrix = distance_matrix(graph, points)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([""] + list(labels))
    for label, row in zip(labels, matrix):
        writer.writerow([label] + [format_length(x) for x in row])
    return buf.getvalue()


# -- JSON helpers ---------------------------------------------------------------------


def json_number(value: Fraction) -> dict:
    value = as_length(value)
    return {"rational": format_length(value), "float": float(value)}


# -- transform directories --------------------------------------------------------------


def _basepoint_filename(index: int) -> str:
    return f"bp{index:05d}.csv"


def write_transform_dir(sample: BarcodeSample, directory, graph_text: str | None = None) -> dict:
    """Write one diagram CSV per basepoint plus a manifest.

    The manifest records the graph file hash, the requested delta, the
    verified covering radius, and the basepoint label of every diagram file.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if graph_text is None:
        graph_text = graph_to_text(sample.graph)
    (directory / "graph.txt").write_text(graph_text)
    digest = hashlib.sha256(graph_text.encode()).hexdigest()
    entries = []
    for i, (point, diagram) in enumerate(zip(sample.points, sample.diagrams)):
        name = _basepoint_filename(i)
        write_diagram_csv(diagram, directory / name)
        entries.append({"label": point.label(), "file": name})
    manifest = {
        "graph_sha256": digest,
        "delta": json_number(sample.requested_delta),
        "delta_hat": json_number(sample.delta_hat),
        "basepoints": entries,
    }
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def read_transform_dir(directory) -> tuple[dict, list[tuple[str, Diagram]]]:
    directory = Path(directory)
    manifest = json.loads((directory / "manifest.json").read_text())
    out = []
    for entry in manifest["basepoints"]:
        out.append((entry["label"], read_diagram_csv(directory / entry["file"])))
    return manifest, out
