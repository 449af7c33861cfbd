"""Edge-list text format: header ``n m`` then ``m`` lines ``u v w``."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Set, Tuple

import numpy as np

from common.errors import ParseError
from graphcore.weighted_graph import WeightedGraph

LOGGER = logging.getLogger("sparsecluster.graphcore.edge_list")


def _parse_header(line: str) -> Tuple[int, int]:
    fields = line.split()
    if len(fields) != 2:
        raise ParseError("header must be 'n m'", line=1)
    try:
        n, m = int(fields[0]), int(fields[1])
    except ValueError as exc:
        raise ParseError(f"non-integer header {line.strip()!r}", line=1) from exc
    if n < 0 or m < 0:
        raise ParseError("n and m must be non-negative", line=1)
    return n, m


def parse_edge_list(text: str) -> WeightedGraph:
    """Parse the edge-list format; every error carries the offending line number."""
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("empty input", line=1)
    n, m = _parse_header(lines[0])
    body = lines[1:]
    if len(body) != m:
        raise ParseError(f"header declares {m} edges, found {len(body)} lines", line=min(len(lines), m + 1) + 1)

    us: List[int] = []
    vs: List[int] = []
    ws: List[float] = []
    seen: Set[Tuple[int, int]] = set()
    for offset, raw in enumerate(body, start=2):
        fields = raw.split()
        if len(fields) != 3:
            raise ParseError(f"expected 'u v w', got {raw.strip()!r}", line=offset)
        try:
            u, v, w = int(fields[0]), int(fields[1]), float(fields[2])
        except ValueError as exc:
            raise ParseError(f"malformed edge {raw.strip()!r}", line=offset) from exc
        if u == v:
            raise ParseError(f"self-loop at node {u}", line=offset)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"node id out of range [0, {n})", line=offset)
        if not np.isfinite(w) or w < 0:
            raise ParseError(f"invalid weight {fields[2]}", line=offset)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {key}", line=offset)
        seen.add(key)
        us.append(u)
        vs.append(v)
        ws.append(w)
    return WeightedGraph.from_arrays(n, us, vs, ws)


def format_edge_list(g: WeightedGraph) -> str:
    """Canonical serialisation; ``repr`` floats so parsing is exact."""
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v} {w!r}" for u, v, w in g.edges())
    return "\n".join(lines) + "\n"


def read_edge_list(path: str | Path) -> WeightedGraph:
    graph = parse_edge_list(Path(path).read_text(encoding="utf-8"))
    LOGGER.info("Loaded %s from %s", graph, path)
    return graph


def write_edge_list(g: WeightedGraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g), encoding="utf-8", newline="\n")
    LOGGER.info("Wrote %s to %s", g, path)


# Short aliases matching the operation names.
from_edge_list = parse_edge_list
to_edge_list = format_edge_list
