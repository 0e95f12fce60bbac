"""Graph and dataset representation, validation and JSON Lines serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from ._io import atomic_write_text
from .exceptions import DatasetError

__all__ = [
    "Graph",
    "GraphSet",
    "validate_graph",
    "load_dataset",
    "save_dataset",
    "dumps_dataset",
]


def _canonical_edges(edges):
    out = []
    for edge in edges:
        u, v = edge
        u, v = int(u), int(v)
        out.append((u, v) if u <= v else (v, u))
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on vertices ``0..n-1``.

    Edges are stored in canonical form: each pair as ``(min, max)`` and the
    list sorted lexicographically. The constructor canonicalizes but does not
    validate; use :func:`validate_graph` for that.
    """

    id: str
    n: int
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "edges", _canonical_edges(self.edges))

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_array(self):
        """Edges as an ``(n_edges, 2)`` integer array."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.asarray(self.edges, dtype=np.int64)

    def degrees(self):
        deg = np.zeros(self.n, dtype=np.int64)
        if self.edges:
            e = self.edge_array()
            np.add.at(deg, e[:, 0], 1)
            np.add.at(deg, e[:, 1], 1)
        return deg

    def adjacency(self, dtype=np.int64):
        a = np.zeros((self.n, self.n), dtype=dtype)
        if self.edges:
            e = self.edge_array()
            a[e[:, 0], e[:, 1]] = 1
            a[e[:, 1], e[:, 0]] = 1
        return a

    def relabel(self, perm):
        """Return the graph with vertex ``v`` renamed to ``perm[v]``."""
        perm = np.asarray(perm)
        return Graph(self.id, self.n, [(perm[u], perm[v]) for u, v in self.edges])

    def to_record(self):
        return {"id": self.id, "n": self.n, "edges": [list(e) for e in self.edges]}


@dataclass(frozen=True)
class GraphSet:
    """Ordered multiset of graphs drawn from one distribution.

    Duplicates are allowed. ``meta`` carries provenance (generator family,
    seed, perturbation level) as string values.
    """

    name: str
    graphs: tuple
    meta: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "graphs", tuple(self.graphs))
        object.__setattr__(
            self, "meta", {str(k): str(v) for k, v in dict(self.meta).items()}
        )

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, item):
        return self.graphs[item]

    def max_degree(self):
        return max((int(g.degrees().max(initial=0)) for g in self.graphs), default=0)


def validate_graph(g: Graph) -> list[str]:
    """Return every invariant violation of ``g``; an empty list means valid."""
    violations = []
    if g.n < 0:
        violations.append(f"negative vertex count {g.n} in graph {g.id}")
    seen = set()
    for u, v in g.edges:
        if u == v:
            violations.append(f"self-loop in graph {g.id} at vertex {u}")
        if u < 0 or v >= g.n:
            violations.append(
                f"edge ({u}, {v}) out of range [0, {g.n}) in graph {g.id}"
            )
        if (u, v) in seen:
            violations.append(f"duplicate edge ({u}, {v}) in graph {g.id}")
        seen.add((u, v))
    return violations


def _parse_record(obj, lineno):
    if not isinstance(obj, dict):
        raise DatasetError("graph record must be a JSON object", line=lineno)
    missing = [k for k in ("id", "n", "edges") if k not in obj]
    if missing:
        raise DatasetError(f"missing field(s) {', '.join(missing)}", line=lineno)
    gid, n, edges = obj["id"], obj["n"], obj["edges"]
    if not isinstance(gid, str):
        raise DatasetError("field 'id' must be a string", line=lineno)
    if not isinstance(n, int) or isinstance(n, bool):
        raise DatasetError(f"field 'n' must be an integer in graph {gid}", line=lineno)
    if not isinstance(edges, list):
        raise DatasetError(f"field 'edges' must be a list in graph {gid}", line=lineno)
    for e in edges:
        if (
            not isinstance(e, list)
            or len(e) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in e)
        ):
            raise DatasetError(
                f"malformed edge {e!r} in graph {gid}; expected [u, v] integers",
                line=lineno,
            )
    g = Graph(gid, n, edges)
    problems = validate_graph(g)
    if problems:
        raise DatasetError("; ".join(problems), line=lineno)
    return g


def loads_dataset(text: str, name: str = "dataset") -> GraphSet:
    meta = {}
    graphs = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON: {exc.msg}", line=lineno) from None
        if isinstance(obj, dict) and "_meta" in obj:
            if graphs or meta:
                raise DatasetError("'_meta' record must be the first line", line=lineno)
            if not isinstance(obj["_meta"], dict):
                raise DatasetError("'_meta' must be an object", line=lineno)
            meta = obj["_meta"]
            name = str(obj.get("name", name))
            continue
        graphs.append(_parse_record(obj, lineno))
    if not graphs:
        raise DatasetError("empty dataset")
    return GraphSet(name, graphs, meta)


def load_dataset(path) -> GraphSet:
    """Read a JSON Lines dataset file.

    Raises
    ------
    DatasetError
        On malformed JSON, a record violating the graph invariants, or a file
        with no graph records. The error carries the 1-based line number.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    return loads_dataset(text, name=path.stem)


def dumps_dataset(graph_set: GraphSet) -> str:
    lines = []
    if graph_set.meta:
        head = {"_meta": dict(graph_set.meta), "name": graph_set.name}
        lines.append(json.dumps(head, sort_keys=True))
    for g in graph_set.graphs:
        lines.append(json.dumps(g.to_record(), separators=(", ", ": ")))
    return "\n".join(lines) + "\n"


def save_dataset(graph_set: GraphSet, path) -> None:
    atomic_write_text(path, dumps_dataset(graph_set))


def graphs_of(obj) -> tuple:
    """Accept a GraphSet or any iterable of Graph and return a tuple of graphs."""
    if isinstance(obj, GraphSet):
        return obj.graphs
    if isinstance(obj, Graph):
        raise TypeError("expected a collection of graphs, got a single Graph")
    graphs = tuple(obj)
    for g in graphs:
        if not isinstance(g, Graph):
            raise TypeError(f"expected Graph instances, got {type(g).__name__}")
    return graphs


def complete_graph(n, gid="K"):
    return Graph(gid, n, [(u, v) for u in range(n) for v in range(u + 1, n)])


def path_graph(n, gid="P"):
    return Graph(gid, n, [(i, i + 1) for i in range(n - 1)])


def star_graph(n_leaves, gid="S"):
    return Graph(gid, n_leaves + 1, [(0, i) for i in range(1, n_leaves + 1)])


def empty_graph(n, gid="E"):
    return Graph(gid, n, [])


def as_graph_set(graphs: Iterable[Graph], name="set", meta=None) -> GraphSet:
    return GraphSet(name, tuple(graphs), meta or {})
