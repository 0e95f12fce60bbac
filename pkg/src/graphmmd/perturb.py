"""Random graph perturbations of controllable magnitude.

Four kinds: edge insertion, edge removal, edge rewiring and addition of new
vertices connected to the original ones. Each is parameterized by a
probability ``p``; applying a grid of increasing ``p`` values to a base set
manufactures distributions that drift further and further from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._rng import PERTURB, check_seed, derive_stream
from .graph import Graph, GraphSet, graphs_of

__all__ = [
    "PerturbationKind",
    "PerturbationSpec",
    "LevelGrid",
    "perturb_graph",
    "perturb_sweep",
    "parse_levels",
    "GraphPerturber",
]


class PerturbationKind(str, Enum):
    ADD_EDGES = "add-edges"
    REMOVE_EDGES = "remove-edges"
    REWIRE_EDGES = "rewire-edges"
    ADD_CONNECTED_NODES = "add-connected-nodes"


def parse_kind(kind) -> PerturbationKind:
    if isinstance(kind, PerturbationKind):
        return kind
    return PerturbationKind(str(kind).strip().lower().replace("_", "-"))


@dataclass(frozen=True)
class PerturbationSpec:
    kind: PerturbationKind
    p: float
    n_add: int = 0

    def __post_init__(self):
        kind = parse_kind(self.kind)
        object.__setattr__(self, "kind", kind)
        p = float(self.p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"perturbation probability must lie in [0, 1], got {self.p}")
        object.__setattr__(self, "p", p)
        if int(self.n_add) != self.n_add or self.n_add < 0:
            raise ValueError(f"n_add must be a non-negative integer, got {self.n_add}")
        if self.n_add and kind is not PerturbationKind.ADD_CONNECTED_NODES:
            raise ValueError("n_add only applies to add-connected-nodes")
        object.__setattr__(self, "n_add", int(self.n_add))


@dataclass(frozen=True)
class LevelGrid:
    """Strictly ascending perturbation probabilities in [0, 1]."""

    levels: tuple
    n_add: int = 0

    def __post_init__(self):
        levels = tuple(float(x) for x in self.levels)
        if not levels:
            raise ValueError("level grid is empty")
        if any(not 0.0 <= x <= 1.0 for x in levels):
            raise ValueError("levels must lie in [0, 1]")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError("levels must be strictly ascending")
        object.__setattr__(self, "levels", levels)

    def __len__(self):
        return len(self.levels)

    def __iter__(self):
        return iter(self.levels)


def parse_levels(text: str) -> LevelGrid:
    """Parse ``"lo:hi:step"`` or a comma-separated list into a grid."""
    text = text.strip()
    if ":" in text:
        lo, hi, step = (float(x) for x in text.split(":"))
        if step <= 0:
            raise ValueError("level step must be positive")
        count = int(round((hi - lo) / step)) + 1
        levels = [round(lo + i * step, 12) for i in range(count)]
        return LevelGrid(tuple(x for x in levels if x <= hi + 1e-12))
    return LevelGrid(tuple(float(x) for x in text.split(",") if x.strip()))


def _add_edges(g, p, rng):
    iu, ju = np.triu_indices(g.n, k=1)
    hit = rng.random(iu.size) < p
    new = set(g.edges)
    new.update(zip(iu[hit].tolist(), ju[hit].tolist()))
    return Graph(g.id, g.n, new)


def _remove_edges(g, p, rng):
    drop = rng.random(len(g.edges)) < p
    return Graph(g.id, g.n, [e for e, d in zip(g.edges, drop) if not d])


def _rewire_edges(g, p, rng):
    n = g.n
    snapshot = list(g.edges)
    selected = rng.random(len(snapshot)) < p
    current = set(snapshot)
    for (u, v), sel in zip(snapshot, selected):
        if not sel:
            continue
        keep = u if rng.random() < 0.5 else v
        other = v if keep == u else u
        if n < 3:
            continue
        candidates = [w for w in range(n) if w != keep and w != other]
        # resample on collision with an existing edge; give up after n tries
        for _ in range(n):
            w = candidates[int(rng.integers(len(candidates)))]
            e = (keep, w) if keep < w else (w, keep)
            if e not in current:
                current.discard((u, v))
                current.add(e)
                break
    return Graph(g.id, n, current)


def _add_connected_nodes(g, p, n_add, rng):
    n = g.n
    new = list(g.edges)
    if n_add:
        hit = rng.random((n, n_add)) < p
        old, extra = np.nonzero(hit)
        new.extend(zip(old.tolist(), (extra + n).tolist()))
    return Graph(g.id, n + n_add, new)


def perturb_graph(g: Graph, spec: PerturbationSpec, rng) -> Graph:
    """Apply one perturbation to ``g`` using the random generator ``rng``.

    ``add-edges`` joins each non-adjacent pair with probability ``p``;
    ``remove-edges`` drops each edge with probability ``p``;
    ``rewire-edges`` moves one endpoint of each selected edge to a uniformly
    drawn vertex, keeping the edge count; ``add-connected-nodes`` appends
    ``n_add`` vertices, each linked to every original vertex with probability
    ``p``.
    """
    kind = spec.kind
    if kind is PerturbationKind.ADD_EDGES:
        return _add_edges(g, spec.p, rng)
    if kind is PerturbationKind.REMOVE_EDGES:
        return _remove_edges(g, spec.p, rng)
    if kind is PerturbationKind.REWIRE_EDGES:
        return _rewire_edges(g, spec.p, rng)
    return _add_connected_nodes(g, spec.p, spec.n_add, rng)


def perturb_sweep(graph_set, kind, grid: LevelGrid, seed, n_add=None) -> list[GraphSet]:
    """Perturb every graph at every level of ``grid``.

    Graph ``i`` at level ``j`` uses a stream derived from ``(seed, i, j)``.
    Returns one :class:`GraphSet` per level, in grid order.
    """
    seed = check_seed(seed)
    kind = parse_kind(kind)
    if not isinstance(grid, LevelGrid):
        grid = LevelGrid(tuple(grid))
    n_add = grid.n_add if n_add is None else n_add
    if kind is not PerturbationKind.ADD_CONNECTED_NODES:
        n_add = 0
    graphs = graphs_of(graph_set)
    name = graph_set.name if isinstance(graph_set, GraphSet) else "set"
    base_meta = dict(graph_set.meta) if isinstance(graph_set, GraphSet) else {}
    out = []
    for j, level in enumerate(grid.levels):
        spec = PerturbationSpec(kind, level, n_add)
        perturbed = [
            perturb_graph(g, spec, derive_stream(seed, PERTURB, i, j))
            for i, g in enumerate(graphs)
        ]
        meta = dict(base_meta)
        meta.update({"perturbation": kind.value, "level": repr(level), "perturb_seed": seed})
        if kind is PerturbationKind.ADD_CONNECTED_NODES:
            meta["n_add"] = n_add
        out.append(GraphSet(f"{name}@{kind.value}={level:g}", perturbed, meta))
    return out


class GraphPerturber(TransformerMixin, BaseEstimator):
    """Transformer that perturbs each graph of a collection.

    Parameters
    ----------
    kind : str, default="add-edges"
    p : float, default=0.1
    n_add : int, default=0
        Vertices appended by ``add-connected-nodes``.
    random_state : int, default=0
        Graph ``i`` uses a stream derived from ``(random_state, i)``, so the
        output does not depend on how the collection is chunked.
    """

    def __init__(self, kind="add-edges", p=0.1, n_add=0, random_state=0):
        self.kind = kind
        self.p = p
        self.n_add = n_add
        self.random_state = random_state

    def fit(self, X=None, y=None):
        self.spec_ = PerturbationSpec(self.kind, self.p, self.n_add)
        return self

    def transform(self, X):
        spec = PerturbationSpec(self.kind, self.p, self.n_add)
        seed = check_seed(self.random_state)
        return [
            perturb_graph(g, spec, derive_stream(seed, PERTURB, i, 0))
            for i, g in enumerate(graphs_of(X))
        ]
