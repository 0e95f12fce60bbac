"""Deterministic synthetic graph datasets (ER, BA, WS, community)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._rng import SYNTH, check_seed, derive_stream
from .graph import Graph, GraphSet

__all__ = ["Family", "GeneratorSpec", "generate_dataset", "generate_graph"]


class Family(str, Enum):
    ER = "er"
    BA = "ba"
    WS = "ws"
    COMMUNITY = "community"


@dataclass(frozen=True)
class GeneratorSpec:
    """Dataset recipe: family, size and family parameters.

    Unused family parameters are ignored. Defaults for the community family
    are two blocks with dense intra-block and sparse inter-block edges.
    """

    family: Family
    n_graphs: int
    n_nodes: tuple
    p_edge: float = 0.3
    m: int = 2
    k: int = 4
    p_rewire: float = 0.1
    c: int = 2
    p_intra: float = 0.7
    p_inter: float = 0.05

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "n_nodes", tuple(int(x) for x in self.n_nodes))
        self.validate()

    def validate(self):
        def bad(name, constraint):
            raise ValueError(f"invalid generator spec: {name} must satisfy {constraint}")

        if self.n_graphs < 1:
            bad("n_graphs", "n_graphs >= 1")
        if len(self.n_nodes) != 2:
            bad("n_nodes", "a (lo, hi) pair")
        lo, hi = self.n_nodes
        if lo < 1 or lo > hi:
            bad("n_nodes", f"1 <= lo <= hi (got {lo}:{hi})")
        fam = self.family
        if fam is Family.ER and not 0.0 <= self.p_edge <= 1.0:
            bad("p_edge", "0 <= p_edge <= 1")
        if fam is Family.BA and not 1 <= self.m < lo:
            bad("m", f"1 <= m < lo={lo}")
        if fam is Family.WS:
            if self.k < 2 or self.k % 2 or self.k >= lo:
                bad("k", f"k even, k >= 2 and k < lo={lo}")
            if not 0.0 <= self.p_rewire <= 1.0:
                bad("p_rewire", "0 <= p_rewire <= 1")
        if fam is Family.COMMUNITY:
            if not 1 <= self.c <= lo:
                bad("c", f"1 <= c <= lo={lo}")
            for name in ("p_intra", "p_inter"):
                if not 0.0 <= getattr(self, name) <= 1.0:
                    bad(name, f"0 <= {name} <= 1")

    def params(self):
        fam = self.family
        if fam is Family.ER:
            return {"p_edge": self.p_edge}
        if fam is Family.BA:
            return {"m": self.m}
        if fam is Family.WS:
            return {"k": self.k, "p_rewire": self.p_rewire}
        return {"c": self.c, "p_intra": self.p_intra, "p_inter": self.p_inter}


def _pairs(n):
    iu, ju = np.triu_indices(n, k=1)
    return iu, ju


def _erdos_renyi(n, p, rng):
    iu, ju = _pairs(n)
    keep = rng.random(iu.size) < p
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def _barabasi_albert(n, m, rng):
    # m isolated seed vertices; attachment weight is degree + 1
    deg = np.zeros(n, dtype=np.float64)
    edges = []
    for v in range(m, n):
        w = deg[:v] + 1.0
        targets = rng.choice(v, size=m, replace=False, p=w / w.sum())
        for t in np.sort(targets).tolist():
            edges.append((t, v))
            deg[t] += 1
            deg[v] += 1
    return edges


def _watts_strogatz(n, k, p, rng):
    adj = [set() for _ in range(n)]
    for u in range(n):
        for j in range(1, k // 2 + 1):
            v = (u + j) % n
            adj[u].add(v)
            adj[v].add(u)
    for j in range(1, k // 2 + 1):
        for u in range(n):
            v = (u + j) % n
            if v not in adj[u] or rng.random() >= p:
                continue
            choices = [w for w in range(n) if w != u and w not in adj[u]]
            if not choices:
                continue
            w = choices[int(rng.integers(len(choices)))]
            adj[u].discard(v)
            adj[v].discard(u)
            adj[u].add(w)
            adj[w].add(u)
    return [(u, v) for u in range(n) for v in adj[u] if u < v]


def _community(n, c, p_intra, p_inter, rng):
    block = (np.arange(n) * c) // n
    iu, ju = _pairs(n)
    same = block[iu] == block[ju]
    prob = np.where(same, p_intra, p_inter)
    keep = rng.random(iu.size) < prob
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def community_blocks(n, c):
    """Block label of each vertex in a community graph with ``c`` equal blocks."""
    return (np.arange(n) * c) // n


def generate_graph(spec: GeneratorSpec, rng, gid="g") -> Graph:
    lo, hi = spec.n_nodes
    n = int(rng.integers(lo, hi + 1))
    fam = spec.family
    if fam is Family.ER:
        edges = _erdos_renyi(n, spec.p_edge, rng)
    elif fam is Family.BA:
        edges = _barabasi_albert(n, spec.m, rng)
    elif fam is Family.WS:
        edges = _watts_strogatz(n, spec.k, spec.p_rewire, rng)
    else:
        edges = _community(n, spec.c, spec.p_intra, spec.p_inter, rng)
    return Graph(gid, n, edges)


def generate_dataset(spec: GeneratorSpec, seed: int, name=None) -> GraphSet:
    """Generate ``spec.n_graphs`` graphs; a pure function of ``(spec, seed)``.

    Graph ``i`` draws from its own stream derived from ``(seed, i)``.
    """
    seed = check_seed(seed)
    graphs = [
        generate_graph(spec, derive_stream(seed, SYNTH, i), gid=f"g{i}")
        for i in range(spec.n_graphs)
    ]
    meta = {
        "family": spec.family.value,
        "seed": seed,
        "n_graphs": spec.n_graphs,
        "n_nodes": f"{spec.n_nodes[0]}:{spec.n_nodes[1]}",
    }
    meta.update(spec.params())
    return GraphSet(name or spec.family.value, graphs, meta)
