"""Descriptor functions: graphs to fixed-support histograms.

Three descriptors are provided, each as a plain function on one graph and as
a scikit-learn transformer on a collection of graphs:

* degree histogram (``DegreeHistogram``)
* local clustering coefficient histogram (``ClusteringHistogram``)
* normalized Laplacian spectrum histogram (``LaplacianSpectrum``)

Transformers output an ``(n_graphs, n_bin)`` float array, so they slot into
pipelines that end in :class:`graphmmd.mmd.MMD`.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import SpectrumError
from .graph import Graph, graphs_of

__all__ = [
    "AUTO",
    "Support",
    "Histogram",
    "DescriptorKind",
    "DescriptorSpec",
    "degree_histogram",
    "clustering_histogram",
    "laplacian_eigenvalues",
    "spectrum_histogram",
    "describe_set",
    "resolve_n_bin",
    "DegreeHistogram",
    "ClusteringHistogram",
    "LaplacianSpectrum",
    "make_descriptor",
]

AUTO = "auto"
SPECTRUM_TOL = 1e-9


class Support(str, Enum):
    DEGREE_COUNTS = "degree_counts"
    UNIT_INTERVAL = "unit_interval"
    SPECTRUM_0_2 = "spectrum_0_2"


class DescriptorKind(str, Enum):
    DEGREE = "degree"
    CLUSTERING = "clustering"
    SPECTRAL = "spectral"


DEFAULT_BINS = {
    DescriptorKind.DEGREE: AUTO,
    DescriptorKind.CLUSTERING: 100,
    DescriptorKind.SPECTRAL: 200,
}


@dataclass(frozen=True)
class Histogram:
    values: np.ndarray
    support: Support
    normalized: bool

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class DescriptorSpec:
    """Which descriptor to compute and on how many bins.

    ``n_bin`` may be ``"auto"`` for the degree descriptor only, meaning one
    bin per possible degree up to the largest degree in the compared sets.
    """

    kind: DescriptorKind
    n_bin: object = None
    normalize: bool = True

    def __post_init__(self):
        kind = DescriptorKind(self.kind)
        object.__setattr__(self, "kind", kind)
        n_bin = DEFAULT_BINS[kind] if self.n_bin is None else self.n_bin
        if n_bin == AUTO:
            if kind is not DescriptorKind.DEGREE:
                raise ValueError("n_bin='auto' is only valid for the degree descriptor")
        elif isinstance(n_bin, bool) or int(n_bin) != n_bin or int(n_bin) < 1:
            raise ValueError(f"n_bin must be a positive integer or 'auto', got {n_bin!r}")
        else:
            n_bin = int(n_bin)
        object.__setattr__(self, "n_bin", n_bin)

    @property
    def label(self):
        return f"{self.kind.value}[{self.n_bin}]"


def _bin_index(values, n_bin, upper):
    # left-closed equal-width bins on [0, upper]; the last bin is closed on
    # the right. Positions are snapped to 1e-9 so float jitter never moves a
    # value that sits on a bin edge.
    pos = np.round(np.asarray(values, dtype=np.float64) * (n_bin / upper), 9)
    idx = np.floor(pos).astype(np.int64)
    return np.clip(idx, 0, n_bin - 1)


def _binned(values, n_bin, upper, n):
    counts = np.bincount(_bin_index(values, n_bin, upper), minlength=n_bin)
    counts = counts.astype(np.float64)
    return counts / n if n else counts


def degree_histogram(g: Graph, n_bin: int, normalize: bool = True) -> Histogram:
    """Count vertices of each degree, zero-extended to ``n_bin`` entries.

    Raises ``ValueError`` if ``n_bin`` cannot hold the largest degree of ``g``.
    """
    n_bin = int(n_bin)
    deg = g.degrees()
    max_deg = int(deg.max(initial=0))
    if n_bin < max_deg + 1:
        raise ValueError(
            f"n_bin={n_bin} too small for graph {g.id} with max degree {max_deg}"
        )
    counts = np.bincount(deg, minlength=n_bin).astype(np.float64)
    if normalize and g.n:
        counts = counts / g.n
    return Histogram(counts, Support.DEGREE_COUNTS, bool(normalize))


def clustering_coefficients(g: Graph) -> np.ndarray:
    """Local clustering coefficient per vertex; 0 where degree < 2."""
    a = g.adjacency(np.int64)
    deg = a.sum(axis=1)
    # closed 2-paths through v that are also edges = 2 * triangles at v
    links = ((a @ a) * a).sum(axis=1)
    possible = deg * (deg - 1)
    out = np.zeros(g.n, dtype=np.float64)
    mask = deg >= 2
    out[mask] = links[mask] / possible[mask]
    return out


def clustering_histogram(g: Graph, n_bin: int = 100, normalize: bool = True) -> Histogram:
    if int(n_bin) < 1:
        raise ValueError("n_bin must be >= 1")
    h = _binned(clustering_coefficients(g), int(n_bin), 1.0, g.n if normalize else 0)
    return Histogram(h, Support.UNIT_INTERVAL, bool(normalize))


def laplacian_eigenvalues(g: Graph, clamp: bool = True) -> np.ndarray:
    """Eigenvalues of ``I - D^-1/2 A D^-1/2`` in ascending order.

    Isolated vertices contribute eigenvalue 0. Values outside
    ``[-1e-9, 2 + 1e-9]`` raise :class:`SpectrumError`; anything within that
    band is clamped into ``[0, 2]`` when ``clamp`` is set.
    """
    if g.n == 0:
        return np.empty(0)
    a = g.adjacency(np.float64)
    deg = a.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    lap = -(inv_sqrt[:, None] * a * inv_sqrt[None, :])
    lap[np.diag_indices_from(lap)] = nz.astype(np.float64)
    try:
        eig = np.linalg.eigvalsh(lap)
    except np.linalg.LinAlgError as exc:
        raise SpectrumError(f"eigensolver failed for graph {g.id}: {exc}") from exc
    if eig.size and (eig[0] < -SPECTRUM_TOL or eig[-1] > 2 + SPECTRUM_TOL):
        raise SpectrumError(
            f"eigenvalues of graph {g.id} outside [0, 2]: [{eig[0]!r}, {eig[-1]!r}]"
        )
    return np.clip(eig, 0.0, 2.0) if clamp else eig


def spectrum_histogram(g: Graph, n_bin: int = 200, normalize: bool = True) -> Histogram:
    if int(n_bin) < 1:
        raise ValueError("n_bin must be >= 1")
    eig = laplacian_eigenvalues(g)
    h = _binned(eig, int(n_bin), 2.0, g.n if normalize else 0)
    return Histogram(h, Support.SPECTRUM_0_2, bool(normalize))


def resolve_n_bin(spec: DescriptorSpec, *graph_sets) -> int:
    """Concrete bin count; ``auto`` becomes 1 + max degree over all given sets."""
    if spec.n_bin != AUTO:
        return spec.n_bin
    max_deg = 0
    for graphs in graph_sets:
        for g in graphs_of(graphs):
            max_deg = max(max_deg, int(g.degrees().max(initial=0)))
    return max_deg + 1


_FUNCS = {
    DescriptorKind.DEGREE: degree_histogram,
    DescriptorKind.CLUSTERING: clustering_histogram,
    DescriptorKind.SPECTRAL: spectrum_histogram,
}


def describe_set(graphs, spec: DescriptorSpec, n_bin=None, n_jobs=1) -> list[Histogram]:
    """Histogram of every graph in input order, on a shared support.

    ``n_bin`` overrides ``spec.n_bin``; pass the value resolved over
    the union of every set being compared so that vectors line up.
    """
    graphs = graphs_of(graphs)
    if not graphs:
        raise ValueError("cannot describe an empty graph set")
    n_bin = resolve_n_bin(spec, graphs) if n_bin is None else int(n_bin)
    func = _FUNCS[spec.kind]

    def one(g):
        return func(g, n_bin, spec.normalize)

    if n_jobs and n_jobs != 1 and len(graphs) > 1:
        workers = None if n_jobs < 0 else n_jobs
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(one, graphs))
    return [one(g) for g in graphs]


def stack(histograms) -> np.ndarray:
    """Stack histograms (or raw vectors) into an ``(n, d)`` array."""
    rows = [h.values if isinstance(h, Histogram) else np.asarray(h, float) for h in histograms]
    if not rows:
        return np.empty((0, 0))
    return np.vstack(rows)


class _DescriptorTransformer(TransformerMixin, BaseEstimator):
    _kind: DescriptorKind

    def _spec(self):
        return DescriptorSpec(self._kind, self.n_bin, self.normalize)

    def fit(self, X, y=None):
        """Resolve the bin count from the graphs in ``X``."""
        graphs = graphs_of(X)
        if not graphs:
            raise ValueError(f"{type(self).__name__} requires at least one graph")
        self.n_bin_ = resolve_n_bin(self._spec(), graphs)
        return self

    def transform(self, X):
        check_is_fitted(self, "n_bin_")
        return stack(describe_set(X, self._spec(), n_bin=self.n_bin_, n_jobs=self.n_jobs))

    @property
    def spec(self):
        return self._spec()


class DegreeHistogram(_DescriptorTransformer):
    """Degree distribution histogram.

    Parameters
    ----------
    n_bin : int or "auto", default="auto"
        Number of bins. ``"auto"`` uses 1 + the max degree seen in ``fit``.
        Fit on the union of all sets you intend to compare.
    normalize : bool, default=True
        Divide counts by the vertex count so each row sums to 1.
    n_jobs : int, default=1
        Threads used for per-graph computation; output order is unaffected.

    Attributes
    ----------
    n_bin_ : int
        Resolved number of bins.
    """

    _kind = DescriptorKind.DEGREE

    def __init__(self, n_bin=AUTO, normalize=True, n_jobs=1):
        self.n_bin = n_bin
        self.normalize = normalize
        self.n_jobs = n_jobs


class ClusteringHistogram(_DescriptorTransformer):
    """Histogram of local clustering coefficients over ``n_bin`` bins on [0, 1]."""

    _kind = DescriptorKind.CLUSTERING

    def __init__(self, n_bin=100, normalize=True, n_jobs=1):
        self.n_bin = n_bin
        self.normalize = normalize
        self.n_jobs = n_jobs


class LaplacianSpectrum(_DescriptorTransformer):
    """Histogram of normalized Laplacian eigenvalues over ``n_bin`` bins on [0, 2]."""

    _kind = DescriptorKind.SPECTRAL

    def __init__(self, n_bin=200, normalize=True, n_jobs=1):
        self.n_bin = n_bin
        self.normalize = normalize
        self.n_jobs = n_jobs


_TRANSFORMERS = {
    DescriptorKind.DEGREE: DegreeHistogram,
    DescriptorKind.CLUSTERING: ClusteringHistogram,
    DescriptorKind.SPECTRAL: LaplacianSpectrum,
}


def make_descriptor(spec: DescriptorSpec, n_jobs=1):
    return _TRANSFORMERS[spec.kind](n_bin=spec.n_bin, normalize=spec.normalize, n_jobs=n_jobs)
