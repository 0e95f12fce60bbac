"""Histogram distances, kernels over them, Gram matrices and p.s.d. checks.

Kernel families
---------------
``linear``         <x, y>
``rbf``            exp(-||x - y||^2 / (2 sigma^2))
``laplacian-tv``   exp(-lambda * TV(x, y))
``emd``            exp(-W1(x, y) / (2 sigma^2))
``rbf-tv-unsafe``  exp(-TV(x, y)^2 / (2 sigma^2)), not positive definite;
                   only constructible with ``allow_invalid=True``
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numba
import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from ._validation import check_equal_mass, check_histograms, check_pair, check_same_support
from .exceptions import InvalidKernelError

__all__ = [
    "KernelFamily",
    "KernelSpec",
    "GramMatrix",
    "tv_distance",
    "wasserstein1",
    "transport_cost",
    "kernel_eval",
    "pairwise_distances",
    "kernel_from_distances",
    "gram",
    "psd_check",
    "parse_kernel",
]


class KernelFamily(str, Enum):
    LINEAR = "linear"
    RBF = "rbf"
    LAPLACIAN_TV = "laplacian-tv"
    EMD = "emd"
    RBF_TV = "rbf-tv-unsafe"

    @property
    def order(self):
        return _FAMILY_ORDER[self]

    @property
    def base_distance(self):
        """Name of the distance the family exponentiates (None for linear)."""
        return _BASE_DISTANCE[self]


_FAMILY_ORDER = {
    KernelFamily.LINEAR: 0,
    KernelFamily.RBF: 1,
    KernelFamily.LAPLACIAN_TV: 2,
    KernelFamily.EMD: 3,
    KernelFamily.RBF_TV: 4,
}

_BASE_DISTANCE = {
    KernelFamily.LINEAR: None,
    KernelFamily.RBF: "sqeuclidean",
    KernelFamily.LAPLACIAN_TV: "tv",
    KernelFamily.EMD: "w1",
    KernelFamily.RBF_TV: "tv",
}

_ALIASES = {
    "rbf-euclidean": KernelFamily.RBF,
    "gaussian": KernelFamily.RBF,
    "laplacian": KernelFamily.LAPLACIAN_TV,
    "emd-gaussian": KernelFamily.EMD,
    "rbf-tv": KernelFamily.RBF_TV,
}


def parse_kernel(name) -> KernelFamily:
    if isinstance(name, KernelFamily):
        return name
    key = str(name).strip().lower().replace("_", "-")
    if key in _ALIASES:
        return _ALIASES[key]
    try:
        return KernelFamily(key)
    except ValueError:
        valid = ", ".join(f.value for f in KernelFamily)
        raise InvalidKernelError(f"unknown kernel {name!r}; expected one of {valid}") from None


_NOT_PSD_MESSAGE = (
    "the RBF kernel over total variation distance is not positive definite "
    "(TV space is not flat), so MMD built on it is not a valid metric; use "
    "'laplacian-tv' instead, or pass allow_invalid=True to reproduce prior work"
)


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus its scale (sigma, or lambda for ``laplacian-tv``)."""

    family: KernelFamily
    scale: float | None = None
    allow_invalid: bool = field(default=False, compare=False)

    def __post_init__(self):
        fam = parse_kernel(self.family)
        object.__setattr__(self, "family", fam)
        if fam is KernelFamily.RBF_TV and not self.allow_invalid:
            raise InvalidKernelError(_NOT_PSD_MESSAGE)
        if fam is KernelFamily.LINEAR:
            if self.scale is not None:
                raise InvalidKernelError("the linear kernel takes no scale parameter")
        else:
            if self.scale is None:
                raise InvalidKernelError(f"kernel {fam.value!r} requires a scale")
            s = float(self.scale)
            if not np.isfinite(s) or s <= 0:
                raise InvalidKernelError(f"kernel scale must be positive, got {self.scale!r}")
            object.__setattr__(self, "scale", s)

    @property
    def label(self):
        if self.scale is None:
            return self.family.value
        return f"{self.family.value}({self.scale:g})"

    def sort_key(self):
        return (-1.0 if self.scale is None else self.scale, self.family.order)


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    x_labels: tuple = ()
    y_labels: tuple = ()
    symmetric: bool = False

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=np.float64)
        if e.ndim != 2:
            raise ValueError("Gram entries must be a 2-D matrix")
        if self.symmetric and (e.shape[0] != e.shape[1] or not np.array_equal(e, e.T)):
            raise ValueError("Gram matrix flagged symmetric but entries are not")
        object.__setattr__(self, "entries", e)

    @property
    def shape(self):
        return self.entries.shape


def tv_distance(x, y) -> float:
    """Total variation distance, half the L1 distance between histograms."""
    x, y = check_pair(x, y)
    return 0.5 * float(np.sum(np.abs(x - y)))


def _w1_closed(x, y):
    return float(np.sum(np.abs(np.cumsum(x) - np.cumsum(y))))


@numba.njit(cache=False, nogil=True)
def _ssp_transport(supply, demand, cost):  # pragma: no cover - compiled
    a = supply.shape[0]
    b = demand.shape[0]
    nv = a + b
    sup = supply.copy()
    dem = demand.copy()
    flow = np.zeros((a, b))
    pot = np.zeros(nv)
    dist = np.empty(nv)
    done = np.empty(nv, dtype=np.bool_)
    pred = np.empty(nv, dtype=np.int64)
    eps = 1e-15 * max(supply.sum(), demand.sum(), 1e-300)
    inf = np.inf
    while True:
        has_sup = False
        for i in range(a):
            if sup[i] > eps:
                has_sup = True
                break
        has_dem = False
        for j in range(b):
            if dem[j] > eps:
                has_dem = True
                break
        if not (has_sup and has_dem):
            break
        for v in range(nv):
            dist[v] = inf
            done[v] = False
            pred[v] = -1
        for i in range(a):
            if sup[i] > eps:
                dist[i] = 0.0
        target = -1
        while True:
            u = -1
            best = inf
            for v in range(nv):
                if not done[v] and dist[v] < best:
                    best = dist[v]
                    u = v
            if u == -1:
                break
            done[u] = True
            if u >= a:
                j = u - a
                if dem[j] > eps:
                    target = u
                    break
                for i in range(a):
                    if not done[i] and flow[i, j] > eps:
                        nd = dist[u] - cost[i, j] + pot[u] - pot[i]
                        if nd < dist[i]:
                            dist[i] = nd
                            pred[i] = u
            else:
                for j in range(b):
                    v = a + j
                    if not done[v]:
                        nd = dist[u] + cost[u, j] + pot[u] - pot[v]
                        if nd < dist[v]:
                            dist[v] = nd
                            pred[v] = u
        if target == -1:
            break
        dt = dist[target]
        for v in range(nv):
            pot[v] += dist[v] if dist[v] < dt else dt
        delta = dem[target - a]
        v = target
        while pred[v] != -1:
            u = pred[v]
            if u >= a:
                if flow[v, u - a] < delta:
                    delta = flow[v, u - a]
            v = u
        if sup[v] < delta:
            delta = sup[v]
        source = v
        v = target
        while pred[v] != -1:
            u = pred[v]
            if u >= a:
                flow[v, u - a] -= delta
            else:
                flow[u, v - a] += delta
            v = u
        sup[source] -= delta
        dem[target - a] -= delta
    total = 0.0
    for i in range(a):
        for j in range(b):
            if flow[i, j] > 0.0:
                total += flow[i, j] * cost[i, j]
    return total


def transport_cost(x, y, cost=None) -> float:
    """Optimal transport cost between two equal-mass histograms.

    Solved as a transportation problem by successive shortest paths with
    node potentials. ``cost[i, j]`` is the cost of moving unit mass from bin
    ``i`` of ``x`` to bin ``j`` of ``y``; the default is ``|i - j|``, which
    makes the result the first Wasserstein distance on a unit-spaced line.
    Bins without mass are dropped before solving.
    """
    x, y = check_pair(x, y)
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("transport requires non-negative histograms")
    if abs(x.sum() - y.sum()) > 1e-9:
        raise ValueError(f"unequal mass: {x.sum()!r} vs {y.sum()!r}")
    xi = np.flatnonzero(x > 0)
    yj = np.flatnonzero(y > 0)
    if xi.size == 0 or yj.size == 0:
        return 0.0
    if cost is None:
        c = np.abs(xi[:, None] - yj[None, :]).astype(np.float64)
    else:
        cost = np.asarray(cost, dtype=np.float64)
        if cost.shape != (x.size, y.size):
            raise ValueError(f"cost matrix shape {cost.shape} != {(x.size, y.size)}")
        c = np.ascontiguousarray(cost[np.ix_(xi, yj)])
    return float(_ssp_transport(x[xi].copy(), y[yj].copy(), c))


def wasserstein1(x, y, method="closed", cost=None) -> float:
    """First Wasserstein (earth mover's) distance between 1-D histograms.

    Bins sit at integer positions ``0..d-1``. ``method="closed"`` uses the
    cumulative-sum formula; ``method="transport"`` runs the general solver,
    which also accepts an explicit ``cost`` matrix.
    """
    x, y = check_pair(x, y)
    if abs(x.sum() - y.sum()) > 1e-9:
        raise ValueError(f"unequal mass: {x.sum()!r} vs {y.sum()!r}")
    if method == "closed":
        if cost is not None:
            raise ValueError("an explicit cost matrix needs method='transport'")
        return _w1_closed(x, y)
    if method == "transport":
        return transport_cost(x, y, cost)
    raise ValueError(f"unknown method {method!r}")


def _scalar_distance(family, x, y):
    base = family.base_distance
    if base == "sqeuclidean":
        return float(np.sum((x - y) ** 2))
    if base == "tv":
        return tv_distance(x, y)
    return wasserstein1(x, y)


def _from_distance(family, d, scale):
    if family is KernelFamily.RBF or family is KernelFamily.EMD:
        return np.exp(-d / (2.0 * scale * scale))
    if family is KernelFamily.LAPLACIAN_TV:
        return np.exp(-scale * d)
    if family is KernelFamily.RBF_TV:
        return np.exp(-(d * d) / (2.0 * scale * scale))
    raise ValueError(f"{family.value} is not distance based")


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Kernel value for a single pair of histograms."""
    x, y = check_pair(x, y)
    if spec.family is KernelFamily.LINEAR:
        return float(np.dot(x, y))
    return float(_from_distance(spec.family, _scalar_distance(spec.family, x, y), spec.scale))


def _w1_pairwise(X, Y, same, solver, n_jobs=1):
    if solver == "closed":
        cx = np.cumsum(X, axis=1)
        if same:
            return squareform(pdist(cx, "cityblock"))
        return cdist(cx, np.cumsum(Y, axis=1), "cityblock")
    if solver != "transport":
        raise ValueError(f"unknown EMD solver {solver!r}")
    n, m = X.shape[0], Y.shape[0]
    out = np.zeros((n, m))

    def row(i):
        for j in range(i + 1 if same else 0, m):
            out[i, j] = transport_cost(X[i], Y[j])

    if n_jobs == 1:
        for i in range(n):
            row(i)
    else:
        with ThreadPoolExecutor(max_workers=None if n_jobs < 1 else n_jobs) as pool:
            list(pool.map(row, range(n)))
    if same:
        out = out + out.T
    return out


def pairwise_distances(X, Y=None, metric="sqeuclidean", solver="closed", n_jobs=1) -> np.ndarray:
    """Matrix of base distances between the rows of ``X`` and ``Y``.

    ``metric`` is ``"sqeuclidean"``, ``"tv"`` or ``"w1"``. With ``Y=None``
    the result is computed once per unordered pair and mirrored, so it is
    exactly symmetric with a zero diagonal.
    """
    X = check_histograms(X, "X")
    same = Y is None
    Y = X if same else check_histograms(Y, "Y")
    check_same_support(X, Y)
    if metric == "sqeuclidean":
        return squareform(pdist(X, "sqeuclidean")) if same else cdist(X, Y, "sqeuclidean")
    if metric == "tv":
        d = squareform(pdist(X, "cityblock")) if same else cdist(X, Y, "cityblock")
        return 0.5 * d
    if metric == "w1":
        check_equal_mass(X, None if same else Y)
        return _w1_pairwise(X, Y, same, solver, n_jobs)
    raise ValueError(f"unknown metric {metric!r}")


def kernel_from_distances(family, D, scale) -> np.ndarray:
    """Exponentiate a base-distance matrix for one scale value."""
    return _from_distance(parse_kernel(family), np.asarray(D, dtype=np.float64), float(scale))


def gram(spec: KernelSpec, X, Y=None, emd_solver="closed", n_jobs=1) -> GramMatrix:
    """Kernel matrix ``K[i, j] = k(X[i], Y[j])``.

    With ``Y=None`` (X against itself) only the upper triangle is computed
    and mirrored, and the result is flagged symmetric.
    """
    X = check_histograms(X, "X")
    same = Y is None
    Yh = X if same else check_histograms(Y, "Y")
    check_same_support(X, Yh)
    if spec.family is KernelFamily.LINEAR:
        K = X @ Yh.T
        if same:
            K = np.triu(K) + np.triu(K, 1).T
    else:
        D = pairwise_distances(X, None if same else Yh, spec.family.base_distance, emd_solver, n_jobs)
        K = _from_distance(spec.family, D, spec.scale)
    labels_x = tuple(range(X.shape[0]))
    labels_y = labels_x if same else tuple(range(Yh.shape[0]))
    return GramMatrix(K, labels_x, labels_y, symmetric=same)


def psd_check(g) -> float:
    """Smallest eigenvalue of a symmetric Gram matrix.

    A value ``>= -tol`` (for a tolerance of your choosing) indicates the
    matrix is positive semidefinite up to round-off.
    """
    K = g.entries if isinstance(g, GramMatrix) else np.asarray(g, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"p.s.d. check needs a square matrix, got shape {K.shape}")
    if not np.array_equal(K, K.T):
        raise ValueError("p.s.d. check needs a symmetric matrix")
    if K.size == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(K)[0])
