"""Maximum mean discrepancy estimators and the cached scale sweep.

All values are squared MMD (``mmd2``). The unbiased estimator drops the
self-comparison diagonal terms and may be negative; it is reported as is.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_equal_mass, check_histograms, check_same_support, check_scales
from .kernels import (
    GramMatrix,
    KernelFamily,
    KernelSpec,
    gram,
    kernel_from_distances,
    pairwise_distances,
    parse_kernel,
)

__all__ = [
    "Estimator",
    "MmdResult",
    "GramCache",
    "mmd2_biased",
    "mmd2_unbiased",
    "mmd2",
    "build_cache",
    "mmd_sweep",
    "MMD",
]


class Estimator(str, Enum):
    BIASED = "biased"
    UNBIASED = "unbiased"


@dataclass(frozen=True)
class MmdResult:
    value: float
    estimator: Estimator
    kernel: KernelSpec | None
    n: int
    m: int

    def __float__(self):
        return self.value


def _entries(k):
    return k.entries if isinstance(k, GramMatrix) else np.asarray(k, dtype=np.float64)


def _check_grams(kxx, kyy, kxy):
    kxx, kyy, kxy = _entries(kxx), _entries(kyy), _entries(kxy)
    n, m = kxx.shape[0], kyy.shape[0]
    if kxx.shape != (n, n) or kyy.shape != (m, m):
        raise ValueError(f"within-set Gram matrices must be square, got {kxx.shape} and {kyy.shape}")
    if kxy.shape != (n, m):
        raise ValueError(f"cross Gram matrix has shape {kxy.shape}, expected {(n, m)}")
    if n == 0 or m == 0:
        raise ValueError("MMD needs non-empty samples")
    return kxx, kyy, kxy, n, m


def _biased(kxx, kyy, kxy, n, m):
    return kxx.sum() / (n * n) + kyy.sum() / (m * m) - 2.0 * kxy.sum() / (n * m)


def _unbiased(kxx, kyy, kxy, n, m):
    if n < 2 or m < 2:
        raise ValueError(f"unbiased MMD needs at least 2 samples per set, got n={n}, m={m}")
    sxx = kxx.sum() - np.trace(kxx)
    syy = kyy.sum() - np.trace(kyy)
    return sxx / (n * (n - 1)) + syy / (m * (m - 1)) - 2.0 * kxy.sum() / (n * m)


def mmd2_biased(kxx, kyy, kxy, kernel=None) -> MmdResult:
    """Biased MMD^2 from the three Gram matrices (includes self-comparisons)."""
    kxx, kyy, kxy, n, m = _check_grams(kxx, kyy, kxy)
    return MmdResult(float(_biased(kxx, kyy, kxy, n, m)), Estimator.BIASED, kernel, n, m)


def mmd2_unbiased(kxx, kyy, kxy, kernel=None) -> MmdResult:
    """Unbiased MMD^2; diagonal terms of ``kxx`` and ``kyy`` are excluded."""
    kxx, kyy, kxy, n, m = _check_grams(kxx, kyy, kxy)
    return MmdResult(float(_unbiased(kxx, kyy, kxy, n, m)), Estimator.UNBIASED, kernel, n, m)


_REDUCE = {Estimator.BIASED: mmd2_biased, Estimator.UNBIASED: mmd2_unbiased}


def mmd2(X, Y, kernel: KernelSpec, estimator="unbiased", emd_solver="closed", n_jobs=1) -> MmdResult:
    """MMD^2 between two histogram sets, building the Gram matrices directly."""
    X = check_histograms(X, "X")
    Y = check_histograms(Y, "Y")
    check_same_support(X, Y)
    est = Estimator(estimator)
    kxx = gram(kernel, X, emd_solver=emd_solver, n_jobs=n_jobs)
    kyy = gram(kernel, Y, emd_solver=emd_solver, n_jobs=n_jobs)
    kxy = gram(kernel, X, Y, emd_solver=emd_solver, n_jobs=n_jobs)
    return _REDUCE[est](kxx, kyy, kxy, kernel=kernel)


@dataclass(frozen=True)
class GramCache:
    """Pairwise base distances of two sets, reusable across kernel scales."""

    dxx: np.ndarray
    dyy: np.ndarray
    dxy: np.ndarray
    distance: str

    @property
    def n(self):
        return self.dxx.shape[0]

    @property
    def m(self):
        return self.dyy.shape[0]

    def compatible(self, family: KernelFamily):
        return family.base_distance == self.distance


def build_cache(X, Y, family, emd_solver="closed") -> GramCache:
    """Compute the distances ``family`` exponentiates, once, for both sets.

    The cache depends only on the family's base distance, so the RBF and
    EMD families (squared Euclidean and W1) and the TV-based families can
    each be swept over many scales from one cache.
    """
    fam = parse_kernel(family)
    metric = fam.base_distance
    if metric is None:
        raise ValueError("the linear kernel has no scale and is not cached")
    X = check_histograms(X, "X")
    Y = check_histograms(Y, "Y")
    check_same_support(X, Y)
    if metric == "w1":
        check_equal_mass(X, Y)
    return GramCache(
        dxx=pairwise_distances(X, None, metric, emd_solver),
        dyy=pairwise_distances(Y, None, metric, emd_solver),
        dxy=pairwise_distances(X, Y, metric, emd_solver),
        distance=metric,
    )


def mmd_sweep(cache: GramCache, family, scales, estimator="unbiased", allow_invalid=False):
    """MMD^2 for every scale in ``scales`` from cached distances.

    Returns one :class:`MmdResult` per scale, in the given order.
    """
    fam = parse_kernel(family)
    if not cache.compatible(fam):
        raise ValueError(
            f"cache holds {cache.distance!r} distances but kernel {fam.value!r} "
            f"needs {fam.base_distance!r}"
        )
    est = Estimator(estimator)
    reduce = _REDUCE[est]
    out = []
    for s in check_scales(scales):
        spec = KernelSpec(fam, s, allow_invalid=allow_invalid)
        out.append(
            reduce(
                kernel_from_distances(fam, cache.dxx, s),
                kernel_from_distances(fam, cache.dyy, s),
                kernel_from_distances(fam, cache.dxy, s),
                kernel=spec,
            )
        )
    return out


class MMD(BaseEstimator):
    """Squared MMD between a fitted reference sample and new samples.

    Parameters
    ----------
    kernel : str, default="rbf"
        One of ``linear``, ``rbf``, ``laplacian-tv``, ``emd``
        (``rbf-tv-unsafe`` needs ``allow_invalid=True``).
    scale : float or None, default=1.0
        Sigma (or lambda for ``laplacian-tv``). Ignored for ``linear``.
    estimator : {"unbiased", "biased"}, default="unbiased"
    allow_invalid : bool, default=False
    emd_solver : {"closed", "transport"}, default="closed"

    Attributes
    ----------
    reference_ : ndarray of shape (n_samples, n_bins)
        Histograms seen in :meth:`fit`.

    Examples
    --------
    >>> import numpy as np
    >>> X = np.array([[1.0, 0.0], [0.5, 0.5]])
    >>> MMD(kernel="linear", estimator="biased").fit(X).discrepancy(X)
    0.0
    """

    def __init__(self, kernel="rbf", scale=1.0, estimator="unbiased",
                 allow_invalid=False, emd_solver="closed"):
        self.kernel = kernel
        self.scale = scale
        self.estimator = estimator
        self.allow_invalid = allow_invalid
        self.emd_solver = emd_solver

    def kernel_spec(self, scale=None):
        fam = parse_kernel(self.kernel)
        s = None if fam is KernelFamily.LINEAR else (self.scale if scale is None else scale)
        return KernelSpec(fam, s, allow_invalid=self.allow_invalid)

    def fit(self, X, y=None):
        self.kernel_spec()
        Estimator(self.estimator)
        self.reference_ = check_histograms(X, "X")
        self.n_features_in_ = self.reference_.shape[1]
        return self

    def discrepancy(self, Y) -> float:
        """MMD^2 between the reference sample and ``Y`` (lower is closer)."""
        check_is_fitted(self, "reference_")
        res = mmd2(self.reference_, Y, self.kernel_spec(), self.estimator, self.emd_solver)
        return res.value

    def score(self, Y, y=None) -> float:
        """Negative MMD^2, so that greater is better as scikit-learn expects."""
        return -self.discrepancy(Y)

    def sweep(self, Y, scales):
        """MMD^2 against ``Y`` for each scale, reusing one distance cache."""
        check_is_fitted(self, "reference_")
        fam = parse_kernel(self.kernel)
        if fam is KernelFamily.LINEAR:
            return [self.discrepancy(Y) for _ in scales]
        cache = build_cache(self.reference_, Y, fam, self.emd_solver)
        res = mmd_sweep(cache, fam, scales, self.estimator, self.allow_invalid)
        return [r.value for r in res]
