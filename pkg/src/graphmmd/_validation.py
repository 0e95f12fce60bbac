"""Input validation helpers shared by the estimators and functional API."""

import numpy as np

from .descriptors import Histogram

MASS_TOL = 1e-9


def as_vector(x, name="x"):
    v = x.values if isinstance(x, Histogram) else np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"{name} must be a 1-D histogram, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains non-finite values")
    return v


def check_pair(x, y):
    x, y = as_vector(x, "x"), as_vector(y, "y")
    if x.size != y.size:
        raise ValueError(f"histogram length mismatch: {x.size} != {y.size}")
    return x, y


def check_histograms(X, name="X", min_samples=1):
    """Coerce a list of histograms or a 2-D array into a float ``(n, d)`` array."""
    if isinstance(X, np.ndarray):
        arr = np.asarray(X, dtype=np.float64)
    else:
        rows = [as_vector(h, name) for h in X]
        if not rows:
            arr = np.empty((0, 0))
        else:
            if len({r.size for r in rows}) != 1:
                raise ValueError(f"histograms in {name} do not share a support")
            arr = np.vstack(rows)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_samples, n_bins), got shape {arr.shape}")
    if arr.shape[0] < min_samples:
        raise ValueError(f"{name} needs at least {min_samples} sample(s), got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_same_support(X, Y):
    if X.shape[1] != Y.shape[1]:
        raise ValueError(
            f"histogram length mismatch between sets: {X.shape[1]} != {Y.shape[1]}"
        )


def check_equal_mass(X, Y=None):
    masses = X.sum(axis=1) if Y is None else np.concatenate([X.sum(axis=1), Y.sum(axis=1)])
    if masses.size and np.ptp(masses) > MASS_TOL:
        raise ValueError(
            "Wasserstein distance needs histograms of equal total mass "
            f"(found masses in [{masses.min():.6g}, {masses.max():.6g}]); normalize them"
        )


def check_scales(scales):
    out = [float(s) for s in scales]
    for s in out:
        if not np.isfinite(s) or s <= 0:
            raise ValueError(f"kernel scale must be positive and finite, got {s}")
    return out
