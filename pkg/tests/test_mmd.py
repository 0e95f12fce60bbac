
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from conftest import random_histograms
from graphmmd.kernels import KernelFamily, KernelSpec, gram, kernel_eval, parse_kernel
from graphmmd.mmd import MMD, build_cache, mmd2, mmd2_biased, mmd_sweep

FAMILIES = ["linear", "rbf", "laplacian-tv", "emd", "rbf-tv-unsafe"]


def spec(name, scale=1.0):
    fam = parse_kernel(name)
    return KernelSpec(fam, None if fam is KernelFamily.LINEAR else scale,
                      allow_invalid=fam is KernelFamily.RBF_TV)


def oracle(X, Y, k, biased):
    """Scalar triple loop over the MMD^2 definition."""
    n, m = len(X), len(Y)
    sxx = sum(k(X[i], X[j]) for i in range(n) for j in range(n) if biased or i != j)
    syy = sum(k(Y[i], Y[j]) for i in range(m) for j in range(m) if biased or i != j)
    sxy = sum(k(X[i], Y[j]) for i in range(n) for j in range(m))
    if biased:
        return sxx / n**2 + syy / m**2 - 2 * sxy / (n * m)
    return sxx / (n * (n - 1)) + syy / (m * (m - 1)) - 2 * sxy / (n * m)


def test_linear_single_points():
    K = spec("linear")
    r = mmd2_biased(gram(K, [[1.0, 0.0]]), gram(K, [[0.0, 1.0]]), gram(K, [[1.0, 0.0]], [[0.0, 1.0]]))
    assert r.value == 2.0


def test_biased_zero_for_identical(rng):
    X = random_histograms(rng, 7, 10)
    for name in FAMILIES:
        assert abs(mmd2(X, X, spec(name), "biased").value) <= 1e-12


def test_unbiased_two_identical_points():
    x = np.array([0.3, 0.7])
    for name in FAMILIES:
        assert mmd2([x, x], [x, x], spec(name), "unbiased").value == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("estimator", ["biased", "unbiased"])
def test_8_vs_11_rbf_oracle(rng, estimator):
    X = random_histograms(rng, 8, 12)
    Y = random_histograms(rng, 11, 12)
    s = spec("rbf", 1.0)
    got = mmd2(X, Y, s, estimator).value
    want = oracle(X, Y, lambda a, b: kernel_eval(s, a, b), estimator == "biased")
    assert abs(got - want) <= 1e-12


def test_unbiased_null_calibration():
    rng = np.random.default_rng(3)
    base = rng.dirichlet(np.ones(6), size=200)
    vals = []
    for _ in range(100):
        idx = rng.choice(200, 20, replace=False)
        vals.append(mmd2(base[idx[:10]], base[idx[10:]], spec("rbf", 0.5), "unbiased").value)
    vals = np.array(vals)
    assert abs(vals.mean()) <= 3 * vals.std(ddof=1) / np.sqrt(len(vals))


def test_unbiased_may_be_negative(rng):
    # reported raw, never clamped
    found = False
    for _ in range(50):
        X = random_histograms(rng, 5, 6)
        Y = random_histograms(rng, 5, 6)
        if mmd2(X, Y, spec("rbf", 0.3), "unbiased").value < 0:
            found = True
            break
    assert found


def test_unbiased_needs_two_samples(rng):
    X = random_histograms(rng, 1, 4)
    with pytest.raises(ValueError):
        mmd2(X, X, spec("rbf"), "unbiased")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(FAMILIES), st.sampled_from(["biased", "unbiased"]))
def test_symmetry(seed, name, estimator):
    rng = np.random.default_rng(seed)
    X = random_histograms(rng, 5, 7)
    Y = random_histograms(rng, 6, 7)
    a = mmd2(X, Y, spec(name, 0.5), estimator).value
    b = mmd2(Y, X, spec(name, 0.5), estimator).value
    assert abs(a - b) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(["linear", "rbf", "laplacian-tv", "emd"]),
       st.floats(1e-2, 1e2))
def test_biased_nonnegative_for_psd_kernels(seed, name, scale):
    rng = np.random.default_rng(seed)
    X = random_histograms(rng, 4, 6)
    Y = random_histograms(rng, 5, 6)
    assert mmd2(X, Y, spec(name, scale), "biased").value >= -1e-10


# cache and sweep -------------------------------------------------------------------


def test_cache_self_distances(rng):
    X = random_histograms(rng, 3, 5)
    c = build_cache(X, X, "rbf")
    assert np.all(np.diag(c.dxx) == 0) and np.array_equal(c.dxx, c.dxx.T)


def test_cache_tv_cross_entry():
    c = build_cache([[1.0, 0.0]], [[0.0, 1.0]], "laplacian-tv")
    assert c.dxy[0, 0] == 1.0


def test_cache_sqeuclidean_matches_loop(rng):
    X = random_histograms(rng, 4, 6)
    Y = random_histograms(rng, 5, 6)
    c = build_cache(X, Y, "rbf")
    loop = np.array([[np.sum((x - y) ** 2) for y in Y] for x in X])
    np.testing.assert_allclose(c.dxy, loop, atol=1e-15)


@pytest.mark.parametrize("name", ["rbf", "laplacian-tv", "emd"])
def test_sweep_singleton_equals_direct(rng, name):
    X = random_histograms(rng, 6, 8)
    Y = random_histograms(rng, 7, 8)
    (r,) = mmd_sweep(build_cache(X, Y, name), name, [0.3])
    assert abs(r.value - mmd2(X, Y, spec(name, 0.3)).value) <= 1e-12


def test_sweep_empty(rng):
    X = random_histograms(rng, 3, 4)
    assert mmd_sweep(build_cache(X, X, "rbf"), "rbf", []) == []


def test_sweep_family_mismatch(rng):
    X = random_histograms(rng, 3, 4)
    with pytest.raises(ValueError, match="needs"):
        mmd_sweep(build_cache(X, X, "rbf"), "laplacian-tv", [1.0])


def test_cache_rejects_linear(rng):
    X = random_histograms(rng, 3, 4)
    with pytest.raises(ValueError):
        build_cache(X, X, "linear")


def test_emd_requires_equal_mass(rng):
    X = random_histograms(rng, 3, 4, normalize=False)
    with pytest.raises(ValueError):
        build_cache(X, X, "emd")


def test_sweep_on_100x100_matches_naive():
    rng = np.random.default_rng(7)
    X = random_histograms(rng, 100, 100)
    Y = random_histograms(rng, 100, 100)
    scales = [10.0 ** k for k in range(-5, 6)]
    swept = [r.value for r in mmd_sweep(build_cache(X, Y, "rbf"), "rbf", scales)]
    naive = [mmd2(X, Y, spec("rbf", s)).value for s in scales]
    np.testing.assert_allclose(swept, naive, rtol=0, atol=1e-12)


# estimator -------------------------------------------------------------------------


def test_estimator_api(rng):
    X = random_histograms(rng, 6, 5)
    Y = random_histograms(rng, 6, 5)
    est = MMD(kernel="rbf", scale=0.5).fit(X)
    assert est.n_features_in_ == 5
    assert est.discrepancy(Y) == pytest.approx(mmd2(X, Y, spec("rbf", 0.5)).value)
    assert est.score(Y) == -est.discrepancy(Y)
    sweep = est.sweep(Y, [0.1, 0.5])
    assert sweep[1] == pytest.approx(est.discrepancy(Y), abs=1e-12)
    assert clone(est).get_params()["scale"] == 0.5


def test_estimator_unfitted():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        MMD().discrepancy([[1.0]])


def test_estimator_rejects_invalid_kernel(rng):
    from graphmmd.exceptions import InvalidKernelError

    with pytest.raises(InvalidKernelError):
        MMD(kernel="rbf-tv-unsafe").fit(random_histograms(rng, 3, 4))
