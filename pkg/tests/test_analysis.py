import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphmmd.analysis import (
    CorrelationReport,
    CorrelationRow,
    KernelGrid,
    KernelSelector,
    best_worst_heatmap,
    mutual_information,
    parse_scale_grid,
    pearson,
    perturbation_experiment,
    pseudo_models,
    rank_models,
    select_config,
    spearman,
)
from graphmmd.descriptors import DescriptorSpec
from graphmmd.exceptions import ConstantSeriesError
from graphmmd.graph import GraphSet
from graphmmd.perturb import LevelGrid
from graphmmd.synth import GeneratorSpec, generate_dataset



# oracles ---------------------------------------------------------------------------


def pearson_oracle(xs, ys):
    n = len(xs)
    mx, my = sum(xs) / n, sum(ys) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(xs, ys))
    vx = sum((a - mx) ** 2 for a in xs)
    vy = sum((b - my) ** 2 for b in ys)
    return cov / math.sqrt(vx * vy)


def average_ranks(xs):
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    ranks = [0.0] * len(xs)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and xs[order[j + 1]] == xs[order[i]]:
            j += 1
        for k in range(i, j + 1):
            ranks[order[k]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def mi_oracle(xs, ys, q):
    """Contingency-table MI in bits, quantile bins from average ranks."""
    n = len(xs)

    def bins(v):
        return [min(int((r - 1) * q // n), q - 1) for r in average_ranks(v)]

    bx, by = bins(xs), bins(ys)
    table = {}
    for a, b in zip(bx, by):
        table[(a, b)] = table.get((a, b), 0) + 1
    px = {a: bx.count(a) / n for a in set(bx)}
    py = {b: by.count(b) / n for b in set(by)}
    return sum(c / n * math.log2((c / n) / (px[a] * py[b])) for (a, b), c in table.items())


# dependence measures ---------------------------------------------------------------


def test_pearson_examples():
    xs = np.arange(10.0)
    assert pearson(xs, 2 * xs + 1) == pytest.approx(1.0, abs=1e-12)
    assert pearson(xs, -xs) == pytest.approx(-1.0, abs=1e-12)
    assert abs(pearson([1, 2, 3, 4], [1, 3, 2, 4]) - pearson_oracle([1, 2, 3, 4], [1, 3, 2, 4])) <= 1e-12


def test_pearson_constant():
    with pytest.raises(ConstantSeriesError) as exc:
        pearson([1, 2, 3], [5, 5, 5])
    assert exc.value.code == "CONSTANT_SERIES"


def test_spearman_examples():
    xs = np.linspace(-2, 3, 15)
    assert spearman(xs, xs**3) == 1.0
    assert spearman(xs, xs[::-1]) == -1.0
    got = spearman([1, 1, 2], [3, 5, 4])
    assert abs(got - pearson_oracle(average_ranks([1, 1, 2]), average_ranks([3, 5, 4]))) <= 1e-12


def test_mi_examples():
    xs = np.arange(40.0)
    assert mutual_information(xs, xs, q=4) == pytest.approx(2.0, abs=1e-12)
    assert mutual_information(xs, np.full(40, 3.0), q=4) == 0.0


def test_mi_against_contingency_oracle():
    rng = np.random.default_rng(4)
    for _ in range(20):
        xs = rng.normal(size=40)
        ys = rng.permutation(xs) + 0.1 * rng.normal(size=40)
        assert abs(mutual_information(xs, ys, q=5) - mi_oracle(list(xs), list(ys), 5)) <= 1e-12


series = st.lists(st.floats(-1e3, 1e3, allow_nan=False), min_size=8, max_size=30)


@settings(max_examples=80, deadline=None)
@given(series, st.integers(0, 2**31))
def test_measure_ranges(xs, seed):
    ys = list(np.random.default_rng(seed).permutation(xs) + np.arange(len(xs)))
    for f in (pearson, spearman):
        try:
            v = f(xs, ys)
        except ConstantSeriesError:
            continue
        assert -1 - 1e-12 <= v <= 1 + 1e-12
    assert mutual_information(xs, ys) >= -1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_affine_invariance(seed, a, b):
    rng = np.random.default_rng(seed)
    xs, ys = rng.normal(size=12), rng.normal(size=12)
    assert abs(pearson(xs, ys) - pearson(a * xs + b, ys)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31))
def test_spearman_monotone_invariance(seed):
    rng = np.random.default_rng(seed)
    xs, ys = rng.normal(size=15), rng.normal(size=15)
    assert spearman(xs, ys) == spearman(np.exp(xs), ys ** 3)


def test_scale_grid():
    assert parse_scale_grid("1e-5:1e5:log10") == [10.0**k for k in range(-5, 6)]
    with pytest.raises(ValueError):
        parse_scale_grid("1e-5:1e5:linear")


# reports, heatmaps and selection ---------------------------------------------------


def row(coef, descriptor="degree", kernel="rbf", scale=1.0, perturbation="add-edges", dataset="d"):
    return CorrelationRow(dataset, descriptor, 5, kernel, scale, perturbation, "pearson",
                          coef, "ok" if coef is not None else "CONSTANT_SERIES", [0.0, 1.0], [0.0, 1.0])


def test_heatmap_single_row():
    hm = best_worst_heatmap(CorrelationReport([row(0.4)]))
    assert hm.best == [[0.4]] and hm.worst == [[0.4]]


def test_heatmap_best_worst():
    hm = best_worst_heatmap(CorrelationReport([row(0.9), row(-0.4, scale=10.0)]))
    assert hm.best == [[0.9]] and hm.worst == [[-0.4]]


def test_heatmap_missing_cell():
    hm = best_worst_heatmap(CorrelationReport([row(None), row(0.5, descriptor="spectral")]))
    assert hm.descriptors == ["degree", "spectral"]
    assert hm.best == [[None], [0.5]]


def test_select_picks_max():
    sel = select_config(CorrelationReport([row(0.8), row(0.95, scale=10.0)]))
    assert sel.scale == 10.0 and sel.objective == 0.95


def test_select_best_average():
    rows = [row(0.9, scale=1.0, perturbation="add-edges"), row(0.9, scale=1.0, perturbation="remove-edges"),
            row(1.0, scale=10.0, perturbation="add-edges"), row(0.7, scale=10.0, perturbation="remove-edges")]
    sel = select_config(CorrelationReport(rows), "best-average")
    assert sel.scale == 1.0 and sel.objective == pytest.approx(0.9)


def test_select_best_single():
    rows = [row(0.9, scale=1.0, perturbation="add-edges"), row(0.2, scale=1.0, perturbation="remove-edges"),
            row(0.5, scale=10.0, perturbation="add-edges"), row(0.8, scale=10.0, perturbation="remove-edges")]
    sel = select_config(CorrelationReport(rows), "best-single", perturbation="remove-edges")
    assert sel.scale == 10.0


def test_select_tie_rules():
    rows = [row(0.7, kernel="emd", scale=1.0), row(0.7, kernel="rbf", scale=10.0),
            row(0.7, kernel="laplacian-tv", scale=1.0), row(0.7, kernel="rbf", scale=1.0)]
    sel = select_config(CorrelationReport(rows))
    assert (sel.kernel, sel.scale) == ("rbf", 1.0)
    rows = [row(0.7, kernel="linear", scale=None), row(0.7, kernel="rbf", scale=1e-5)]
    assert select_config(CorrelationReport(rows)).kernel == "linear"


def test_select_skips_constant():
    rows = [row(None, scale=1.0), row(0.1, scale=10.0)]
    assert select_config(CorrelationReport(rows)).scale == 10.0


def test_report_round_trip():
    rep = CorrelationReport([row(0.5), row(None, scale=2.0)], ["w"], "unbiased", 3)
    back = CorrelationReport.from_dict(rep.to_dict())
    assert back.rows == rep.rows and back.warnings == ["w"] and back.seed == 3
    assert rep.to_csv().splitlines()[0].startswith("dataset,descriptor,n_bin,kernel,scale")


# experiment ------------------------------------------------------------------------


@pytest.fixture(scope="module")
def er_base():
    return generate_dataset(GeneratorSpec("er", 20, (15, 15), p_edge=0.3), seed=42, name="er")


def test_experiment_cardinality(er_base):
    scales = [0.1, 1.0, 10.0]
    descs = ["degree", "clustering"]
    kernels = ["rbf", "laplacian-tv", "emd", "linear"]
    kinds = ["add-edges", "remove-edges"]
    rep = perturbation_experiment(er_base, descs, kernels, kinds, LevelGrid((0, 0.5, 1.0)),
                                  seed=1, scales=scales)
    scaled = [r for r in rep.rows if r.kernel != "linear"]
    assert len(scaled) == len(descs) * 3 * len(scales) * len(kinds)
    assert len(rep.rows) - len(scaled) == len(descs) * len(kinds)
    assert rep.rows == sorted(rep.rows, key=CorrelationRow.sort_key)


def test_experiment_single_level_constant(er_base):
    rep = perturbation_experiment(er_base, ["degree"], ["rbf"], ["add-edges"], LevelGrid((0.5,)),
                                  seed=1, scales=[1.0])
    assert all(r.status == "CONSTANT_SERIES" and r.coefficient is None for r in rep.rows)


def test_experiment_rbf_tracks_add_edges():
    base = generate_dataset(GeneratorSpec("er", 50, (30, 30), p_edge=0.3), seed=42)
    rep = perturbation_experiment(base, [DescriptorSpec("degree", normalize=False)], ["rbf"],
                                  ["add-edges"], seed=0)
    assert max(r.coefficient for r in rep.rows if r.coefficient is not None) >= 0.9


def test_experiment_mi_warns(er_base):
    rep = perturbation_experiment(er_base, ["degree"], ["rbf"], ["add-edges"],
                                  LevelGrid(tuple(i / 10 for i in range(11))), seed=1,
                                  scales=[1.0], measure="mi")
    assert rep.warnings and "direction" in rep.warnings[0]


def test_experiment_deterministic(er_base):
    args = (er_base, ["spectral"], ["rbf"], ["rewire-edges"], LevelGrid((0, 0.5, 1.0)))
    a = perturbation_experiment(*args, seed=5, scales=[1.0])
    b = perturbation_experiment(*args, seed=5, scales=[1.0], n_jobs=4)
    assert a.to_dict() == b.to_dict()


def test_full_grid_heatmap_gap(er_base):
    rep = perturbation_experiment(er_base, ["degree", "clustering", "spectral"],
                                  ["linear", "rbf", "laplacian-tv", "emd"],
                                  grid=LevelGrid(tuple(i / 10 for i in range(11))), seed=0)
    gaps = []
    for kind in {r.perturbation for r in rep.rows}:
        hm = best_worst_heatmap(rep, kind)
        for b_row, w_row in zip(hm.best, hm.worst):
            for b, w in zip(b_row, w_row):
                if b is not None:
                    assert b >= w
                    gaps.append(b - w)
    assert max(gaps) >= 0.3


# ranking ---------------------------------------------------------------------------


def test_identical_model_ranks_first():
    spec = GeneratorSpec("er", 10, (12, 12))
    test = generate_dataset(spec, 0, name="test")
    train = generate_dataset(spec, 1, name="train")
    other = generate_dataset(GeneratorSpec("er", 10, (12, 12), p_edge=0.6), 2)
    rep = rank_models(test, train, {"same": test, "other": other}, ["degree"], ["rbf", "linear"],
                      estimator="biased")
    for e in rep.entries:
        assert abs(e["mmd2"]["same"]) <= 1e-12
        assert e["winner"] == "same"


def test_argmin_invariant_under_relabel_and_order():
    spec = GeneratorSpec("er", 15, (12, 12))
    test = generate_dataset(spec, 0)
    train = generate_dataset(spec, 1)
    models = pseudo_models(spec, (0.05, 0.2, 0.5), 0)
    a = rank_models(test, train, models, ["degree"], ["rbf"])
    renamed = {"z" + k: v for k, v in reversed(list(models.items()))}
    b = rank_models(test, train, renamed, ["degree"], ["rbf"])
    for ea, eb in zip(a.entries, b.entries):
        if not ea["tie"]:
            assert "z" + ea["winner"] == eb["winner"]


@pytest.fixture(scope="module")
def ba_setup():
    spec = GeneratorSpec("ba", 50, (30, 30), m=2)
    return spec, generate_dataset(spec, 0, name="test"), generate_dataset(spec, 1, name="train")


def test_pseudo_model_order_at_well_chosen_scale(ba_setup):
    spec, test, train = ba_setup
    rep = rank_models(test, train, pseudo_models(spec, (0.05, 0.2, 0.5), 0), ["degree"], ["rbf"], scales=[1.0])
    (e,) = rep.entries
    assert e["mmd2"]["A"] < e["mmd2"]["B"] < e["mmd2"]["C"]
    assert e["winner"] == "A" and not e["tie"]


def test_anchor_below_heavily_perturbed_model(ba_setup):
    spec, test, train = ba_setup
    sel = KernelSelector(levels=[i / 10 for i in range(11)], random_state=0).fit(train).selection_
    models = pseudo_models(spec, (0.5, 0.75), 0, names=["P50", "P75"])
    rep = rank_models(test, train, models, [sel.descriptor_spec()], [KernelGrid(sel.kernel, (sel.scale,))
                                                                     if sel.scale else sel.kernel])
    (e,) = rep.entries
    assert e["anchor"] < min(e["mmd2"].values())


def test_rank_flip_over_scales():
    spec = GeneratorSpec("er", 50, (30, 30), p_edge=0.3)
    test, train = generate_dataset(spec, 0), generate_dataset(spec, 1)
    rep = rank_models(test, train, pseudo_models(spec, (0.05, 0.2, 0.5), 0), ["degree"], ["rbf"])
    strict = {e["winner"] for e in rep.entries if not e["tie"]}
    assert len(strict) >= 2


def test_argmin_heatmap_needs_bins():
    spec = GeneratorSpec("er", 8, (12, 12))
    test, train = generate_dataset(spec, 0), generate_dataset(spec, 1)
    models = {"A": generate_dataset(spec, 2), "B": generate_dataset(spec, 3)}
    rep = rank_models(test, train, models, ["clustering"], ["rbf"], scales=[0.1, 1.0], n_bins=[10, 50])
    (hm,) = rep.argmin_heatmaps()
    assert hm["n_bins"] == [10, 50] and len(hm["winners"][0]) == 2
    assert rank_models(test, train, models, ["clustering"], ["rbf"], scales=[1.0]).argmin_heatmaps() == []


def test_kernel_selector_estimator(er_base):
    sel = KernelSelector(descriptors=["degree"], kernels=["rbf", "linear"], scales=[0.1, 1.0],
                         perturbations=["add-edges"], levels=[0, 0.5, 1.0], random_state=0)
    sel.fit(er_base)
    assert sel.selection_.descriptor == "degree"
    assert sel.best_estimator_.kernel == sel.selection_.kernel
    assert sel.get_params()["scales"] == [0.1, 1.0]
    assert sel.heatmap().descriptors == ["degree"]
    assert isinstance(er_base, GraphSet)


def test_single_point_is_constant():
    with pytest.raises(ConstantSeriesError):
        pearson([0.5], [1.0])
    with pytest.raises(ValueError):
        pearson([], [])
