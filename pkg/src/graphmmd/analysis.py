"""Correlating MMD with perturbation strength, selecting a kernel, ranking models.

The selection procedure: perturb a reference set at increasing strength,
measure MMD^2 from each perturbed set back to the reference for every
(descriptor, kernel, scale), and score each configuration by how strongly
its MMD^2 curve depends on the perturbation level. Configurations whose
curve tracks the perturbation are trustworthy; :func:`select_config` picks
the best one.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from enum import Enum

import numpy as np
from scipy.stats import rankdata
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .descriptors import DescriptorKind, DescriptorSpec, describe_set, make_descriptor, resolve_n_bin, stack
from .exceptions import ConstantSeriesError
from .graph import GraphSet, graphs_of
from .kernels import KernelFamily, KernelSpec, parse_kernel
from .mmd import MMD, Estimator, build_cache, mmd2, mmd_sweep
from .perturb import LevelGrid, PerturbationKind, parse_kind, perturb_sweep
from .synth import GeneratorSpec, generate_dataset

__all__ = [
    "Measure",
    "Strategy",
    "pearson",
    "spearman",
    "mutual_information",
    "dependence",
    "default_scales",
    "parse_scale_grid",
    "default_levels",
    "KernelGrid",
    "CorrelationRow",
    "CorrelationReport",
    "perturbation_experiment",
    "Heatmap",
    "best_worst_heatmap",
    "SelectionResult",
    "select_config",
    "RankingReport",
    "rank_models",
    "pseudo_models",
    "KernelSelector",
]

MI_WARNING = (
    "mutual information ignores the direction of dependence: an MMD curve "
    "that decreases with perturbation scores as high as one that increases"
)


class Measure(str, Enum):
    PEARSON = "pearson"
    SPEARMAN = "spearman"
    MI = "mi"


class Strategy(str, Enum):
    BEST_SINGLE_PERTURBATION = "best-single"
    BEST_AVERAGE = "best-average"


# dependence measures ---------------------------------------------------------


def _check_series(xs, ys, min_len=1):
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.size != y.size:
        raise ValueError("series must be 1-D and of equal length")
    if x.size < min_len:
        raise ValueError(f"series need at least {min_len} points, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("series contain non-finite values")
    return x, y


def pearson(xs, ys) -> float:
    """Product-moment correlation; a constant series raises ``ConstantSeriesError``."""
    x, y = _check_series(xs, ys)
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ConstantSeriesError("correlation undefined for a constant series")
    dx = x - x.mean()
    dy = y - y.mean()
    # rescale so tiny MMD curves do not underflow in the squared sums
    dx /= np.abs(dx).max()
    dy /= np.abs(dy).max()
    r = float(np.dot(dx, dy) / math.sqrt(float(np.dot(dx, dx)) * float(np.dot(dy, dy))))
    return min(1.0, max(-1.0, r))


def spearman(xs, ys) -> float:
    """Pearson correlation of the average-tie ranks."""
    x, y = _check_series(xs, ys)
    return pearson(rankdata(x, method="average"), rankdata(y, method="average"))


def _quantile_bins(v, q):
    ranks = rankdata(v, method="average")
    return np.minimum(((ranks - 1.0) * q / v.size).astype(np.int64), q - 1)


def mutual_information(xs, ys, q=None) -> float:
    """Plug-in mutual information in bits over a ``q x q`` quantile-binned table.

    ``q`` defaults to ``min(5, len // 4)``. Ties share a bin, so a constant
    series lands in a single bin and yields 0.
    """
    x, y = _check_series(xs, ys)
    if q is None:
        q = min(5, x.size // 4)
    q = int(q)
    if q < 2:
        raise ValueError(f"need q >= 2 quantile bins (series of length {x.size} too short)")
    if q > x.size:
        raise ValueError(f"q={q} exceeds series length {x.size}")
    bx, by = _quantile_bins(x, q), _quantile_bins(y, q)
    table = np.zeros((q, q))
    np.add.at(table, (bx, by), 1.0)
    pxy = table / x.size
    px = pxy.sum(axis=1, keepdims=True)
    py = pxy.sum(axis=0, keepdims=True)
    nz = pxy > 0
    mi = float(np.sum(pxy[nz] * np.log2(pxy[nz] / (px @ py)[nz])))
    return max(mi, 0.0)


def dependence(measure, xs, ys) -> float:
    measure = Measure(measure)
    if measure is Measure.PEARSON:
        return pearson(xs, ys)
    if measure is Measure.SPEARMAN:
        return spearman(xs, ys)
    return mutual_information(xs, ys)


# grids ------------------------------------------------------------------------


def default_scales():
    """Eleven decades, 1e-5 ... 1e5."""
    return [10.0 ** k for k in range(-5, 6)]


def parse_scale_grid(text: str):
    """``"1e-5:1e5:log10"`` (one value per decade) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        lo, hi, mode = text.split(":")
        if mode != "log10":
            raise ValueError(f"unsupported grid spacing {mode!r}; use 'log10'")
        a, b = math.log10(float(lo)), math.log10(float(hi))
        if abs(a - round(a)) > 1e-9 or abs(b - round(b)) > 1e-9 or b < a:
            raise ValueError("log10 grid bounds must be ascending powers of ten")
        return [10.0 ** k for k in range(int(round(a)), int(round(b)) + 1)]
    vals = [float(x) for x in text.split(",") if x.strip()]
    if not vals or any(v <= 0 for v in vals):
        raise ValueError("scale grid must contain positive values")
    return vals


def default_levels():
    return LevelGrid(tuple(round(0.05 * i, 10) for i in range(21)))


@dataclass(frozen=True)
class KernelGrid:
    """A kernel family and the scales to evaluate it at (none for linear)."""

    family: KernelFamily
    scales: tuple = ()
    allow_invalid: bool = False

    def __post_init__(self):
        fam = parse_kernel(self.family)
        object.__setattr__(self, "family", fam)
        scales = () if fam is KernelFamily.LINEAR else tuple(float(s) for s in self.scales)
        if fam is not KernelFamily.LINEAR and not scales:
            raise ValueError(f"kernel {fam.value!r} needs at least one scale")
        object.__setattr__(self, "scales", scales)
        if fam is KernelFamily.RBF_TV:
            KernelSpec(fam, 1.0, allow_invalid=self.allow_invalid)

    def specs(self):
        if self.family is KernelFamily.LINEAR:
            return [KernelSpec(self.family)]
        return [KernelSpec(self.family, s, allow_invalid=self.allow_invalid) for s in self.scales]


def as_kernel_grids(kernels, scales=None, allow_invalid=False):
    scales = default_scales() if scales is None else list(scales)
    out = []
    for k in kernels:
        if isinstance(k, KernelGrid):
            out.append(k)
        else:
            out.append(KernelGrid(k, tuple(scales), allow_invalid))
    return out


def as_descriptor_specs(descriptors):
    return [d if isinstance(d, DescriptorSpec) else DescriptorSpec(d) for d in descriptors]


_KIND_ORDER = {k: i for i, k in enumerate(PerturbationKind)}
_DESC_ORDER = {k: i for i, k in enumerate(DescriptorKind)}


# correlation report -------------------------------------------------------------


@dataclass
class CorrelationRow:
    dataset: str
    descriptor: str
    n_bin: int
    kernel: str
    scale: float | None
    perturbation: str
    measure: str
    coefficient: float | None
    status: str
    levels: list
    mmd2: list

    def config_key(self):
        return (self.descriptor, self.n_bin, self.kernel, self.scale)

    def sort_key(self):
        return (
            self.dataset,
            _DESC_ORDER[DescriptorKind(self.descriptor)],
            self.n_bin,
            parse_kernel(self.kernel).order,
            -1.0 if self.scale is None else self.scale,
            _KIND_ORDER[PerturbationKind(self.perturbation)],
        )


CSV_FIELDS = [
    "dataset", "descriptor", "n_bin", "kernel", "scale", "perturbation",
    "measure", "coefficient", "status",
]


@dataclass
class CorrelationReport:
    rows: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    estimator: str = Estimator.UNBIASED.value
    seed: int | None = None

    kind = "correlation"

    def __len__(self):
        return len(self.rows)

    def __add__(self, other):
        rows = sorted(self.rows + other.rows, key=CorrelationRow.sort_key)
        notes = list(dict.fromkeys(self.warnings + other.warnings))
        return CorrelationReport(rows, notes, self.estimator, self.seed)

    def to_dict(self):
        return {
            "kind": self.kind,
            "estimator": self.estimator,
            "seed": self.seed,
            "warnings": list(self.warnings),
            "rows": [asdict(r) for r in self.rows],
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("kind") != cls.kind:
            raise ValueError(f"expected a {cls.kind!r} report, got {data.get('kind')!r}")
        rows = [CorrelationRow(**r) for r in data["rows"]]
        return cls(rows, list(data.get("warnings", [])), data.get("estimator", "unbiased"), data.get("seed"))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in self.rows:
            w.writerow(["" if getattr(r, f) is None else getattr(r, f) for f in CSV_FIELDS])
        return buf.getvalue()

    def mmd_csv(self):
        """Long-format ``descriptor,kernel,scale,estimator,n,m,mmd2`` table plus level columns."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dataset", "perturbation", "level", "descriptor", "kernel", "scale", "estimator", "mmd2"])
        for r in self.rows:
            for lvl, v in zip(r.levels, r.mmd2):
                w.writerow([r.dataset, r.perturbation, lvl, r.descriptor, r.kernel,
                            "" if r.scale is None else r.scale, self.estimator, v])
        return buf.getvalue()


def _mmd_matrix(level_h, base_h, grid: KernelGrid, estimator):
    """MMD^2 per (level, kernel spec) as a list of per-spec series."""
    specs = grid.specs()
    series = [[] for _ in specs]
    for h in level_h:
        if grid.family is KernelFamily.LINEAR:
            series[0].append(mmd2(h, base_h, specs[0], estimator).value)
            continue
        cache = build_cache(h, base_h, grid.family)
        res = mmd_sweep(cache, grid.family, grid.scales, estimator, grid.allow_invalid)
        for s, r in zip(series, res):
            s.append(r.value)
    return specs, series


def perturbation_experiment(
    base: GraphSet,
    descriptors,
    kernels,
    kinds=tuple(PerturbationKind),
    grid: LevelGrid | None = None,
    seed: int = 0,
    measure="pearson",
    estimator="unbiased",
    scales=None,
    n_add=5,
    n_jobs=1,
) -> CorrelationReport:
    """Correlate MMD^2(perturbed level, base) with the perturbation level.

    Produces one row per (descriptor, kernel, scale, perturbation kind).
    ``kernels`` holds :class:`KernelGrid` items or family names (which are
    paired with ``scales``, defaulting to the eleven-decade grid). A row
    whose MMD^2 curve is constant gets ``coefficient=None`` and
    ``status="CONSTANT_SERIES"``.
    """
    grid = default_levels() if grid is None else grid
    if not isinstance(grid, LevelGrid):
        grid = LevelGrid(tuple(grid))
    descriptors = as_descriptor_specs(descriptors)
    kernel_grids = as_kernel_grids(kernels, scales)
    kinds = [parse_kind(k) for k in kinds]
    if not descriptors or not kernel_grids or not kinds:
        raise ValueError("descriptors, kernels and perturbation kinds must be non-empty")
    measure = Measure(measure)
    est = Estimator(estimator)
    levels = list(grid.levels)
    base_name = base.name if isinstance(base, GraphSet) else "dataset"

    sweeps = {kind: perturb_sweep(base, kind, grid, seed, n_add=n_add) for kind in kinds}
    # one bin count per descriptor across all kinds, so configurations line up
    n_bins = {
        d: resolve_n_bin(d, base, *(s for sets in sweeps.values() for s in sets)) for d in descriptors
    }
    rows = []
    for kind, level_sets in sweeps.items():
        for dspec in descriptors:
            n_bin = n_bins[dspec]
            base_h = stack(describe_set(base, dspec, n_bin, n_jobs))
            level_h = [stack(describe_set(s, dspec, n_bin, n_jobs)) for s in level_sets]
            for kgrid in kernel_grids:
                specs, series = _mmd_matrix(level_h, base_h, kgrid, est)
                for spec, values in zip(specs, series):
                    try:
                        coef, status = dependence(measure, levels, values), "ok"
                    except ConstantSeriesError:
                        coef, status = None, ConstantSeriesError.code
                    rows.append(CorrelationRow(
                        dataset=base_name,
                        descriptor=dspec.kind.value,
                        n_bin=int(n_bin),
                        kernel=spec.family.value,
                        scale=spec.scale,
                        perturbation=kind.value,
                        measure=measure.value,
                        coefficient=coef,
                        status=status,
                        levels=levels,
                        mmd2=[float(v) for v in values],
                    ))
    rows.sort(key=CorrelationRow.sort_key)
    notes = [MI_WARNING] if measure is Measure.MI else []
    return CorrelationReport(rows, notes, est.value, seed)


# heatmaps ------------------------------------------------------------------------


@dataclass
class Heatmap:
    descriptors: list
    datasets: list
    best: list
    worst: list
    perturbation: str | None = None
    kernel: str | None = None

    def to_dict(self):
        return asdict(self)


def best_worst_heatmap(report: CorrelationReport, perturbation=None, kernel=None) -> Heatmap:
    """Best and worst coefficient per (descriptor, dataset) over kernels and scales.

    Cells with no finite coefficient are ``None``. Restrict to one
    perturbation kind or one kernel family for a breakdown.
    """
    rows = report.rows
    if perturbation is not None:
        pk = parse_kind(perturbation).value
        rows = [r for r in rows if r.perturbation == pk]
    if kernel is not None:
        kf = parse_kernel(kernel).value
        rows = [r for r in rows if r.kernel == kf]
    descriptors = sorted({r.descriptor for r in rows}, key=lambda d: _DESC_ORDER[DescriptorKind(d)])
    datasets = sorted({r.dataset for r in rows})
    cells = defaultdict(list)
    for r in rows:
        if r.coefficient is not None:
            cells[(r.descriptor, r.dataset)].append(r.coefficient)
    best = [[max(cells[(d, ds)]) if cells[(d, ds)] else None for ds in datasets] for d in descriptors]
    worst = [[min(cells[(d, ds)]) if cells[(d, ds)] else None for ds in datasets] for d in descriptors]
    return Heatmap(descriptors, datasets, best, worst,
                   None if perturbation is None else parse_kind(perturbation).value,
                   None if kernel is None else parse_kernel(kernel).value)


# selection -----------------------------------------------------------------------


@dataclass
class SelectionResult:
    descriptor: str
    n_bin: int
    kernel: str
    scale: float | None
    strategy: str
    objective: float
    coefficients: dict

    def kernel_spec(self):
        return KernelSpec(self.kernel, self.scale, allow_invalid=True)

    def descriptor_spec(self):
        return DescriptorSpec(self.descriptor, self.n_bin)

    def to_dict(self):
        return asdict(self)


def _tie_key(config):
    descriptor, n_bin, kernel, scale = config
    return (
        0.0 if scale is None else scale,
        parse_kernel(kernel).order,
        _DESC_ORDER[DescriptorKind(descriptor)],
        n_bin,
    )


def select_config(report: CorrelationReport, strategy="best-average", perturbation=None,
                  dataset=None) -> SelectionResult:
    """Pick the configuration whose MMD^2 best tracks the perturbations.

    ``best-single`` maximizes the coefficient for ``perturbation``;
    ``best-average`` maximizes the mean over perturbation kinds (and
    datasets), skipping configurations with a constant curve for any kind.
    Exact ties go to the lower scale, then kernel order linear < rbf <
    laplacian-tv < emd.
    """
    strategy = Strategy(strategy)
    rows = [r for r in report.rows if dataset is None or r.dataset == dataset]
    if not rows:
        raise ValueError("cannot select from an empty report")
    if strategy is Strategy.BEST_SINGLE_PERTURBATION:
        if perturbation is None:
            raise ValueError("best-single needs a target perturbation")
        pk = parse_kind(perturbation).value
        rows = [r for r in rows if r.perturbation == pk]
        if not rows:
            raise ValueError(f"perturbation {pk!r} not present in the report")
    by_config = defaultdict(dict)
    complete = {}
    for r in rows:
        key = r.config_key()
        by_config[key][f"{r.dataset}/{r.perturbation}"] = r.coefficient
        complete[key] = complete.get(key, True) and r.coefficient is not None
    cells = {f"{r.dataset}/{r.perturbation}" for r in rows}
    candidates = []
    for key, coefs in by_config.items():
        if not complete[key] or set(coefs) != cells:
            continue
        candidates.append((float(np.mean(list(coefs.values()))), key))
    if not candidates:
        raise ValueError("no configuration has a defined coefficient for every perturbation")
    best = max(v for v, _ in candidates)
    winners = sorted((key for v, key in candidates if v == best), key=_tie_key)
    key = winners[0]
    descriptor, n_bin, kernel, scale = key
    return SelectionResult(descriptor, n_bin, kernel, scale, strategy.value, best, dict(by_config[key]))


# ranking -------------------------------------------------------------------------


@dataclass
class RankingReport:
    models: list
    entries: list = field(default_factory=list)
    estimator: str = Estimator.UNBIASED.value

    kind = "ranking"

    def to_dict(self):
        return {
            "kind": self.kind,
            "estimator": self.estimator,
            "models": list(self.models),
            "entries": self.entries,
            "rank_bars": self.rank_bars(),
            "argmin_heatmaps": self.argmin_heatmaps(),
        }

    @classmethod
    def from_dict(cls, data):
        if data.get("kind") != cls.kind:
            raise ValueError(f"expected a {cls.kind!r} report, got {data.get('kind')!r}")
        return cls(list(data["models"]), list(data["entries"]), data.get("estimator", "unbiased"))

    def configurations(self):
        """Distinct (descriptor, n_bin, kernel) triples in entry order."""
        return list(dict.fromkeys((e["descriptor"], e["n_bin"], e["kernel"]) for e in self.entries))

    def select(self, descriptor=None, kernel=None, n_bin=None):
        return [
            e for e in self.entries
            if (descriptor is None or e["descriptor"] == descriptor)
            and (kernel is None or e["kernel"] == parse_kernel(kernel).value)
            and (n_bin is None or e["n_bin"] == n_bin)
        ]

    def winners(self, descriptor, kernel, n_bin=None):
        return [e["winner"] for e in self.select(descriptor, kernel, n_bin)]

    def rank_bars(self):
        out = []
        for d, nb, k in self.configurations():
            sel = self.select(d, k, nb)
            out.append({
                "descriptor": d, "n_bin": nb, "kernel": k,
                "scales": [e["scale"] for e in sel],
                "winners": [e["winner"] for e in sel],
            })
        return out

    def argmin_heatmaps(self):
        """Winner over a (n_bin x scale) grid, when several bin counts were run."""
        out = []
        pairs = list(dict.fromkeys((d, k) for d, _, k in self.configurations()))
        for d, k in pairs:
            sel = self.select(d, k)
            bins = list(dict.fromkeys(e["n_bin"] for e in sel))
            if len(bins) < 2:
                continue
            scales = list(dict.fromkeys(e["scale"] for e in sel))
            lookup = {(e["n_bin"], e["scale"]): e["winner"] for e in sel}
            out.append({
                "descriptor": d, "kernel": k, "n_bins": bins, "scales": scales,
                "winners": [[lookup.get((b, s)) for s in scales] for b in bins],
            })
        return out


def _argmin(values: dict):
    best = min(values.values())
    return min(name for name, v in values.items() if v == best)


def rank_models(test, train, models, descriptors, kernels, scales=None,
                estimator="unbiased", n_bins=None, n_jobs=1) -> RankingReport:
    """MMD^2 of each model set against the test set, per configuration.

    ``models`` maps a model name to its graph set. Every entry records
    each model's MMD^2, the winner (smallest MMD^2; exact ties go to the
    lexicographically first name) and the train-vs-test anchor value that
    shows what two samples of the same distribution look like.
    ``n_bins`` optionally lists bin counts to sweep for every descriptor,
    which yields the (n_bin x scale) winner heatmap.
    """
    if not models:
        raise ValueError("rank_models needs at least one model")
    models = dict(models)
    names = sorted(models)
    est = Estimator(estimator)
    descriptors = as_descriptor_specs(descriptors)
    kernel_grids = as_kernel_grids(kernels, scales)
    entries = []
    for dspec in descriptors:
        bin_options = [None] if not n_bins else list(n_bins)
        for nb in bin_options:
            spec = dspec if nb is None else DescriptorSpec(dspec.kind, nb, dspec.normalize)
            n_bin = resolve_n_bin(spec, test, train, *models.values())
            test_h = stack(describe_set(test, spec, n_bin, n_jobs))
            train_h = stack(describe_set(train, spec, n_bin, n_jobs))
            model_h = {k: stack(describe_set(models[k], spec, n_bin, n_jobs)) for k in names}
            for kgrid in kernel_grids:
                anchor = _mmd_matrix([train_h], test_h, kgrid, est)[1]
                per_model = {k: _mmd_matrix([model_h[k]], test_h, kgrid, est)[1] for k in names}
                for i, kspec in enumerate(kgrid.specs()):
                    values = {k: per_model[k][i][0] for k in names}
                    entries.append({
                        "descriptor": spec.kind.value,
                        "n_bin": int(n_bin),
                        "kernel": kspec.family.value,
                        "scale": kspec.scale,
                        "mmd2": values,
                        "winner": _argmin(values),
                        "tie": list(values.values()).count(min(values.values())) > 1,
                        "anchor": anchor[i][0],
                    })
    return RankingReport(names, entries, est.value)


def pseudo_models(spec: GeneratorSpec, levels=(0.05, 0.2, 0.5), seed=0,
                  kind="rewire-edges", names=None) -> dict:
    """Stand-in generative models: perturbed fresh draws from the test distribution.

    Model ``i`` is a new sample of ``spec`` (dataset seed ``seed + 100 + i``)
    perturbed at ``levels[i]`` (perturbation seed ``seed + 200 + i``). A
    small level mimics a good model, a large one a poor model. Returns a
    dict mapping names (``A``, ``B``, ... by default) to graph sets.
    """
    levels = [float(p) for p in levels]
    names = [chr(ord("A") + i) for i in range(len(levels))] if names is None else list(names)
    if len(names) != len(levels):
        raise ValueError("need one name per perturbation level")
    out = {}
    for i, (name, p) in enumerate(zip(names, levels)):
        draw = generate_dataset(spec, seed + 100 + i, name=name)
        (model,) = perturb_sweep(draw, kind, LevelGrid((p,)), seed + 200 + i)
        out[name] = GraphSet(name, model.graphs, model.meta)
    return out


# estimator -----------------------------------------------------------------------


class KernelSelector(BaseEstimator):
    """Choose a descriptor, kernel and scale by perturbation correlation.

    ``fit`` runs the perturbation experiment on a reference collection of
    graphs and keeps the configuration whose MMD^2 correlates best with the
    perturbation level.

    Parameters
    ----------
    descriptors : sequence of str or DescriptorSpec
    kernels : sequence of str or KernelGrid
    scales : sequence of float, optional
        Scale grid for kernels given by name; defaults to 1e-5 ... 1e5.
    perturbations : sequence of str, optional
        Perturbation kinds; all four by default.
    levels : sequence of float, optional
        Perturbation probabilities; 0, 0.05, ..., 1 by default.
    measure : {"pearson", "spearman", "mi"}
    strategy : {"best-average", "best-single"}
    target_perturbation : str, optional
        Required with ``strategy="best-single"``.
    estimator : {"unbiased", "biased"}
    n_add : int
        Vertices added per graph by ``add-connected-nodes``.
    random_state : int

    Attributes
    ----------
    report_ : CorrelationReport
    selection_ : SelectionResult
    best_descriptor_ : transformer for the chosen descriptor
    best_estimator_ : MMD configured with the chosen kernel
    """

    def __init__(self, descriptors=("degree", "clustering", "spectral"),
                 kernels=("linear", "rbf", "laplacian-tv", "emd"), scales=None,
                 perturbations=None, levels=None, measure="pearson",
                 strategy="best-average", target_perturbation=None,
                 estimator="unbiased", n_add=5, random_state=0):
        self.descriptors = descriptors
        self.kernels = kernels
        self.scales = scales
        self.perturbations = perturbations
        self.levels = levels
        self.measure = measure
        self.strategy = strategy
        self.target_perturbation = target_perturbation
        self.estimator = estimator
        self.n_add = n_add
        self.random_state = random_state

    def fit(self, X, y=None):
        base = X if isinstance(X, GraphSet) else GraphSet("reference", graphs_of(X))
        if not len(base):
            raise ValueError("KernelSelector needs at least one reference graph")
        kinds = tuple(PerturbationKind) if self.perturbations is None else self.perturbations
        grid = default_levels() if self.levels is None else LevelGrid(tuple(self.levels))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            self.report_ = perturbation_experiment(
                base, self.descriptors, self.kernels, kinds, grid, self.random_state,
                self.measure, self.estimator, self.scales, self.n_add,
            )
        self.selection_ = select_config(self.report_, self.strategy, self.target_perturbation)
        sel = self.selection_
        self.best_descriptor_ = make_descriptor(sel.descriptor_spec())
        fam = parse_kernel(sel.kernel)
        self.best_estimator_ = MMD(
            kernel=fam.value,
            scale=None if fam is KernelFamily.LINEAR else sel.scale,
            estimator=self.estimator,
            allow_invalid=fam is KernelFamily.RBF_TV,
        )
        return self

    def heatmap(self, perturbation=None):
        check_is_fitted(self, "report_")
        return best_worst_heatmap(self.report_, perturbation)
