"""Kernel runtime benchmark: MMD cost of linear, RBF and EMD kernels on ER graphs."""

from __future__ import annotations

import csv
import io
import statistics
import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ._rng import BENCH, check_seed, derive_stream
from .kernels import KernelFamily, KernelSpec, parse_kernel
from .mmd import mmd2
from .synth import GeneratorSpec, generate_graph

__all__ = ["Variable", "BenchSpec", "BenchRow", "bench_kernels", "rows_to_csv", "rows_from_csv"]

BENCH_FIELDS = ["kernel", "variable", "value", "mean_seconds", "std_seconds"]


class Variable(str, Enum):
    N_GRAPHS = "graphs"
    N_NODES = "nodes"
    N_BINS = "bins"


@dataclass(frozen=True)
class BenchSpec:
    variable: Variable
    values: tuple
    fixed: dict = field(default_factory=lambda: {"graphs": 100, "nodes": 100, "bins": 100})
    repetitions: int = 10
    er_p: float = 0.3
    scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "variable", Variable(self.variable))
        values = tuple(int(v) for v in self.values)
        if not values or any(v < 1 for v in values):
            raise ValueError("benchmark values must be positive integers")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("benchmark values must be ascending")
        object.__setattr__(self, "values", values)
        fixed = {"graphs": 100, "nodes": 100, "bins": 100}
        fixed.update({Variable(k).value: int(v) for k, v in dict(self.fixed).items()})
        object.__setattr__(self, "fixed", fixed)
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if not 0.0 <= self.er_p <= 1.0:
            raise ValueError("er_p must lie in [0, 1]")

    def sizes(self, value):
        s = dict(self.fixed)
        s[self.variable.value] = int(value)
        return s


@dataclass(frozen=True)
class BenchRow:
    kernel: str
    variable: str
    value: int
    mean_seconds: float
    std_seconds: float


def binned_degree_histograms(graphs, n_nodes, n_bins):
    """Normalized degree histograms on ``n_bins`` equal-width bins over [0, n_nodes)."""
    out = np.zeros((len(graphs), n_bins))
    for row, g in zip(out, graphs):
        idx = np.minimum(g.degrees() * n_bins // max(n_nodes, 1), n_bins - 1)
        np.add.at(row, idx, 1.0)
        row /= max(g.n, 1)
    return out


def _er_set(n_graphs, n_nodes, p, seed, which, value_idx):
    spec = GeneratorSpec("er", n_graphs, (n_nodes, n_nodes), p_edge=p)
    return [
        generate_graph(spec, derive_stream(seed, BENCH, value_idx, which, i), gid=f"b{i}")
        for i in range(n_graphs)
    ]


def _kernel_spec(name, scale):
    fam = parse_kernel(name)
    return KernelSpec(fam, None if fam is KernelFamily.LINEAR else scale)


def bench_kernels(spec: BenchSpec, kernels=("linear", "rbf", "emd"), seed=0,
                  parallel=False, log=None) -> list[BenchRow]:
    """Time MMD^2 per kernel for every value of the swept size.

    Only the kernel and MMD computation is timed; graph generation and
    histograms are prepared beforehand. One warm-up run per kernel is
    discarded. The EMD kernel runs the general transport solver.
    """
    seed = check_seed(seed)
    specs = [_kernel_spec(k, spec.scale) for k in kernels]
    n_jobs = -1 if parallel else 1
    rows = []
    for vi, value in enumerate(spec.values):
        sizes = spec.sizes(value)
        X = binned_degree_histograms(
            _er_set(sizes["graphs"], sizes["nodes"], spec.er_p, seed, 0, vi), sizes["nodes"], sizes["bins"])
        Y = binned_degree_histograms(
            _er_set(sizes["graphs"], sizes["nodes"], spec.er_p, seed, 1, vi), sizes["nodes"], sizes["bins"])
        for kspec in specs:
            solver = "transport" if kspec.family is KernelFamily.EMD else "closed"
            mmd2(X, Y, kspec, emd_solver=solver, n_jobs=n_jobs)
            times = []
            for _ in range(spec.repetitions):
                t0 = time.perf_counter()
                mmd2(X, Y, kspec, emd_solver=solver, n_jobs=n_jobs)
                times.append(time.perf_counter() - t0)
            std = statistics.stdev(times) if len(times) > 1 else 0.0
            row = BenchRow(kspec.family.value, spec.variable.value, int(value),
                           statistics.fmean(times), std)
            if log is not None:
                log(row)
            rows.append(row)
    rows.sort(key=lambda r: (r.kernel, r.variable, r.value))
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_FIELDS)
    for r in rows:
        w.writerow([r.kernel, r.variable, r.value, repr(r.mean_seconds), repr(r.std_seconds)])
    return buf.getvalue()


def rows_from_csv(text) -> list[BenchRow]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != BENCH_FIELDS:
        raise ValueError(f"not a benchmark table: expected columns {BENCH_FIELDS}")
    return [
        BenchRow(r["kernel"], r["variable"], int(r["value"]), float(r["mean_seconds"]), float(r["std_seconds"]))
        for r in reader
    ]
