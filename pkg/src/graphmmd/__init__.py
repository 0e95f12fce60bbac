"""Graph distribution comparison with descriptor histograms and MMD.

Build datasets (:mod:`~graphmmd.synth`), describe graphs by histograms
(:mod:`~graphmmd.descriptors`), compare histogram sets with kernel MMD
(:mod:`~graphmmd.kernels`, :mod:`~graphmmd.mmd`) and pick kernels and
scales by how well MMD tracks controlled perturbations
(:mod:`~graphmmd.perturb`, :mod:`~graphmmd.analysis`).
"""

from .analysis import (
    CorrelationReport,
    KernelGrid,
    KernelSelector,
    RankingReport,
    best_worst_heatmap,
    mutual_information,
    pearson,
    perturbation_experiment,
    pseudo_models,
    rank_models,
    select_config,
    spearman,
)
from .bench import BenchSpec, bench_kernels
from .descriptors import (
    ClusteringHistogram,
    DegreeHistogram,
    DescriptorSpec,
    LaplacianSpectrum,
    clustering_histogram,
    degree_histogram,
    spectrum_histogram,
)
from .exceptions import (
    ConstantSeriesError,
    DatasetError,
    GraphMMDError,
    InvalidKernelError,
    SpectrumError,
)
from .graph import Graph, GraphSet, load_dataset, save_dataset, validate_graph
from .kernels import KernelFamily, KernelSpec, gram, psd_check
from .mmd import MMD, build_cache, mmd2, mmd2_biased, mmd2_unbiased, mmd_sweep
from .perturb import GraphPerturber, LevelGrid, PerturbationSpec, perturb_graph, perturb_sweep
from .synth import GeneratorSpec, generate_dataset

__version__ = "0.1.0"

__all__ = [
    "BenchSpec", "ClusteringHistogram", "ConstantSeriesError", "CorrelationReport",
    "DatasetError", "DegreeHistogram", "DescriptorSpec", "GeneratorSpec", "Graph",
    "GraphMMDError", "GraphPerturber", "GraphSet", "InvalidKernelError", "KernelFamily",
    "KernelGrid", "KernelSelector", "KernelSpec", "LaplacianSpectrum", "LevelGrid", "MMD",
    "PerturbationSpec", "RankingReport", "SpectrumError", "bench_kernels", "best_worst_heatmap",
    "build_cache", "clustering_histogram", "degree_histogram", "generate_dataset", "gram",
    "load_dataset", "mmd2", "mmd2_biased", "mmd2_unbiased", "mmd_sweep", "mutual_information",
    "pearson", "perturb_graph", "perturb_sweep", "perturbation_experiment", "pseudo_models",
    "psd_check", "rank_models", "save_dataset", "select_config", "spearman", "spectrum_histogram",
    "validate_graph",
]
