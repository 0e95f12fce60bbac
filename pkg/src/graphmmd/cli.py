"""Command-line interface: ``graphmmd <subcommand> ...``.

Subcommands: generate, perturb, select, rank, bench, report. Exit status is
0 on success, 1 on a usage error and 2 on a data or validation error. Every
stochastic subcommand requires ``--seed``; reruns with the same flags write
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from ._io import atomic_write_text
from .analysis import (
    KernelGrid,
    best_worst_heatmap,
    default_levels,
    default_scales,
    parse_scale_grid,
    perturbation_experiment,
    rank_models,
    select_config,
)
from .bench import BenchSpec, bench_kernels, rows_to_csv
from .descriptors import AUTO, DEFAULT_BINS, DescriptorKind, DescriptorSpec
from .exceptions import GraphMMDError
from .graph import GraphSet, load_dataset, save_dataset
from .kernels import parse_kernel
from .perturb import PerturbationKind, parse_levels, perturb_sweep
from .plots import PlotKind, PlotSpec, emit_plot
from .synth import GeneratorSpec, generate_dataset

log = logging.getLogger("graphmmd")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# argument helpers ----------------------------------------------------------------


def _csv_list(text):
    return [x.strip() for x in text.split(",") if x.strip()]


def _node_range(text):
    try:
        lo, hi = (int(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def _int_values(text):
    """``lo:hi:step`` (inclusive) or a comma-separated list of integers."""
    try:
        if ":" in text:
            lo, hi, step = (int(x) for x in text.split(":"))
            if step <= 0:
                raise ValueError
            return list(range(lo, hi + 1, step))
        return [int(x) for x in _csv_list(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI:STEP or a list of integers, got {text!r}") from None


def _fixed(text):
    out = {}
    for item in _csv_list(text):
        key, _, value = item.partition("=")
        if key not in ("graphs", "nodes", "bins") or not value.isdigit():
            raise argparse.ArgumentTypeError(f"bad --fixed item {item!r}; expected graphs=N,nodes=N,bins=N")
        out[key] = int(value)
    return out


def _model(text):
    name, sep, path = text.partition("=")
    if not sep or not name or not path:
        raise argparse.ArgumentTypeError(f"expected NAME=PATH, got {text!r}")
    return name, path


def _bins(text):
    out = {}
    for item in _csv_list(text):
        key, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"bad --bins item {item!r}; expected descriptor=N")
        try:
            kind = DescriptorKind(key)
        except ValueError:
            raise argparse.ArgumentTypeError(f"unknown descriptor {key!r}") from None
        out[kind] = value if value == AUTO else int(value)
    return out


def _n_jobs(threads):
    return -1 if threads == 0 else threads


def _descriptor_specs(args):
    specs = []
    for name in args.descriptors:
        try:
            kind = DescriptorKind(name)
        except ValueError:
            raise UsageError(f"unknown descriptor {name!r}") from None
        specs.append(DescriptorSpec(kind, args.bins.get(kind, DEFAULT_BINS[kind]), args.normalize))
    return specs


def _kernels(args, scales):
    return [KernelGrid(parse_kernel(k), tuple(scales), args.allow_invalid_kernel) for k in args.kernels]


def _write_json(path, data):
    atomic_write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def _load(path, name=None):
    gs = load_dataset(path)
    if name is not None:
        return GraphSet(name, gs.graphs, gs.meta)
    return gs


# subcommands ---------------------------------------------------------------------


def cmd_generate(args):
    spec = GeneratorSpec(
        args.family, args.n_graphs, args.nodes, p_edge=args.p, m=args.m, k=args.k,
        p_rewire=args.p_rewire, c=args.communities, p_intra=args.p_intra, p_inter=args.p_inter,
    )
    gs = generate_dataset(spec, args.seed, name=args.name)
    if not args.meta:
        gs = GraphSet(gs.name, gs.graphs, {})
    save_dataset(gs, args.output)
    log.info("wrote %d graphs to %s", len(gs), args.output)


def cmd_perturb(args):
    base = _load(args.input)
    grid = parse_levels(args.levels)
    sets = perturb_sweep(base, args.kind, grid, args.seed, n_add=args.n_add)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for level, gs in zip(grid.levels, sets):
        save_dataset(gs, out / f"level_{level:g}.jsonl")
    log.info("wrote %d level files to %s", len(sets), out)


def cmd_select(args):
    descriptors = _descriptor_specs(args)
    scales = parse_scale_grid(args.sigma_grid) if args.sigma_grid else default_scales()
    kernels = _kernels(args, scales)
    grid = parse_levels(args.levels) if args.levels else default_levels()
    kinds = list(PerturbationKind) if args.perturbations == ["all"] else args.perturbations
    names = set()
    report = None
    for path in args.reference:
        base = _load(path)
        name = base.name
        if name in names:
            name = f"{name}:{Path(path).stem}"
            base = GraphSet(name, base.graphs, base.meta)
        names.add(name)
        log.info("perturbation experiment on %s (%d graphs)", name, len(base))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            part = perturbation_experiment(
                base, descriptors, kernels, kinds, grid, args.seed, args.correlation,
                args.estimator, scales, args.n_add, _n_jobs(args.threads),
            )
        report = part if report is None else report + part
    for w in report.warnings:
        log.warning("%s", w)
    data = report.to_dict()
    heatmaps = {"all": best_worst_heatmap(report).to_dict()}
    for kind in sorted({r.perturbation for r in report.rows}):
        heatmaps[kind] = best_worst_heatmap(report, kind).to_dict()
    data["heatmaps"] = heatmaps
    try:
        data["selection"] = select_config(report, args.strategy, args.target_perturbation).to_dict()
    except ValueError as exc:
        data["selection"] = None
        log.warning("no configuration selected: %s", exc)
    _write_json(args.output, data)
    if args.csv:
        atomic_write_text(args.csv, report.to_csv())
    if args.mmd_csv:
        atomic_write_text(args.mmd_csv, report.mmd_csv())


def cmd_rank(args):
    test = _load(args.test, "test")
    train = _load(args.train, "train")
    models = {}
    for name, path in args.models:
        if name in models:
            raise UsageError(f"model name {name!r} given twice")
        models[name] = _load(path, name)
    scales = parse_scale_grid(args.sigma_grid) if args.sigma_grid else default_scales()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        report = rank_models(test, train, models, _descriptor_specs(args), _kernels(args, scales), scales,
                             args.estimator, args.n_bins, _n_jobs(args.threads))
    _write_json(args.output, report.to_dict())
    if args.csv:
        atomic_write_text(args.csv, ranking_csv(report))


def ranking_csv(report):
    lines = ["descriptor,n_bin,kernel,scale,estimator,model,mmd2,winner,anchor"]
    for e in report.entries:
        scale = "" if e["scale"] is None else repr(e["scale"])
        for m in report.models:
            lines.append(",".join([e["descriptor"], str(e["n_bin"]), e["kernel"], scale,
                                   report.estimator, m, repr(e["mmd2"][m]),
                                   str(int(e["winner"] == m and not e["tie"])), repr(e["anchor"])]))
    return "\n".join(lines) + "\n"


def cmd_bench(args):
    fixed = {"graphs": 100, "nodes": 100, "bins": 100}
    fixed.update(args.fixed)
    spec = BenchSpec(args.vary, tuple(args.values), fixed, args.reps, args.er_p, args.scale)
    rows = bench_kernels(spec, args.kernels, args.seed, parallel=args.parallel,
                         log=lambda r: log.info("%s %s=%d: %.3gs", r.kernel, r.variable, r.value, r.mean_seconds))
    atomic_write_text(args.output, rows_to_csv(rows))


def cmd_report(args):
    options = {}
    kind = PlotKind(args.kind)
    if kind in (PlotKind.MMD_VS_SCALE, PlotKind.HEATMAP_ARGMIN):
        options.update(descriptor=args.descriptor, kernel=args.kernel)
    if kind is PlotKind.MMD_VS_SCALE:
        options["normalize"] = args.normalize_curves
    if kind is PlotKind.HEATMAP_BEST_WORST:
        options["perturbation"] = args.perturbation
    emit_plot(PlotSpec(kind, args.input, args.output), **options)


# parser --------------------------------------------------------------------------


def _add_descriptor_flags(p):
    p.add_argument("--descriptors", type=_csv_list, default=["degree", "clustering", "spectral"],
                   help="comma list of degree, clustering, spectral")
    p.add_argument("--bins", type=_bins, default={},
                   help="per-descriptor bin counts, e.g. degree=auto,clustering=100,spectral=200")
    p.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=True,
                   help="divide histograms by the vertex count (default); --no-normalize keeps counts")
    p.add_argument("--kernels", type=_csv_list, default=["linear", "rbf", "laplacian-tv", "emd"],
                   help="comma list of linear, rbf, laplacian-tv, emd")
    p.add_argument("--sigma-grid", help="scale grid, '1e-5:1e5:log10' (default) or a comma list")
    p.add_argument("--allow-invalid-kernel", action="store_true",
                   help="permit rbf-tv-unsafe, which is not positive definite")
    p.add_argument("--estimator", choices=["unbiased", "biased"], default="unbiased")


def build_parser():
    parser = _Parser(prog="graphmmd", description="Graph generative model evaluation with MMD.")
    parser.add_argument("--threads", type=int, default=1, help="worker threads, 0 = auto (default 1)")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    parser.add_argument("--config", help="JSON file of flag values; command-line flags take precedence")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("generate", help="generate a synthetic dataset")
    p.add_argument("--family", required=True, choices=["er", "ba", "ws", "community"])
    p.add_argument("--n-graphs", type=int, required=True)
    p.add_argument("--nodes", type=_node_range, required=True, help="LO:HI vertex count range")
    p.add_argument("--p", type=float, default=0.3, help="ER edge probability")
    p.add_argument("--m", type=int, default=2, help="BA edges per new vertex")
    p.add_argument("--k", type=int, default=4, help="WS ring degree")
    p.add_argument("--p-rewire", type=float, default=0.1, help="WS rewiring probability")
    p.add_argument("--communities", type=int, default=2)
    p.add_argument("--p-intra", type=float, default=0.7)
    p.add_argument("--p-inter", type=float, default=0.05)
    p.add_argument("--name")
    p.add_argument("--meta", action="store_true",
                   help="prepend a _meta line recording the family, parameters and seed")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("perturb", help="perturb a dataset over a grid of levels")
    p.add_argument("--input", required=True)
    p.add_argument("--kind", required=True, choices=[k.value for k in PerturbationKind])
    p.add_argument("--levels", default="0.0:1.0:0.05")
    p.add_argument("--n-add", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("select", help="correlate MMD with perturbation level and select a kernel")
    p.add_argument("--reference", required=True, action="append", help="dataset path (repeatable)")
    p.add_argument("--perturbations", type=_csv_list, default=["all"])
    _add_descriptor_flags(p)
    p.add_argument("--levels", help="perturbation levels, default 0.0:1.0:0.05")
    p.add_argument("--correlation", choices=["pearson", "spearman", "mi"], default="pearson")
    p.add_argument("--strategy", choices=["best-average", "best-single"], default="best-average")
    p.add_argument("--target-perturbation", choices=[k.value for k in PerturbationKind])
    p.add_argument("--n-add", type=int, default=5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--csv", help="also write the coefficient table as CSV")
    p.add_argument("--mmd-csv", help="also write every MMD^2 value as CSV")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("rank", help="rank model samples against a test set")
    p.add_argument("--test", required=True)
    p.add_argument("--train", required=True)
    p.add_argument("--models", type=_model, nargs="+", action="extend", required=True, metavar="NAME=PATH")
    _add_descriptor_flags(p)
    p.add_argument("--n-bins", type=_int_values, help="bin counts to sweep for the argmin heatmap")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("bench", help="time MMD per kernel")
    p.add_argument("--vary", required=True, choices=["graphs", "nodes", "bins"])
    p.add_argument("--values", type=_int_values, required=True)
    p.add_argument("--fixed", type=_fixed, default={})
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--kernels", type=_csv_list, default=["linear", "rbf", "emd"])
    p.add_argument("--er-p", type=float, default=0.3)
    p.add_argument("--scale", type=float, default=1.0)
    p.add_argument("--parallel", action="store_true", help="multi-threaded EMD distances")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="render an SVG figure from a stored report")
    p.add_argument("--kind", required=True, choices=[k.value for k in PlotKind])
    p.add_argument("--input", required=True)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--descriptor")
    p.add_argument("--kernel")
    p.add_argument("--perturbation")
    p.add_argument("--normalize-curves", action="store_true",
                   help="divide each MMD curve by its maximum (display only)")
    p.set_defaults(func=cmd_report)
    return parser


def _config_argv(path):
    """Turn a JSON object of flag values into argv tokens."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    out = []
    for key, value in data.items():
        flag = "--" + key.replace("_", "-")
        if value is True:
            out.append(flag)
        elif value is False or value is None:
            continue
        elif isinstance(value, list):
            out.extend([flag, *map(str, value)])
        else:
            out.extend([flag, str(value)])
    return out


def _expand_config(parser, argv):
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        parser.error("--config needs a path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    commands = set(parser._subparsers._group_actions[0].choices)
    for j, tok in enumerate(rest):
        if tok in commands:
            return rest[:j + 1] + _config_argv(path) + rest[j + 1:]
    return rest


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            argv = _expand_config(parser, argv)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"graphmmd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=args.log_level, stream=sys.stderr, format="%(levelname)s %(message)s")
    if args.threads < 0:
        print("graphmmd: error: --threads must be >= 0", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.func(args)
    except UsageError as exc:
        print(f"graphmmd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphMMDError, ValueError, OSError, KeyError) as exc:
        print(f"graphmmd: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
