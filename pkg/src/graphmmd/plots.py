"""Static SVG figures rendered from stored report files.

Rendering never recomputes an MMD value; every figure is a pure function of
its input report, and identical input gives byte-identical SVG.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from xml.sax.saxutils import escape

from ._io import atomic_write_text
from .analysis import CorrelationReport, best_worst_heatmap
from .bench import rows_from_csv
from .exceptions import GraphMMDError

__all__ = ["PlotKind", "PlotSpec", "ReportError", "load_report", "render", "emit_plot"]

PALETTE = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")
MISSING = "#bdbdbd"


class ReportError(GraphMMDError, ValueError):
    """Report file is malformed or of the wrong kind for the requested figure."""


class PlotKind(str, Enum):
    MMD_VS_SCALE = "mmd-vs-scale"
    HEATMAP_BEST_WORST = "heatmap-best-worst"
    HEATMAP_ARGMIN = "heatmap-argmin"
    BENCH_LINES = "bench-lines"


_EXPECTED = {
    PlotKind.MMD_VS_SCALE: "ranking",
    PlotKind.HEATMAP_BEST_WORST: "correlation",
    PlotKind.HEATMAP_ARGMIN: "ranking",
    PlotKind.BENCH_LINES: "bench",
}


@dataclass(frozen=True)
class PlotSpec:
    kind: PlotKind
    input: str
    output: str

    def __post_init__(self):
        object.__setattr__(self, "kind", PlotKind(self.kind))


def load_report(path):
    """Parse a JSON report or a benchmark CSV into a dict with a ``kind`` key."""
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ReportError(f"{path}: malformed report: {exc}") from None
        if not isinstance(data, dict) or "kind" not in data:
            raise ReportError(f"{path}: report has no 'kind' field")
        return data
    try:
        rows = rows_from_csv(text)
    except (ValueError, KeyError) as exc:
        raise ReportError(f"{path}: {exc}") from None
    return {"kind": "bench", "rows": [r.__dict__ for r in rows]}


# drawing helpers -----------------------------------------------------------------


def _f(x):
    return f"{x:.2f}"


def _text(x, y, s, anchor="middle", size=11, extra=""):
    return (f'<text x="{_f(x)}" y="{_f(y)}" font-size="{size}" text-anchor="{anchor}"{extra}>'
            f"{escape(str(s))}</text>")


def _svg(width, height, body, title):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" font-family="sans-serif">')
    return "\n".join([head, f"<title>{escape(title)}</title>",
                      f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
                      *body, "</svg>"]) + "\n"


def _lerp(a, b, t):
    return round(a + (b - a) * t)


def diverging_color(v):
    """Blue (-1) through white (0) to red (+1); ``None`` maps to grey."""
    if v is None or not math.isfinite(v):
        return MISSING
    t = max(-1.0, min(1.0, float(v)))
    lo, mid, hi = (33, 102, 172), (247, 247, 247), (178, 24, 43)
    end = hi if t >= 0 else lo
    rgb = tuple(_lerp(m, e, abs(t)) for m, e in zip(mid, end))
    return "#%02x%02x%02x" % rgb


def _model_colors(models):
    return {m: PALETTE[i % len(PALETTE)] for i, m in enumerate(sorted(models))}


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * i / (count - 1) for i in range(count)]


# figures -------------------------------------------------------------------------


def _pick_config(report, descriptor, kernel, scaled=False):
    entries = [e for e in report.get("entries", [])
               if (descriptor is None or e["descriptor"] == descriptor)
               and (kernel is None or e["kernel"] == kernel)
               and not (scaled and e["scale"] is None)]
    if not entries:
        raise ReportError("ranking report has no entries for the requested configuration")
    first = entries[0]
    key = (first["descriptor"], first["n_bin"], first["kernel"])
    return [e for e in entries if (e["descriptor"], e["n_bin"], e["kernel"]) == key]


def mmd_vs_scale(report, descriptor=None, kernel=None, normalize=False):
    """One line per model over log10 scale, a rank bar and the anchor level.

    Without ``descriptor`` or ``kernel`` the first configuration with a
    scaled kernel is drawn.

    With ``normalize=True`` each curve is divided by its own maximum
    absolute value, for visual comparison only; the y label says so.
    """
    try:
        entries = _pick_config(report, descriptor, kernel, scaled=True)
    except ReportError:
        raise ReportError("MMD-vs-scale needs a kernel with a scale parameter") from None
    entries.sort(key=lambda e: e["scale"])
    models = list(report["models"])
    colors = _model_colors(models)
    xs = [math.log10(e["scale"]) for e in entries]
    series = {m: [float(e["mmd2"][m]) for e in entries] for m in models}
    anchor = [float(e["anchor"]) for e in entries]
    if normalize:
        for m, ys in series.items():
            top = max(abs(y) for y in ys) or 1.0
            series[m] = [y / top for y in ys]
        top = max(abs(y) for y in anchor) or 1.0
        anchor = [y / top for y in anchor]
    W, H = 640, 420
    L, R, T, B = 70, 130, 40, 120
    pw, ph = W - L - R, H - T - B
    x0, x1 = math.floor(min(xs)), math.ceil(max(xs))
    if x1 == x0:
        x1 = x0 + 1
    ally = [y for ys in series.values() for y in ys] + anchor
    y0, y1 = min(ally + [0.0]), max(ally)
    if y1 <= y0:
        y1 = y0 + 1.0

    def px(x):
        return L + (x - x0) / (x1 - x0) * pw

    def py(y):
        return T + ph - (y - y0) / (y1 - y0) * ph

    first = entries[0]
    title = f"MMD^2 vs scale: {first['descriptor']} / {first['kernel']} (n_bin={first['n_bin']})"
    body = [_text(W / 2, 22, title, size=13)]
    body.append(f'<rect class="frame" x="{_f(L)}" y="{_f(T)}" width="{_f(pw)}" height="{_f(ph)}" '
                f'fill="none" stroke="#000000"/>')
    for k in range(x0, x1 + 1):
        body.append(f'<line class="tick" x1="{_f(px(k))}" y1="{_f(T + ph)}" x2="{_f(px(k))}" '
                    f'y2="{_f(T + ph + 5)}" stroke="#000000"/>')
        body.append(_text(px(k), T + ph + 18, f"1e{k}", size=10))
    for v in _nice_ticks(y0, y1):
        body.append(_text(L - 6, py(v) + 4, f"{v:.3g}", anchor="end", size=10))
    body.append(_text(L + pw / 2, T + ph + 34, "scale (log10)", size=11))
    ylabel = "MMD^2 (max-normalized)" if normalize else "MMD^2"
    body.append(_text(16, T + ph / 2, ylabel, size=11,
                      extra=f' transform="rotate(-90 16 {_f(T + ph / 2)})"'))
    half = pw / max(len(xs), 1) / 2
    for x, a in zip(xs, anchor):
        body.append(f'<line class="anchor" x1="{_f(max(px(x) - half, L))}" y1="{_f(py(a))}" '
                    f'x2="{_f(min(px(x) + half, L + pw))}" y2="{_f(py(a))}" stroke="#000000" '
                    f'stroke-dasharray="4 3"/>')
    for m in models:
        pts = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(xs, series[m]))
        body.append(f'<polyline class="model" data-model="{escape(m)}" points="{pts}" fill="none" '
                    f'stroke="{colors[m]}" stroke-width="2"/>')
    # rank bar: one segment per scale, coloured by the argmin model
    bar_y = T + ph + 50
    edges = [x0] + [(a + b) / 2 for a, b in zip(xs, xs[1:])] + [x1]
    for e, a, b in zip(entries, edges, edges[1:]):
        fill = MISSING if e.get("tie") else colors[e["winner"]]
        body.append(f'<rect class="rank" x="{_f(px(a))}" y="{_f(bar_y)}" width="{_f(px(b) - px(a))}" '
                    f'height="14" fill="{fill}"/>')
    body.append(_text(L - 6, bar_y + 11, "rank 1", anchor="end", size=10))
    ly = T
    for m in models:
        body.append(f'<rect class="key" x="{_f(W - R + 15)}" y="{_f(ly)}" width="12" height="12" '
                    f'fill="{colors[m]}"/>')
        body.append(_text(W - R + 32, ly + 10, m, anchor="start", size=11))
        ly += 18
    body.append(f'<line class="key" x1="{_f(W - R + 15)}" y1="{_f(ly + 6)}" x2="{_f(W - R + 27)}" '
                f'y2="{_f(ly + 6)}" stroke="#000000" stroke-dasharray="4 3"/>')
    body.append(_text(W - R + 32, ly + 10, "train vs test", anchor="start", size=11))
    return _svg(W, H, body, title)


def _legend_diverging(x, y, width):
    body = ['<g class="legend">']
    steps = 21
    w = width / steps
    for i in range(steps):
        v = -1.0 + 2.0 * i / (steps - 1)
        body.append(f'<rect x="{_f(x + i * w)}" y="{_f(y)}" width="{_f(w)}" height="10" '
                    f'fill="{diverging_color(v)}"/>')
    body.append(_text(x, y + 24, "-1", size=10))
    body.append(_text(x + width / 2, y + 24, "0", size=10))
    body.append(_text(x + width, y + 24, "1", size=10))
    body.append("</g>")
    return body


def heatmap_best_worst(report, perturbation=None):
    """Best and worst coefficient per (descriptor, dataset) as two panels."""
    corr = CorrelationReport.from_dict(report)
    if not corr.rows:
        raise ReportError("correlation report has no rows")
    hm = best_worst_heatmap(corr, perturbation)
    if not hm.descriptors:
        raise ReportError(f"no rows for perturbation {perturbation!r}")
    descriptors, datasets, best, worst = hm.descriptors, hm.datasets, hm.best, hm.worst
    cw, ch = 70, 34
    L, T = 100, 60
    panel_w = cw * len(datasets)
    W = L + 2 * panel_w + 60 + 40
    H = T + ch * len(descriptors) + 110
    measure = corr.rows[0].measure
    title = f"best / worst {measure} per descriptor and dataset"
    if perturbation is not None:
        title += f" ({perturbation})"
    body = [_text(W / 2, 22, title, size=13)]
    for p, (name, grid) in enumerate((("best", best), ("worst", worst))):
        ox = L + p * (panel_w + 60)
        body.append(f'<g class="panel" data-panel="{name}">')
        body.append(_text(ox + panel_w / 2, T - 20, name, size=12))
        for j, ds in enumerate(datasets):
            body.append(_text(ox + (j + 0.5) * cw, T - 5, ds, size=9))
        for i, d in enumerate(descriptors):
            if p == 0:
                body.append(_text(L - 6, T + (i + 0.5) * ch + 4, d, anchor="end", size=10))
            for j in range(len(datasets)):
                v = grid[i][j]
                cls = "cell" if v is not None else "cell missing"
                body.append(f'<rect class="{cls}" x="{_f(ox + j * cw)}" y="{_f(T + i * ch)}" '
                            f'width="{cw}" height="{ch}" fill="{diverging_color(v)}" stroke="#ffffff"/>')
                label = "n/a" if v is None else f"{v:.2f}"
                body.append(_text(ox + (j + 0.5) * cw, T + (i + 0.5) * ch + 4, label, size=10))
        body.append("</g>")
    body.extend(_legend_diverging(L, T + ch * len(descriptors) + 30, min(2 * panel_w + 60, 300)))
    return _svg(W, H, body, title)


def heatmap_argmin(report, descriptor=None, kernel=None):
    """Winning model over a (n_bin x scale) grid."""
    maps = [h for h in report.get("argmin_heatmaps", [])
            if (descriptor is None or h["descriptor"] == descriptor)
            and (kernel is None or h["kernel"] == kernel)]
    if not maps:
        raise ReportError("ranking report has no argmin heatmap; rank with several --n-bins values")
    h = maps[0]
    colors = _model_colors(report["models"])
    cw, ch = 44, 26
    L, T = 80, 60
    W = L + cw * len(h["scales"]) + 140
    H = T + ch * len(h["n_bins"]) + 60
    title = f"rank-1 model: {h['descriptor']} / {h['kernel']}"
    body = [_text(W / 2, 22, title, size=13)]
    for j, s in enumerate(h["scales"]):
        label = "-" if s is None else f"1e{math.log10(s):.0f}" if s > 0 and float(math.log10(s)).is_integer() else f"{s:g}"
        body.append(_text(L + (j + 0.5) * cw, T - 6, label, size=9))
    for i, nb in enumerate(h["n_bins"]):
        body.append(_text(L - 6, T + (i + 0.5) * ch + 4, f"{nb} bins", anchor="end", size=10))
        for j, w in enumerate(h["winners"][i]):
            fill = colors.get(w, MISSING)
            body.append(f'<rect class="cell" x="{_f(L + j * cw)}" y="{_f(T + i * ch)}" width="{cw}" '
                        f'height="{ch}" fill="{fill}" stroke="#ffffff"/>')
    ly = T
    for m in sorted(report["models"]):
        body.append(f'<rect class="key" x="{_f(W - 120)}" y="{_f(ly)}" width="12" height="12" '
                    f'fill="{colors[m]}"/>')
        body.append(_text(W - 102, ly + 10, m, anchor="start", size=11))
        ly += 18
    return _svg(W, H, body, title)


def bench_lines(report):
    """Mean runtime per kernel against the swept size, log-scaled y axis."""
    rows = report.get("rows", [])
    if not rows:
        raise ReportError("benchmark table is empty")
    kernels = sorted({r["kernel"] for r in rows})
    variable = rows[0]["variable"]
    colors = {k: PALETTE[i % len(PALETTE)] for i, k in enumerate(kernels)}
    xs = sorted({r["value"] for r in rows})
    times = [max(float(r["mean_seconds"]), 1e-12) for r in rows]
    y0, y1 = math.floor(math.log10(min(times))), math.ceil(math.log10(max(times)))
    if y1 == y0:
        y1 = y0 + 1
    x0, x1 = xs[0], xs[-1] if xs[-1] > xs[0] else xs[0] + 1
    W, H = 600, 400
    L, R, T, B = 70, 110, 40, 60
    pw, ph = W - L - R, H - T - B

    def px(x):
        return L + (x - x0) / (x1 - x0) * pw

    def py(t):
        return T + ph - (math.log10(max(t, 1e-12)) - y0) / (y1 - y0) * ph

    title = f"kernel runtime vs {variable}"
    body = [_text(W / 2, 22, title, size=13)]
    body.append(f'<rect class="frame" x="{L}" y="{T}" width="{pw}" height="{ph}" fill="none" '
                f'stroke="#000000"/>')
    for k in range(y0, y1 + 1):
        body.append(_text(L - 6, py(10.0 ** k) + 4, f"1e{k}", anchor="end", size=10))
    for x in xs:
        body.append(_text(px(x), T + ph + 16, x, size=10))
    body.append(_text(L + pw / 2, T + ph + 36, variable, size=11))
    body.append(_text(16, T + ph / 2, "seconds (log)", size=11,
                      extra=f' transform="rotate(-90 16 {_f(T + ph / 2)})"'))
    for i, k in enumerate(kernels):
        pts = sorted((r["value"], float(r["mean_seconds"])) for r in rows if r["kernel"] == k)
        coords = " ".join(f"{_f(px(x))},{_f(py(t))}" for x, t in pts)
        body.append(f'<polyline class="kernel" data-kernel="{escape(k)}" points="{coords}" '
                    f'fill="none" stroke="{colors[k]}" stroke-width="2"/>')
        body.append(f'<rect class="key" x="{W - R + 15}" y="{T + 18 * i}" width="12" height="12" '
                    f'fill="{colors[k]}"/>')
        body.append(_text(W - R + 32, T + 18 * i + 10, k, anchor="start", size=11))
    return _svg(W, H, body, title)


def render(kind, report, **options) -> str:
    """Render ``report`` (a parsed report dict) as the SVG figure ``kind``."""
    kind = PlotKind(kind)
    expected = _EXPECTED[kind]
    if report.get("kind") != expected:
        raise ReportError(f"plot {kind.value!r} needs a {expected!r} report, got {report.get('kind')!r}")
    try:
        if kind is PlotKind.MMD_VS_SCALE:
            return mmd_vs_scale(report, **options)
        if kind is PlotKind.HEATMAP_BEST_WORST:
            return heatmap_best_worst(report, **options)
        if kind is PlotKind.HEATMAP_ARGMIN:
            return heatmap_argmin(report, **options)
        return bench_lines(report)
    except (KeyError, TypeError) as exc:
        raise ReportError(f"malformed {expected} report: missing or invalid {exc}") from None


def emit_plot(spec: PlotSpec, **options) -> Path:
    svg = render(spec.kind, load_report(spec.input), **options)
    atomic_write_text(spec.output, svg)
    return Path(spec.output)
