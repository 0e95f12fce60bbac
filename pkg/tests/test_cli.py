import json
import subprocess
import sys

import pytest

from graphmmd.cli import main
from graphmmd.graph import load_dataset


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    assert run("generate", "--family", "er", "--n-graphs", 20, "--nodes", "15:20", "--p", 0.3,
               "--seed", 7, "-o", d / "ref.jsonl") == 0
    assert run("generate", "--family", "er", "--n-graphs", 20, "--nodes", "15:20", "--p", 0.3,
               "--seed", 8, "-o", d / "train.jsonl") == 0
    return d


def test_generate_five_lines(tmp_path):
    out = tmp_path / "er.jsonl"
    assert run("generate", "--family", "er", "--n-graphs", 5, "--nodes", "10:10", "--p", 0.3,
               "--seed", 0, "-o", out) == 0
    assert len(out.read_text().splitlines()) == 5
    assert all(g.n == 10 for g in load_dataset(out))


def test_generate_meta_line(tmp_path):
    out = tmp_path / "ba.jsonl"
    assert run("generate", "--family", "ba", "--n-graphs", 3, "--nodes", "10:12", "--m", 2,
               "--meta", "--seed", 0, "-o", out) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 4 and "_meta" in json.loads(lines[0])
    assert load_dataset(out).meta["family"] == "ba"


def test_perturb_writes_one_file_per_level(workdir, tmp_path):
    assert run("perturb", "--input", workdir / "ref.jsonl", "--kind", "remove-edges",
               "--levels", "0:1:0.5", "--seed", 1, "-o", tmp_path) == 0
    files = sorted(p.name for p in tmp_path.glob("level_*.jsonl"))
    assert files == ["level_0.5.jsonl", "level_0.jsonl", "level_1.jsonl"]
    assert all(g.n_edges == 0 for g in load_dataset(tmp_path / "level_1.jsonl"))


def test_rank_missing_test_exits_1(workdir, tmp_path, capsys):
    code = run("rank", "--train", workdir / "train.jsonl", "--models", f"A={workdir / 'ref.jsonl'}",
               "-o", tmp_path / "r.json")
    assert code == 1
    assert "--test" in capsys.readouterr().err


def test_unknown_command_exits_1(capsys):
    assert run("frobnicate") == 1


def test_data_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "g", "n": 2, "edges": [[0, 5]]}\n')
    assert run("perturb", "--input", bad, "--kind", "add-edges", "--seed", 0, "-o", tmp_path / "o") == 2
    assert run("perturb", "--input", tmp_path / "missing.jsonl", "--kind", "add-edges",
               "--seed", 0, "-o", tmp_path / "o") == 2
    assert run("select", "--reference", bad, "--seed", 0, "-o", tmp_path / "s.json") == 2
    assert "error" in capsys.readouterr().err.lower()


def test_select_pipeline_best_at_least_worst(workdir, tmp_path):
    out = tmp_path / "report.json"
    assert run("select", "--reference", workdir / "ref.jsonl", "--perturbations", "add-edges,remove-edges",
               "--levels", "0:1:0.25", "--kernels", "rbf,emd", "--sigma-grid", "0.1,1,10",
               "--seed", 3, "-o", out, "--csv", tmp_path / "rows.csv") == 0
    rep = json.loads(out.read_text())
    assert rep["selection"]["kernel"] in ("rbf", "emd")
    for hm in rep["heatmaps"].values():
        for b_row, w_row in zip(hm["best"], hm["worst"]):
            for b, w in zip(b_row, w_row):
                if b is not None:
                    assert b >= w
    assert (tmp_path / "rows.csv").read_text().startswith("dataset,")


@pytest.mark.parametrize("measure", ["pearson", "spearman", "mi"])
def test_select_measures(workdir, tmp_path, measure):
    out = tmp_path / "r.json"
    assert run("select", "--reference", workdir / "ref.jsonl", "--perturbations", "rewire-edges",
               "--levels", "0:1:0.1", "--descriptors", "degree", "--kernels", "rbf",
               "--sigma-grid", "1", "--correlation", measure, "--seed", 0, "-o", out) == 0
    rows = json.loads(out.read_text())["rows"]
    assert {r["measure"] for r in rows} == {measure}


def test_config_file(workdir, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"descriptors": "clustering", "kernels": "linear"}))
    out = tmp_path / "r.json"
    assert run("--config", cfg, "select", "--reference", workdir / "ref.jsonl", "--perturbations",
               "remove-edges", "--levels", "0:1:0.5", "--seed", 0, "-o", out) == 0
    rows = json.loads(out.read_text())["rows"]
    assert {(r["descriptor"], r["kernel"]) for r in rows} == {("clustering", "linear")}


def test_rank_and_report(workdir, tmp_path):
    out = tmp_path / "rank.json"
    assert run("rank", "--test", workdir / "ref.jsonl", "--train", workdir / "train.jsonl",
               "--models", f"A={workdir / 'train.jsonl'}", f"B={workdir / 'ref.jsonl'}",
               "--descriptors", "clustering", "--kernels", "rbf", "--sigma-grid", "0.1,1",
               "--n-bins", "10,20", "-o", out, "--csv", tmp_path / "rank.csv") == 0
    rep = json.loads(out.read_text())
    assert len(rep["entries"]) == 4
    for kind in ("mmd-vs-scale", "heatmap-argmin"):
        assert run("report", "--kind", kind, "--input", out, "-o", tmp_path / f"{kind}.svg") == 0
    assert run("report", "--kind", "heatmap-best-worst", "--input", out, "-o", tmp_path / "x.svg") == 2


def test_bench_and_plot(tmp_path):
    out = tmp_path / "bench.csv"
    assert run("bench", "--vary", "graphs", "--values", "4,8", "--fixed", "nodes=12,bins=8",
               "--reps", 1, "--seed", 0, "-o", out) == 0
    assert len(out.read_text().splitlines()) == 1 + 3 * 2
    assert run("report", "--kind", "bench-lines", "--input", out, "-o", tmp_path / "b.svg") == 0


def _pipeline(d):
    assert run("generate", "--family", "ws", "--n-graphs", 12, "--nodes", "12:16", "--k", 4,
               "--p-rewire", 0.2, "--meta", "--seed", 11, "-o", d / "ws.jsonl") == 0
    assert run("perturb", "--input", d / "ws.jsonl", "--kind", "rewire-edges", "--levels", "0:1:0.5",
               "--seed", 2, "-o", d / "lv") == 0
    assert run("--threads", 0, "select", "--reference", d / "ws.jsonl", "--levels", "0:1:0.25",
               "--sigma-grid", "0.1,1,10", "--seed", 4, "-o", d / "sel.json", "--csv", d / "sel.csv") == 0
    assert run("rank", "--test", d / "ws.jsonl", "--train", d / "lv" / "level_0.jsonl",
               "--models", f"A={d / 'lv' / 'level_0.5.jsonl'}", f"B={d / 'lv' / 'level_1.jsonl'}",
               "--sigma-grid", "0.1,1,10", "-o", d / "rank.json", "--csv", d / "rank.csv") == 0
    assert run("report", "--kind", "heatmap-best-worst", "--input", d / "sel.json", "-o", d / "hm.svg") == 0
    assert run("report", "--kind", "mmd-vs-scale", "--input", d / "rank.json", "-o", d / "ms.svg") == 0
    return {p.relative_to(d): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def test_rerun_is_byte_identical(tmp_path):
    (tmp_path / "a").mkdir()
    (tmp_path / "b").mkdir()
    a, b = _pipeline(tmp_path / "a"), _pipeline(tmp_path / "b")
    assert len(a) == 10
    assert a == b


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "graphmmd.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "generate" in res.stdout
