import json
import subprocess
import sys

import pytest

from conftest import DATA
from quipus.cli import build_parser, main

FAST = ["--iterations", "5", "--swarm-size", "3", "--reps", "1", "--folds", "3"]
IRIS = ["--dataset", str(DATA / "iris.csv")]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cv_baseline(capsys):
    code, out, _ = run(capsys, "cv", *IRIS, "--mode", "baseline", "--k", "5", *FAST)
    assert code == 0
    d = json.loads(out)
    assert d["mode"] == "baseline" and 0.8 < d["mean"] <= 1.0
    assert d["params"]["k"] == 5


def test_grid_range(capsys, tmp_path):
    code, out, _ = run(capsys, "grid", *IRIS, "--mode", "baseline", "--k", "1:3",
                       "--alpha", "0", "1", *FAST, "--out", str(tmp_path))
    assert code == 0
    assert json.loads(out)["points"] == 6
    assert (tmp_path / "grid.csv").read_text().count("\n") == 7


def test_train_then_predict(capsys, tmp_path):
    model = tmp_path / "m.json"
    code, out, _ = run(capsys, "train", *IRIS, "--k", "5", "--alpha", "0.5",
                       "--iterations", "5", "--out", str(model))
    assert code == 0 and json.loads(out)["active"][0] is True
    code, out, err = run(capsys, "predict", "--model", str(model), *IRIS, "--label-col", "-1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "row,predicted" and len(lines) == 151
    assert json.loads(err)["accuracy"] > 0.8


def test_predict_unlabeled(capsys, tmp_path):
    model = tmp_path / "m.json"
    run(capsys, "train", *IRIS, "--k", "5", "--iterations", "3", "--out", str(model))
    rows = tmp_path / "x.csv"
    rows.write_text("a,b,c,d\n5.1,3.5,1.4,0.2\n6.7,3.0,5.2,2.3\n")
    code, out, _ = run(capsys, "predict", "--model", str(model), "--dataset", str(rows))
    assert code == 0
    assert out.splitlines()[1:] == ["0,setosa", "1,virginica"]


def test_export_graphs(capsys, tmp_path):
    code, out, _ = run(capsys, "export-graphs", *IRIS, "--k", "3", "--out", str(tmp_path))
    assert code == 0
    summary = json.loads(out)
    assert [s["network"] for s in summary][0] == "instance" and len(summary) == 5
    assert (tmp_path / "attribute_4.graphml").exists()


def test_normalize(capsys, tmp_path):
    out = tmp_path / "n.csv"
    code, _, _ = run(capsys, "normalize", *IRIS, "--out", str(out))
    assert code == 0
    first = out.read_text().splitlines()[1].split(",")
    assert all(0.0 <= float(v) <= 1.0 for v in first[:-1])


def test_toml_config_with_override(capsys, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text(f'dataset = "{DATA / "iris.csv"}"\nmode = "baseline"\nk = 12\nfolds = 3\n'
                   'repetitions = 1\n')
    code, out, _ = run(capsys, "cv", "--config", str(cfg), "--k", "4")
    assert code == 0 and json.loads(out)["params"]["k"] == 4


@pytest.mark.parametrize("argv", [
    ["cv", "--dataset", "/nope.csv", "--mode", "baseline"],
    ["cv", *IRIS, "--folds", "1"],
    ["cv", *IRIS, "--eps", "3"],
    ["cv"],
])
def test_structured_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    d = json.loads(err)
    assert set(d) == {"error", "message"} and d["message"]


def test_parser_has_all_subcommands():
    sub = build_parser()._subparsers._group_actions[0].choices
    assert set(sub) == {"cv", "grid", "train", "predict", "export-graphs", "normalize"}


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "quipus", "cv", "--dataset", "/nope.csv"],
                       capture_output=True, text=True)
    assert r.returncode == 2
    assert json.loads(r.stderr)["error"]
