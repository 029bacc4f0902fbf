import importlib.util
import json
from pathlib import Path

import numpy as np
import pandas as pd

import cbx

SCRIPT = Path(__file__).resolve().parents[2] / "tools" / "cbx_export.py"
spec = importlib.util.spec_from_file_location("cbx_export", SCRIPT)
cbx_export = importlib.util.module_from_spec(spec)
spec.loader.exec_module(cbx_export)


def test_csv_dump_loads(tmp_path):
    frame = pd.DataFrame({
        "uid": ["a", "b", "c", "d"],
        "y": [1, 0, 0, 1],
        "p_lr": [0.9, 0.8, 0.3, 0.1],
        "age": [30, 40, None, 60],
        "sex": ["M", "F", "M", "F"],
    })
    src = tmp_path / "preds.csv"
    frame.to_csv(src, index=False)
    out = tmp_path / "data.json"
    assert cbx_export.main([str(src), "--label", "y", "--id", "uid", "--score", "LR=p_lr",
                            "--features", "all", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["classes"] == ["neg", "pos"]
    assert doc["instances"][2]["features"] == {"sex": "M"}
    dataset, report = cbx.load(doc)
    assert report["errors"] == []
    assert cbx.confusion(dataset, "LR", 0.5, 0.5)["TP"] == 1


def test_npz_with_probability_matrix(tmp_path):
    src = tmp_path / "run.npz"
    np.savez(src, y_true=np.array([0, 1, 1]), proba=np.array([[0.8, 0.2], [0.3, 0.7], [0.4, 0.6]]))
    out = tmp_path / "data.json"
    cbx_export.main([str(src), "--label", "y_true", "--score", "M=proba", "--classes", "benign,malignant",
                     "-o", str(out)])
    doc = json.loads(out.read_text())
    assert doc["classifiers"][0]["scores"] == {"0": 0.2, "1": 0.7, "2": 0.6}
    assert [i["label"] for i in doc["instances"]] == ["benign", "malignant", "malignant"]
    dataset, _ = cbx.load(doc)
    assert dataset.classes == ("benign", "malignant")


def test_score_prefix_from_pickle(tmp_path):
    frame = pd.DataFrame({"target": ["pos", "neg"], "score_A": [0.6, 0.1], "score_B": [0.5, 0.5]})
    src = tmp_path / "frame.pkl"
    frame.to_pickle(src)
    out = tmp_path / "data.json"
    cbx_export.main([str(src), "--label", "target", "--score-prefix", "score_", "-o", str(out)])
    doc = json.loads(out.read_text())
    assert [c["name"] for c in doc["classifiers"]] == ["A", "B"]
