import json
import math

import pytest

import cbx

RUNNING = {
    "classes": ["neg", "pos"],
    "instances": [
        {"id": "a", "label": "pos", "features": {"age": 30, "sex": "M"}},
        {"id": "b", "label": "neg", "features": {"age": 40, "sex": "F"}},
        {"id": "c", "label": "neg", "features": {"age": 50, "sex": "M"}},
        {"id": "d", "label": "pos", "features": {"age": 60, "sex": "F"}},
    ],
    "classifiers": [{"name": "LR", "scores": {"a": 0.9, "b": 0.8, "c": 0.3, "d": 0.1}}],
}


@pytest.fixture
def ds():
    dataset, report = cbx.load(RUNNING)
    assert report["errors"] == []
    return dataset


def test_load_and_properties(ds):
    assert len(ds) == 4
    assert ds.ids == ["a", "b", "c", "d"]
    assert ds.labels == [1, 0, 0, 1]
    assert ds.classifiers == ["LR"]
    assert ds.features == ["age", "sex"]
    assert ds.scores("LR") == [0.9, 0.8, 0.3, 0.1]


def test_validation_and_parse_errors():
    bad = {"classes": ["n", "p"], "instances": [{"id": "a", "label": "p"}], "classifiers": []}
    with pytest.raises(cbx.ValidationFailed) as info:
        cbx.load(bad)
    assert info.value.report["errors"]
    with pytest.raises(cbx.CbxError) as err:
        cbx.load("{oops", format="json")
    assert err.value.code == "PARSE_ERROR"


def test_csv_ingest():
    dataset, _ = cbx.load("id,label,score:M\nx,pos,0.7\ny,neg,0.2\n", format="csv")
    assert dataset.classifiers == ["M"]


def test_trinary_counts_and_metrics(ds):
    counts = cbx.confusion(ds, "LR", 0.2, 0.85)
    assert (counts["TP"], counts["FN"], counts["Rejected"]) == (1, 1, 2)
    assert cbx.metric(ds, "LR", "accuracy", 0.2, 0.85) == {"value": 0.5, "undefined": False}
    assert cbx.metric(ds, "LR", "accuracy", 0.2, 0.85, policy="as-correct")["value"] == 0.75
    assert cbx.metric(ds, "LR", "precision", 0.95, 0.95)["undefined"]
    with pytest.raises(cbx.CbxError) as err:
        cbx.metric(ds, "LR", "f1", policy="as-correct")
    assert err.value.code == "UNSUPPORTED_POLICY"
    assert cbx.auc(ds, "LR") == 0.5
    assert math.isclose(cbx.brier(ds, "LR"), (0.01 + 0.64 + 0.09 + 0.81) / 4)


def test_curves(ds):
    roc = cbx.roc_curve(ds, "LR")
    assert roc["x"][0] == 0 and roc["y"][-1] == 1
    assert len(roc["x"]) == 5
    bins = cbx.perf_conf_histogram(ds, "LR")
    assert bins[9]["counts"]["TP"] == 1 and bins[8]["counts"]["FP"] == 1
    arc = cbx.rejection_curve(ds, "LR")
    assert arc["x"][0] == 0 and arc["y"][0] == 0.5
    rows = cbx.bandwidth_series(ds, "LR", [0.35])
    assert rows[10]["marks"][0]["upper"]["value"] == 0.75
    cells = cbx.threshold_grid(ds, "LR")
    cell = next(c for c in cells if c["lower"] == 0.2 and c["upper"] == 0.85)
    assert (cell["value"], cell["coverage"]) == (0.5, 0.5)
    assert len(cbx.reliability_curve(ds, "LR")) == 10


def test_selections(ds):
    fp = {"pred": {"kind": "outcome", "classifier": "LR", "category": "FP"}}
    assert cbx.select(ds, fp) == ["b"]
    assert cbx.select(ds, {"op": "complement", "args": [fp]}) == ["a", "c", "d"]
    assert cbx.select(ds, fp, {"LR": (0.5, 0.85)}) == []


def test_sampling_is_deterministic(ds):
    a, b, warnings = cbx.partition(ds, 0.5, "class", seed=3)
    assert sorted(a + b) == ds.ids and not set(a) & set(b)
    assert cbx.partition(ds, 0.5, "class", seed=3)[0] == a
    mult = cbx.bootstrap(ds, seed=9)
    assert sum(mult) == 4 and mult == cbx.bootstrap(ds, seed=9)


def test_service_round_trip(ds):
    service = cbx.Service()
    sid = service.create_session(ds, "demo")
    status, body = service.handle("PUT", f"/sessions/{sid}/operating-points/LR", body='{"lower":0.2,"upper":0.85}')
    assert status == 200
    status, body = service.handle("GET", f"/sessions/{sid}/curves/trinary-summary")
    assert json.loads(body)["results"][0]["counts"]["Rejected"] == 2
    status, body = service.handle("GET", f"/sessions/{sid}/export")
    status, created = service.handle("POST", "/sessions/import", body=body)
    assert status == 201
    copy = json.loads(created)["session"]
    a = service.handle("GET", f"/sessions/{sid}/curves/heatmap")[1]
    b = service.handle("GET", f"/sessions/{copy}/curves/heatmap")[1]
    assert a == b
    status, body = service.handle("GET", "/sessions/missing")
    assert status == 404 and json.loads(body)["code"] == "SESSION_NOT_FOUND"


def test_derived_classifier(ds):
    ds.derive("LR", "LR-fixed", 0.2, 0.85)
    assert ds.classifiers == ["LR", "LR-fixed"]
    assert cbx.confusion(ds, "LR-fixed")["Rejected"] == 2
    assert cbx.confusion(ds, "LR-fixed", 0.2, 0.85)["Rejected"] == 2
    with pytest.raises(cbx.CbxError) as err:
        cbx.confusion(ds, "LR-fixed", 0.5, 0.5)
    assert err.value.code == "FROZEN_CLASSIFIER"
