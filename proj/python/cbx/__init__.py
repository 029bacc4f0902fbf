"""Classifier comparison engine: trinary metrics, curves, selections, sampling.

Structured results are plain dicts and lists in the same shapes the HTTP
service returns.
"""

from __future__ import annotations

import json
from typing import Any, Iterable, Mapping, Optional, Sequence

from . import _cbx
from ._cbx import CbxError, Dataset, Service

__all__ = [
    "CbxError",
    "Dataset",
    "Service",
    "ValidationFailed",
    "auc",
    "bandwidth_series",
    "bootstrap",
    "brier",
    "confusion",
    "load",
    "metric",
    "partition",
    "perf_conf_histogram",
    "pr_curve",
    "rejection_curve",
    "reliability_curve",
    "roc_curve",
    "select",
    "threshold_grid",
]


class ValidationFailed(ValueError):
    """The payload parsed but failed semantic validation."""

    def __init__(self, report: dict):
        errors = report.get("errors", [])
        first = errors[0]["message"] if errors else "validation failed"
        super().__init__(first)
        self.report = report


def load(payload: str | bytes | Mapping[str, Any], format: str = "auto", normalize: bool = False,
         classes: Optional[tuple[str, str]] = None, provenance: str = "") -> tuple[Dataset, dict]:
    """Parse and validate an ingest payload; returns (dataset, report)."""
    if isinstance(payload, Mapping):
        payload, format = json.dumps(payload), "json"
    elif isinstance(payload, bytes):
        payload = payload.decode("utf-8")
    dataset, report_text = _cbx.load_dataset(payload, format, normalize, classes, provenance)
    report = json.loads(report_text)
    if dataset is None:
        raise ValidationFailed(report)
    return dataset, report


def _ids(scope: Optional[Iterable[str]]) -> Optional[list[str]]:
    return None if scope is None else list(scope)


def confusion(dataset: Dataset, classifier: str, lower: Optional[float] = None, upper: Optional[float] = None,
              scope=None, weights: Optional[Sequence[float]] = None) -> dict:
    return json.loads(_cbx.confusion(dataset, classifier, lower, upper, _ids(scope), weights))


def metric(dataset: Dataset, classifier: str, name: str, lower: Optional[float] = None, upper: Optional[float] = None,
           policy: str = "exclude", scope=None, weights=None) -> dict:
    value, undefined = _cbx.metric(dataset, classifier, name, lower, upper, policy, _ids(scope), weights)
    return {"value": value, "undefined": undefined}


def auc(dataset: Dataset, classifier: str, scope=None) -> float:
    return _cbx.auc(dataset, classifier, _ids(scope))


def brier(dataset: Dataset, classifier: str, scope=None, weights=None) -> float:
    return _cbx.brier(dataset, classifier, _ids(scope), weights)


def roc_curve(dataset: Dataset, classifier: str, scope=None) -> dict:
    return json.loads(_cbx.roc_curve(dataset, classifier, _ids(scope)))


def pr_curve(dataset: Dataset, classifier: str, scope=None) -> dict:
    return json.loads(_cbx.pr_curve(dataset, classifier, _ids(scope)))


def reliability_curve(dataset: Dataset, classifier: str, bins: int = 10, mode: str = "fraction-positive",
                      operating_point: Optional[tuple[float, float]] = None, scope=None) -> list:
    return json.loads(_cbx.reliability_curve(dataset, classifier, bins, mode, operating_point, _ids(scope)))


def perf_conf_histogram(dataset: Dataset, classifier: str, lower: Optional[float] = None, upper: Optional[float] = None,
                        bins: int = 10, scope=None, weights=None) -> list:
    return json.loads(_cbx.perf_conf_histogram(dataset, classifier, lower, upper, bins, _ids(scope), weights))


def rejection_curve(dataset: Dataset, classifier: str, threshold: float = 0.5, metric: str = "accuracy",
                    policy: str = "exclude", steps: int = 101, scope=None, weights=None) -> dict:
    return json.loads(_cbx.rejection_curve(dataset, classifier, threshold, metric, policy, steps, _ids(scope), weights))


def bandwidth_series(dataset: Dataset, classifier: str, bandwidths: Sequence[float] = (0.05, 0.1, 0.15, 0.2),
                     metric: str = "accuracy", resolution: int = 20, scope=None, weights=None) -> list:
    return json.loads(_cbx.bandwidth_series(dataset, classifier, list(bandwidths), metric, resolution,
                                            _ids(scope), weights))


def threshold_grid(dataset: Dataset, classifier: str, metric: str = "accuracy", resolution: int = 20,
                   scope=None, weights=None) -> list:
    return json.loads(_cbx.threshold_grid(dataset, classifier, metric, resolution, _ids(scope), weights))


def select(dataset: Dataset, expr: Mapping[str, Any] | str,
           operating_points: Optional[Mapping[str, tuple[float, float]]] = None) -> list[str]:
    """Member ids of a selection expression in its JSON tree form."""
    text = expr if isinstance(expr, str) else json.dumps(expr)
    return _cbx.select(dataset, text, dict(operating_points or {}))


def partition(dataset: Dataset, fraction: float, stratify: str = "none", seed: int = 0):
    """Returns (ids in A, ids in B, warnings)."""
    return _cbx.partition(dataset, fraction, stratify, seed)


def bootstrap(dataset: Dataset, seed: int = 0, size: Optional[int] = None) -> list[int]:
    """Per-instance draw counts, aligned with dataset.ids."""
    return _cbx.bootstrap(dataset, seed, size)
