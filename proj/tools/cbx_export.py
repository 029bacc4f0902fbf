#!/usr/bin/env python3
"""Convert notebook prediction dumps into the cbx ingest JSON.

Accepted inputs: CSV/TSV, parquet, pickled DataFrames, and .npz archives.

    cbx_export.py preds.csv --label y --score LR=p_lr --score RF=p_rf -o data.json
    cbx_export.py run.npz --label y_true --score LR=proba --classes benign,malignant
    cbx_export.py frame.pkl --label target --score-prefix score_ --features age,sex

Label columns holding 0/1 or booleans are mapped onto --classes (default
neg,pos). Without --id, rows are numbered.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np
import pandas as pd


def read_frame(path: Path, sep: str | None) -> pd.DataFrame:
    suffix = path.suffix.lower()
    if suffix == ".npz":
        with np.load(path, allow_pickle=False) as archive:
            columns = {}
            for key in archive.files:
                arr = archive[key]
                if arr.ndim == 1:
                    columns[key] = arr
                elif arr.ndim == 2 and arr.shape[1] == 2:
                    # Two-column probability output: keep the positive class.
                    columns[key] = arr[:, 1]
                elif arr.ndim == 2 and arr.shape[1] == 1:
                    columns[key] = arr[:, 0]
            lengths = {len(v) for v in columns.values()}
            if len(lengths) != 1:
                raise SystemExit(f"{path}: 1-d arrays have differing lengths {sorted(lengths)}")
            return pd.DataFrame(columns)
    if suffix in (".parquet", ".pq"):
        return pd.read_parquet(path)
    if suffix in (".pkl", ".pickle"):
        frame = pd.read_pickle(path)
        if not isinstance(frame, pd.DataFrame):
            raise SystemExit(f"{path}: pickle does not hold a DataFrame")
        return frame
    if sep is None:
        sep = "\t" if suffix in (".tsv", ".tab") else ","
    return pd.read_csv(path, sep=sep)


def parse_scores(specs: list[str], prefix: str | None, frame: pd.DataFrame) -> dict[str, str]:
    out: dict[str, str] = {}
    for spec in specs:
        name, _, column = spec.partition("=")
        out[name] = column or name
    if prefix:
        for column in frame.columns:
            if isinstance(column, str) and column.startswith(prefix):
                out.setdefault(column[len(prefix):], column)
    if not out:
        raise SystemExit("no classifier columns: pass --score NAME=COLUMN or --score-prefix")
    for name, column in out.items():
        if column not in frame.columns:
            raise SystemExit(f"score column '{column}' for classifier '{name}' not found")
    return out


def label_mapper(values: pd.Series, classes: tuple[str, str]):
    uniques = set(values.dropna().unique().tolist())
    if uniques <= {0, 1, True, False}:
        return lambda v: classes[int(bool(v))]
    names = {str(v) for v in uniques}
    if not names <= set(classes):
        raise SystemExit(f"labels {sorted(names)} do not match --classes {classes[0]},{classes[1]}")
    return str


def json_value(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return None if math.isnan(v) else v
    if isinstance(value, (np.bool_, bool)):
        return str(bool(value)).lower()
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return str(value)


def build(frame: pd.DataFrame, args: argparse.Namespace) -> dict:
    if args.label not in frame.columns:
        raise SystemExit(f"label column '{args.label}' not found")
    classes = tuple(args.classes.split(","))
    if len(classes) != 2:
        raise SystemExit("--classes must be NEGATIVE,POSITIVE")
    scores = parse_scores(args.score, args.score_prefix, frame)
    if args.id:
        if args.id not in frame.columns:
            raise SystemExit(f"id column '{args.id}' not found")
        ids = frame[args.id].astype(str).tolist()
    else:
        width = len(str(len(frame)))
        ids = [f"{i:0{width}d}" for i in range(len(frame))]
    if len(set(ids)) != len(ids):
        raise SystemExit("instance ids are not unique")

    reserved = {args.label, args.id, *scores.values()}
    if args.features == "all":
        feature_cols = [c for c in frame.columns if c not in reserved]
    elif args.features:
        feature_cols = args.features.split(",")
        missing = [c for c in feature_cols if c not in frame.columns]
        if missing:
            raise SystemExit(f"feature columns not found: {missing}")
    else:
        feature_cols = []

    to_label = label_mapper(frame[args.label], classes)
    instances = []
    for row_id, (_, row) in zip(ids, frame.iterrows()):
        features = {}
        for col in feature_cols:
            v = json_value(row[col])
            if v is not None:
                features[str(col)] = v
        instances.append({"id": row_id, "label": to_label(row[args.label]), "features": features})

    classifiers = []
    for name, column in scores.items():
        values = frame[column].astype(float).tolist()
        classifiers.append({"name": name, "scores": {i: v for i, v in zip(ids, values) if not math.isnan(v)}})
    return {"classes": list(classes), "instances": instances, "classifiers": classifiers}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("input", type=Path)
    parser.add_argument("--label", required=True, help="ground-truth column")
    parser.add_argument("--id", help="instance id column (default: row number)")
    parser.add_argument("--score", action="append", default=[], metavar="NAME=COLUMN",
                        help="classifier score column; repeatable")
    parser.add_argument("--score-prefix", help="treat every column with this prefix as a classifier")
    parser.add_argument("--features", help="comma list of feature columns, or 'all' for the remaining columns")
    parser.add_argument("--classes", default="neg,pos", help="NEGATIVE,POSITIVE class names")
    parser.add_argument("--sep", help="CSV separator (default by extension)")
    parser.add_argument("-o", "--output", type=Path, help="output file (default stdout)")
    args = parser.parse_args(argv)

    doc = build(read_frame(args.input, args.sep), args)
    text = json.dumps(doc, indent=None, separators=(",", ":"))
    if args.output:
        args.output.write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
