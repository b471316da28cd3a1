"""CSV point sets and JSON polytope models.

Floats are written with ``repr`` so every file reloads bit-for-bit.
"""
import csv
import json

import numpy as np

from .geometry import Polytope


def points_to_csv(X, y, path_or_file):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y).ravel()
    if X.shape[0] != y.shape[0]:
        raise ValueError("X and y have different lengths")
    d = X.shape[1]

    def write(f):
        w = csv.writer(f, lineterminator="\n")
        w.writerow([f"x{i + 1}" for i in range(d)] + ["label"])
        for row, lab in zip(X, y):
            w.writerow([repr(float(v)) for v in row] + [int(lab)])

    if hasattr(path_or_file, "write"):
        write(path_or_file)
    else:
        with open(path_or_file, "w", newline="") as f:
            write(f)


def points_from_csv(path_or_file):
    """Read ``x1,...,xd,label`` rows; returns ``(X, y)``."""
    def read(f):
        rows = list(csv.reader(f))
        if not rows:
            raise ValueError("empty CSV file")
        header = [h.strip() for h in rows[0]]
        d = len(header) - 1
        if d < 1 or header[-1] != "label" or header[:-1] != [f"x{i + 1}" for i in range(d)]:
            raise ValueError(f"expected header x1,...,xd,label, got {','.join(header)}")
        body = [r for r in rows[1:] if r]
        for k, r in enumerate(body, start=2):
            if len(r) != d + 1:
                raise ValueError(f"line {k}: expected {d + 1} fields, got {len(r)}")
        X = np.array([[float(v) for v in r[:-1]] for r in body], dtype=float).reshape(-1, d)
        y = np.array([int(float(r[-1])) for r in body], dtype=int)
        if np.any((y != 1) & (y != -1)):
            raise ValueError("labels must be +1 or -1")
        return X, y

    if hasattr(path_or_file, "read"):
        return read(path_or_file)
    with open(path_or_file, newline="") as f:
        return read(f)


def model_to_json(P, gamma=None):
    return json.dumps(P.to_dict(gamma), indent=2)


def model_from_json(text):
    """Returns ``(polytope, gamma)``; gamma is None when absent."""
    data = json.loads(text)
    for key in ("dim", "halfspaces"):
        if key not in data:
            raise ValueError(f"model JSON lacks {key!r}")
    return Polytope.from_dict(data), data.get("gamma")


def save_model(P, path, gamma=None):
    with open(path, "w") as f:
        f.write(model_to_json(P, gamma) + "\n")


def load_model(path):
    with open(path) as f:
        return model_from_json(f.read())
