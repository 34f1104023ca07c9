"""Checkpoints as text tensor dumps (shape header + one value per line)
and loss traces as step,loss CSV. Text keeps outputs byte-reproducible."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .ensemble import EnsembleModel
from .mlp import MlpParams


def _dump_tensor(fh, name: str, arr: np.ndarray) -> None:
    fh.write(f"{name} {' '.join(map(str, arr.shape))}\n")
    for v in arr.ravel():
        fh.write(f"{float(v)!r}\n")


def save_ensemble(model: EnsembleModel, path) -> None:
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"ensemble {model.n} dropout {model.dropout_p!r} "
                 f"seed {model.seed}\n")
        for j, m in enumerate(model.members):
            for k in range(4):
                _dump_tensor(fh, f"m{j}.w{k}", m.weights[k])
                _dump_tensor(fh, f"m{j}.b{k}", m.biases[k])


def load_ensemble(path) -> EnsembleModel:
    lines = Path(path).read_text().splitlines()
    head = lines[0].split()
    n, dropout_p, seed = int(head[1]), float(head[3]), int(head[5])
    pos = 1
    members = []
    for _ in range(n):
        weights, biases = [], []
        for k in range(4):
            for dest in (weights, biases):
                header = lines[pos].split()
                shape = tuple(int(s) for s in header[1:])
                size = int(np.prod(shape)) if shape else 1
                vals = np.array([float(v) for v in lines[pos + 1: pos + 1 + size]])
                dest.append(vals.reshape(shape))
                pos += 1 + size
        members.append(MlpParams(weights, biases))
    return EnsembleModel(members, dropout_p, seed)


def save_trace(trace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "loss"])
        for i, v in enumerate(np.asarray(trace, dtype=float)):
            w.writerow([i, f"{float(v)!r}"])


def load_trace(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return np.array([float(r["loss"]) for r in rows])
