"""Prediction quality metrics."""

from __future__ import annotations

import numpy as np

_VAR_FLOOR = 1e-12


def r2_score(y_true, y_pred) -> float:
    """Coefficient of determination, 1 - SS_res/SS_tot.

    2-D inputs are scored per column and averaged over columns whose true
    values actually vary; constant columns carry no information either way.
    """
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape:
        raise ValueError("shape mismatch")
    if y_true.ndim == 1:
        y_true = y_true[:, None]
        y_pred = y_pred[:, None]
    scores = []
    for j in range(y_true.shape[1]):
        col = y_true[:, j]
        ss_tot = float(np.sum((col - col.mean()) ** 2))
        ss_res = float(np.sum((col - y_pred[:, j]) ** 2))
        if ss_tot <= _VAR_FLOOR * len(col):
            continue
        scores.append(1.0 - ss_res / ss_tot)
    if not scores:
        res = float(np.sum((y_true - y_pred) ** 2))
        return 1.0 if res <= _VAR_FLOOR else 0.0
    return float(np.mean(scores))
