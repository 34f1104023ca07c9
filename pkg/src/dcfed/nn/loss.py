"""Composite training loss: 0.85 MSE + 0.15 Huber (delta 1) averaged over
all output elements, plus lambda * squared parameter norm. Gradients via
backprop through the cached forward pass."""

from __future__ import annotations

import numpy as np

from .mlp import MlpParams, forward_cached

HUBER_DELTA = 1.0
MSE_WEIGHT = 0.85
HUBER_WEIGHT = 0.15


def data_loss(pred, target) -> float:
    """The MSE/Huber blend alone, for given predictions."""
    e = np.asarray(pred, dtype=float) - np.asarray(target, dtype=float)
    mse = float(np.mean(e * e))
    a = np.abs(e)
    hub = np.where(a <= HUBER_DELTA, 0.5 * e * e,
                   HUBER_DELTA * (a - 0.5 * HUBER_DELTA))
    return MSE_WEIGHT * mse + HUBER_WEIGHT * float(np.mean(hub))


def composite_loss(params: MlpParams, u, target, lambda_reg: float = 0.0,
                   mode: str = "infer", rng=None, dropout_p: float = 0.0):
    """Loss value and full parameter gradient at (u, target)."""
    target = np.atleast_2d(np.asarray(target, dtype=float))
    pred, cache = forward_cached(params, np.atleast_2d(u), mode, rng, dropout_p)
    e = pred - target
    n = e.size
    mse = float(np.sum(e * e)) / n
    a = np.abs(e)
    hub = np.where(a <= HUBER_DELTA, 0.5 * e * e,
                   HUBER_DELTA * (a - 0.5 * HUBER_DELTA))
    loss = MSE_WEIGHT * mse + HUBER_WEIGHT * float(np.sum(hub)) / n
    loss += lambda_reg * params.sq_norm()

    # d(loss)/d(pred)
    dpred = (MSE_WEIGHT * 2.0 * e
             + HUBER_WEIGHT * np.clip(e, -HUBER_DELTA, HUBER_DELTA)) / n

    gw = [None] * 4
    gb = [None] * 4
    delta = dpred
    gw[3] = cache["inputs"][3].T @ delta
    gb[3] = delta.sum(axis=0)
    for k in (2, 1, 0):
        delta = delta @ params.weights[k + 1].T
        if cache["masks"][k] is not None:
            delta = delta * cache["masks"][k]
        delta = delta * (cache["zs"][k] > 0.0)
        gw[k] = cache["inputs"][k].T @ delta
        gb[k] = delta.sum(axis=0)
    if lambda_reg:
        for k in range(4):
            gw[k] = gw[k] + 2.0 * lambda_reg * params.weights[k]
            gb[k] = gb[k] + 2.0 * lambda_reg * params.biases[k]
    return loss, MlpParams(gw, gb)
