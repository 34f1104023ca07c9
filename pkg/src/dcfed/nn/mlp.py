"""Four-layer MLP with ReLU hidden activations and inverted dropout.

Weights are (d_in, d_out) so a batch flows as u @ W + b. Dropout scales
kept units by 1/(1-p) during training, so inference is a plain pass with
no rescaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MlpParams:
    weights: list[np.ndarray]  # 4 matrices
    biases: list[np.ndarray]   # 4 vectors

    def __post_init__(self):
        if len(self.weights) != 4 or len(self.biases) != 4:
            raise ValueError("expected exactly four layers")
        for k, (W, b) in enumerate(zip(self.weights, self.biases)):
            if W.shape[1] != b.shape[0]:
                raise ValueError(f"layer {k}: weight/bias shape mismatch")
            if k and self.weights[k - 1].shape[1] != W.shape[0]:
                raise ValueError(f"layer {k}: width chain broken")

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.weights[0].shape[0],) + tuple(W.shape[1] for W in self.weights)

    def copy(self) -> "MlpParams":
        return MlpParams([W.copy() for W in self.weights],
                         [b.copy() for b in self.biases])

    def n_params(self) -> int:
        return sum(W.size for W in self.weights) + sum(b.size for b in self.biases)

    def sq_norm(self) -> float:
        return float(sum(np.sum(W * W) for W in self.weights)
                     + sum(np.sum(b * b) for b in self.biases))


def init_params(dims, rng) -> MlpParams:
    """He-style fan-in uniform init: U(-sqrt(6/fan_in), +sqrt(6/fan_in))."""
    if len(dims) != 5:
        raise ValueError("dims must be (d_u, h1, h2, h3, d_y)")
    weights, biases = [], []
    for d_in, d_out in zip(dims, dims[1:]):
        lim = np.sqrt(6.0 / d_in)
        weights.append(rng.uniform(-lim, lim, size=(d_in, d_out)))
        biases.append(np.zeros(d_out))
    return MlpParams(weights, biases)


def forward(params: MlpParams, u, mode: str = "infer", rng=None,
            dropout_p: float = 0.0):
    """Network output for input u (vector or batch)."""
    y, _ = forward_cached(params, u, mode, rng, dropout_p)
    return y


def forward_cached(params: MlpParams, u, mode: str = "infer", rng=None,
                   dropout_p: float = 0.0):
    """Output plus the intermediates backprop needs."""
    if mode not in ("train", "infer"):
        raise ValueError(f"unknown mode {mode!r}")
    single = np.ndim(u) == 1
    h = np.atleast_2d(np.asarray(u, dtype=float))
    if h.shape[1] != params.weights[0].shape[0]:
        raise ValueError(f"input width {h.shape[1]} != expected "
                         f"{params.weights[0].shape[0]}")
    drop = mode == "train" and dropout_p > 0.0
    if drop and rng is None:
        raise ValueError("train-mode dropout needs an rng")
    cache = {"inputs": [], "zs": [], "masks": []}
    for k in range(3):
        cache["inputs"].append(h)
        z = h @ params.weights[k] + params.biases[k]
        cache["zs"].append(z)
        h = np.maximum(z, 0.0)
        if drop:
            mask = (rng.random(h.shape) >= dropout_p) / (1.0 - dropout_p)
        else:
            mask = None
        cache["masks"].append(mask)
        if mask is not None:
            h = h * mask
    cache["inputs"].append(h)
    y = h @ params.weights[3] + params.biases[3]
    if single:
        return y[0], cache
    return y, cache
