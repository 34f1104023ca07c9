"""Ensembles of MLPs with block averaging over the first K shared layers.

A SharedBlock is the flat vector of the first-K weight/bias tensors; the
federated layer only ever sees these vectors, never full models.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .loss import composite_loss
from .mlp import MlpParams, forward, init_params

SHARED_LAYERS = 3
GRAD_CLIP = 5.0


@dataclass
class SharedBlock:
    data: np.ndarray
    shapes: tuple

    @classmethod
    def from_params(cls, params: MlpParams, k: int = SHARED_LAYERS) -> "SharedBlock":
        parts = []
        shapes = []
        for i in range(k):
            parts.append(params.weights[i].ravel())
            shapes.append(("w", i, params.weights[i].shape))
            parts.append(params.biases[i].ravel())
            shapes.append(("b", i, params.biases[i].shape))
        return cls(np.concatenate(parts), tuple(shapes))

    def write_into(self, params: MlpParams) -> None:
        off = 0
        for kind, i, shape in self.shapes:
            size = int(np.prod(shape))
            chunk = self.data[off:off + size].reshape(shape)
            if kind == "w":
                params.weights[i] = chunk.copy()
            else:
                params.biases[i] = chunk.copy()
            off += size

    def copy(self) -> "SharedBlock":
        return SharedBlock(self.data.copy(), self.shapes)


@dataclass
class EnsembleModel:
    members: list[MlpParams]
    dropout_p: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not self.members:
            raise ValueError("ensemble needs at least one member")
        if not 0.0 <= self.dropout_p < 1.0:
            raise ValueError("dropout_p must lie in [0, 1)")

    @classmethod
    def create(cls, dims, n_members: int, dropout_p: float = 0.1,
               seed: int = 0) -> "EnsembleModel":
        members = [init_params(dims, np.random.default_rng((seed, j, 11)))
                   for j in range(n_members)]
        return cls(members, dropout_p, seed)

    @property
    def n(self) -> int:
        return len(self.members)

    def copy(self) -> "EnsembleModel":
        return EnsembleModel([m.copy() for m in self.members],
                             self.dropout_p, self.seed)


def block_average(model: EnsembleModel, k: int = SHARED_LAYERS) -> SharedBlock:
    blocks = [SharedBlock.from_params(m, k) for m in model.members]
    data = np.mean([b.data for b in blocks], axis=0)
    return SharedBlock(data, blocks[0].shapes)


def apply_block(model: EnsembleModel, block: SharedBlock) -> EnsembleModel:
    """New ensemble with every member's shared layers replaced by `block`;
    the head layers are untouched."""
    out = model.copy()
    for m in out.members:
        block.write_into(m)
    return out


def ensemble_predict(model: EnsembleModel, u):
    """Mean and population standard deviation over member outputs (infer
    mode, dropout off)."""
    outs = np.stack([forward(m, u, mode="infer") for m in model.members])
    return outs.mean(axis=0), outs.std(axis=0, ddof=0)


@dataclass
class TrainSettings:
    steps: int
    batch_size: int = 64
    lr: float = 1e-3
    lambda_reg: float = 1e-5


def train_steps(model: EnsembleModel, inputs, targets, settings: TrainSettings,
                stream: int = 0) -> np.ndarray:
    """Mini-batch gradient descent on every member independently.

    Each member draws batches and dropout masks from its own generator
    seeded by (model.seed, member, stream), so identical calls retrace
    identical updates. Returns the per-step loss trace (mean over members).
    """
    inputs = np.asarray(inputs, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if len(inputs) == 0:
        raise ValueError("empty dataset")
    rngs = [np.random.default_rng((model.seed, j, stream))
            for j in range(model.n)]
    trace = np.zeros(settings.steps)
    for step in range(settings.steps):
        losses = []
        for j, member in enumerate(model.members):
            rng = rngs[j]
            if settings.batch_size >= len(inputs):
                idx = np.arange(len(inputs))
            else:
                idx = rng.integers(0, len(inputs), size=settings.batch_size)
            loss, grad = composite_loss(
                member, inputs[idx], targets[idx], settings.lambda_reg,
                mode="train", rng=rng, dropout_p=model.dropout_p)
            losses.append(loss)
            if settings.lr:
                _sgd_update(member, grad, settings.lr)
        trace[step] = float(np.mean(losses))
    return trace


def _sgd_update(member: MlpParams, grad: MlpParams, lr: float) -> None:
    sq = grad.sq_norm()
    scale = lr
    if sq > GRAD_CLIP * GRAD_CLIP:
        scale = lr * GRAD_CLIP / np.sqrt(sq)
    for k in range(4):
        member.weights[k] -= scale * grad.weights[k]
        member.biases[k] -= scale * grad.biases[k]
