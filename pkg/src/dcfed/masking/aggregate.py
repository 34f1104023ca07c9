"""Mask-weighted aggregation of shared parameter blocks: each agent ships
w_i * theta_i; the aggregator divides the sum by the reconstructed mask
total, recovering the w-weighted mean without seeing any single w_i."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..nn.ensemble import SharedBlock
from .shamir import FIXED_SCALE, MaskSecret

W_R_FLOOR = 1e-9


class MaskDegenerateError(RuntimeError):
    """Mask sum too close to zero: the round must be abandoned."""


@dataclass
class MaskedUpdate:
    data: np.ndarray       # w_i * block vector
    shapes: tuple
    round_id: int
    agent: str


def mask_update(secret: MaskSecret, block: SharedBlock,
                round_id: int = 0) -> MaskedUpdate:
    return MaskedUpdate(block.data * secret.value, block.shapes,
                        round_id, secret.owner)


def aggregate_masked(updates, w_r_mantissa: int) -> SharedBlock:
    """Sum of masked blocks divided by the reconstructed mask sum."""
    if not updates:
        raise ValueError("no updates to aggregate")
    w_r = w_r_mantissa / FIXED_SCALE
    if w_r <= W_R_FLOOR:
        raise MaskDegenerateError(f"mask sum {w_r} is degenerate")
    rounds = {u.round_id for u in updates}
    if len(rounds) != 1:
        raise ValueError(f"updates span rounds {sorted(rounds)}")
    shapes = updates[0].shapes
    for u in updates:
        if u.shapes != shapes:
            raise ValueError("shape mismatch across updates")
    total = np.sum([u.data for u in updates], axis=0)
    return SharedBlock(total / w_r, shapes)
