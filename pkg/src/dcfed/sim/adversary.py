"""Scripted adversaries: model-layer corruption of the broadcast
aggregate during training, packet-layer corruption of verification
traffic during coordination."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..verify.protocol import ATTACK_MODES, inject_attack

MODEL_LAYER = "model"
PACKET_LAYER = "packet"


@dataclass(frozen=True)
class AttackEvent:
    when: int          # round index (model layer) or period (packet layer)
    target: str        # agent id
    mode: str          # packet: value|gamma|joint|cipher; model: noise
    rho: float
    layer: str = PACKET_LAYER

    def __post_init__(self):
        if self.layer not in (MODEL_LAYER, PACKET_LAYER):
            raise ValueError(f"unknown layer {self.layer!r}")
        if self.layer == PACKET_LAYER and self.mode not in ATTACK_MODES:
            raise ValueError(f"unknown packet mode {self.mode!r}")


@dataclass
class AdversaryScript:
    events: tuple

    @classmethod
    def from_json(cls, path) -> "AdversaryScript":
        doc = json.loads(Path(path).read_text())
        return cls(tuple(AttackEvent(**e) for e in doc["events"]))

    def to_json(self, path) -> None:
        doc = {"events": [vars(e) for e in self.events]}
        Path(path).write_text(json.dumps(doc, indent=2) + "\n")

    def model_tap(self, seed: int = 0):
        """Corrupts the aggregate block an agent receives: additive noise
        scaled by rho times the block's own spread."""
        events = [e for e in self.events if e.layer == MODEL_LAYER]
        if not events:
            return None

        def tap(agent_id, round_idx, block):
            out = block
            for e in events:
                if e.target == agent_id and e.when == round_idx and e.rho:
                    rng = np.random.default_rng((seed, 909, round_idx))
                    scale = max(float(np.std(out.data)), 1e-12)
                    noisy = out.copy()
                    noisy.data = noisy.data + rng.normal(
                        0.0, e.rho * scale, size=noisy.data.shape)
                    out = noisy
            return out

        return tap

    def packet_tap(self, pk=None, rng=None):
        events = [e for e in self.events if e.layer == PACKET_LAYER]
        if not events:
            return None

        def tap(agent_id, period, packet):
            out = packet
            for e in events:
                if e.target == agent_id and e.when == period and e.rho:
                    out = inject_attack(out, e.mode, e.rho, pk=pk, rng=rng)
            return out

        return tap


def apply_adversary(script: AdversaryScript | None, *, pk=None, rng=None,
                    seed: int = 0):
    """(model_tap, packet_tap) pair, either possibly None."""
    if script is None:
        return None, None
    return script.model_tap(seed), script.packet_tap(pk=pk, rng=rng)
