"""Per-agent federated bookkeeping and the round configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..nn.ensemble import EnsembleModel, block_average


@dataclass
class FedConfig:
    tau1: float = 0.1
    tau2: float = 0.01
    tau3: float = 0.8
    kappa: tuple = (0.4, 0.3, 0.3)
    window_L: int = 20
    beta: float = 0.9
    eps: float = 1e-6
    optout_k: int = 5
    optout_rate: float = 0.1
    rounds: int = 15
    warmup_steps: int = 400
    fed_steps: int = 60
    batch_size: int = 64
    lr: float = 2e-3
    lambda_reg: float = 1e-5
    min_participants: int = 3

    def __post_init__(self):
        if abs(sum(self.kappa) - 1.0) > 1e-12:
            raise ValueError("kappa weights must sum to 1")
        if self.window_L < 2:
            raise ValueError("window_L must be at least 2")


@dataclass
class AgentState:
    agent_id: str
    ensemble: EnsembleModel
    loss_hist_ind: list = field(default_factory=list)
    loss_hist_fed: list = field(default_factory=list)
    v: np.ndarray | None = None
    T_acc: int = 0
    T_rej: int = 0
    optout_until: int = 0

    def momentum(self) -> np.ndarray:
        if self.v is None:
            self.v = np.zeros_like(block_average(self.ensemble).data)
        return self.v

    def bootstrap_fed_history(self, window: int) -> None:
        """Seed the federated history with the warmup tail so round-one
        metrics are defined."""
        self.loss_hist_fed = list(self.loss_hist_ind[-window:])

    @property
    def acceptance_rate(self) -> float:
        return self.T_acc / max(self.T_acc + self.T_rej, 1)
