from .state import AgentState, FedConfig
from .criteria import acceptance_metrics, momentum_mix, participation_gate
from .rounds import RoundReport, run_default_round, run_independent_round, run_round, run_warmup

__all__ = [
    "AgentState",
    "FedConfig",
    "acceptance_metrics",
    "momentum_mix",
    "participation_gate",
    "run_warmup",
    "run_round",
    "run_default_round",
    "run_independent_round",
    "RoundReport",
]
