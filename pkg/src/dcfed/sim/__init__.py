from .profiles import (
    DESK_EXPERIMENT,
    PAPER_EXPERIMENT,
    ScenarioProfile,
    desk_profile,
    desk_system,
    tiny_profile,
    tiny_system,
)
from .scenario_gen import sample_scenario
from .channel import ChannelNetwork, Message
from .demos import DemoDataset, generate_demonstrations, load_dataset, save_dataset
from .adversary import AdversaryScript, AttackEvent, apply_adversary
from .experiment import METHODS, TrainResult, run_training
from .pipeline import CoordinationOutcome, PipelineReport, SimConfig, run_coordination, run_pipeline
from .restore import restore_feasible

__all__ = [
    "ScenarioProfile",
    "desk_profile",
    "desk_system",
    "tiny_profile",
    "tiny_system",
    "DESK_EXPERIMENT",
    "PAPER_EXPERIMENT",
    "sample_scenario",
    "ChannelNetwork",
    "Message",
    "DemoDataset",
    "generate_demonstrations",
    "save_dataset",
    "load_dataset",
    "AdversaryScript",
    "AttackEvent",
    "apply_adversary",
    "METHODS",
    "TrainResult",
    "run_training",
    "SimConfig",
    "PipelineReport",
    "CoordinationOutcome",
    "run_pipeline",
    "run_coordination",
    "restore_feasible",
]
