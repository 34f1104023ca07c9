from .params import (
    DataCenterParams,
    EnergySystemModel,
    GeneratorParams,
    GridParams,
    Scenario,
    ScheduleSolution,
    StorageParams,
)
from .build import (
    EnvelopeRow,
    build_centralized,
    build_reduced,
    mccormick_envelope,
    piecewise_linearize_cost,
)
from .validate import validate_schedule
from .costs import cost_components

__all__ = [
    "DataCenterParams",
    "GeneratorParams",
    "StorageParams",
    "GridParams",
    "EnergySystemModel",
    "Scenario",
    "ScheduleSolution",
    "EnvelopeRow",
    "mccormick_envelope",
    "piecewise_linearize_cost",
    "build_centralized",
    "build_reduced",
    "validate_schedule",
    "cost_components",
]
