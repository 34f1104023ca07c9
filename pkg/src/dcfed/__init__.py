"""Deterministic simulator for privacy-preserving federated
learning-to-optimization across cooperating data centers.

Subpackages:
    energy   -- system parameters, schedule MILP builders, validation
    milp     -- self-contained LP/MILP solvers plus an optional HiGHS engine
    nn       -- numpy MLP ensembles with composite-loss training
    masking  -- polynomial mask splitting and masked aggregation
    crypto   -- additively homomorphic cryptosystem with fixed-point encoding
    verify   -- verifiable double-aggregation protocol and attack injection
    fed      -- adaptive federated round orchestration
    sim      -- scenario sampling, demonstrations, pipeline, reporting
"""

__version__ = "0.1.0"
