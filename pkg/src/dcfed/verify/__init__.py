from .protocol import (
    RoundAbortError,
    UtilityBroadcast,
    VerificationPacket,
    inject_attack,
    s1_issue_pi,
    s2_package,
    s3_aggregate,
    s4_verify,
)
from .session import VerifiedSumResult, run_verified_sums

__all__ = [
    "VerificationPacket",
    "UtilityBroadcast",
    "s1_issue_pi",
    "s2_package",
    "s3_aggregate",
    "s4_verify",
    "inject_attack",
    "RoundAbortError",
    "run_verified_sums",
    "VerifiedSumResult",
]
