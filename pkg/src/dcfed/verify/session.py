"""Channel-level run of the verified aggregation for whole series: one
mask-sum reconstruction, then per-period packets, aggregation and the
broadcast verdicts. Packet taps let an adversary corrupt traffic in
flight."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from ..masking.session import mask_sum_round
from .protocol import (
    RoundAbortError,
    VerificationPacket,
    s1_issue_pi,
    s2_package,
    s3_aggregate,
    s4_verify,
    unmasked_sum,
)
from ..crypto import Ciphertext


@dataclass
class VerifiedSumResult:
    name: str
    sums: np.ndarray
    verdicts: list
    residuals: list
    aborted: bool = False
    halted_at: int | None = None
    transcript: list = field(default_factory=list)

    @property
    def all_accepted(self) -> bool:
        return not self.aborted and all(v == "accept" for v in self.verdicts)


def run_verified_sums(channel, utility: str, agent_ids,
                      series: dict[str, np.ndarray], masks, utility_keys,
                      seed: int, name: str = "pgrid", psi: float = 1e-4,
                      packet_tap=None, halt_on_reject: bool = True) -> VerifiedSumResult:
    """Verified per-period sums of `series` (agent -> length-T array).

    masks: agent -> MaskSecret reused from the learning round (or fresh).
    packet_tap(agent, t, packet) -> packet may corrupt traffic.
    """
    agent_ids = list(agent_ids)
    T = len(next(iter(series.values())))
    rng = random.Random(seed)

    w_r_mant = mask_sum_round(channel, utility, agent_ids,
                              {a: masks[a] for a in agent_ids},
                              utility_keys, rng, round_id=0)

    pi, enc_pi = s1_issue_pi(utility_keys, rng)
    channel.broadcast("PI_BCAST", utility, {"cipher": enc_pi.to_decimal()})
    for aid in agent_ids:
        channel.receive(aid)

    sums = np.zeros(T)
    verdicts = []
    residuals = []
    result = VerifiedSumResult(name, sums, verdicts, residuals)
    for t in range(T):
        for aid in agent_ids:
            pkt = s2_package(aid, t, utility_keys.public, enc_pi,
                             float(series[aid][t]), masks[aid].mantissa,
                             random.Random(seed * 7919 + t * 131 + hashz(aid)))
            if packet_tap is not None:
                pkt = packet_tap(aid, t, pkt)
            channel.send("VPACKET", aid, utility, _encode_packet(pkt))
        packets = [_decode_packet(m.payload) for m in channel.receive(utility)
                   if m.kind == "VPACKET"]
        try:
            bc = s3_aggregate(utility_keys, packets, w_r_mant, pi, agent_ids)
        except RoundAbortError:
            result.aborted = True
            result.halted_at = t
            break
        channel.broadcast("UBCAST", utility, {
            "period": t, "omega": bc.omega_mant, "gamma": bc.gamma_mant,
            "pi_sum": bc.pi_sum_mant})
        verdict, residual = s4_verify(bc, psi)
        for aid in agent_ids:
            channel.receive(aid)
            channel.send("VERDICT", aid, utility,
                         {"period": t, "verdict": verdict})
        channel.receive(utility)
        verdicts.append(verdict)
        residuals.append(residual)
        sums[t] = unmasked_sum(bc, pi)
        if verdict == "reject" and halt_on_reject:
            result.halted_at = t
            break
    result.transcript = list(channel.delivery_log)
    return result


def hashz(s: str) -> int:
    """Deterministic small hash for seeding (string hash() is salted)."""
    acc = 0
    for ch in s:
        acc = (acc * 131 + ord(ch)) % 1_000_003
    return acc


def _encode_packet(p: VerificationPacket) -> dict:
    return {"agent": p.agent, "period": p.period, "value": p.masked_value,
            "gamma": p.masked_gamma, "cipher": p.bound_cipher.to_decimal()}


def _decode_packet(d: dict) -> VerificationPacket:
    return VerificationPacket(d["agent"], d["period"], d["value"], d["gamma"],
                              Ciphertext.from_decimal(d["cipher"]))
