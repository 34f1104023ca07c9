"""Four-step verifiable double aggregation.

Each agent sends, per period: the masked value p+w, the masked check
variable gamma+w, and an encryption of gamma + pi*(p+w) under the
utility's key, where pi is a coefficient only the utility knows in the
clear. The utility unmasks the sums with the reconstructed mask total and
broadcasts (Omega, gamma-sum, pi * value-sum); every agent then checks
|Omega - gamma - pi*sum| < psi. Tampering with any field shifts the
residual by a pi-weighted amount the attacker cannot cancel without pi.

All arithmetic runs on fixed-point mantissas: masked scalars at scale
2^40, the encrypted composite at 2^80, so honest rounds verify with an
exactly zero residual and psi only absorbs decode rounding.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from ..crypto import Ciphertext, add_ct, decrypt, encrypt, mul_plain
from ..crypto.fixedpoint import DEFAULT_SCALE_BITS
from ..masking.shamir import FIXED_SCALE_BITS

VALUE_BITS = DEFAULT_SCALE_BITS          # masked scalars: 2^40
COMPOSITE_BITS = 2 * DEFAULT_SCALE_BITS  # after one encrypted multiply: 2^80
PSI_DEFAULT = 1e-4
PI_MIN = 10
PI_MAX = 1_000_000
GAMMA_MAX = 1_000

ATTACK_MODES = ("value", "gamma", "joint", "cipher")


class RoundAbortError(RuntimeError):
    """A registered agent's packet is missing; the round cannot settle."""


@dataclass(frozen=True)
class VerificationPacket:
    agent: str
    period: int
    masked_value: int   # (p + w) mantissa at 2^40
    masked_gamma: int   # (gamma + w) mantissa at 2^40
    bound_cipher: Ciphertext  # gamma + pi*(p+w) at 2^80 under PK_u


@dataclass(frozen=True)
class UtilityBroadcast:
    period: int
    omega_mant: int     # at 2^80
    gamma_mant: int     # at 2^80
    pi_sum_mant: int    # pi * sum(p) at 2^80

    @property
    def omega(self) -> float:
        return self.omega_mant / (1 << COMPOSITE_BITS)

    @property
    def gamma_sum(self) -> float:
        return self.gamma_mant / (1 << COMPOSITE_BITS)

    @property
    def pi_times_sum(self) -> float:
        return self.pi_sum_mant / (1 << COMPOSITE_BITS)


def s1_issue_pi(utility_keys, rng: random.Random):
    """Fresh integer coefficient pi >= 10; only its encryption leaves the
    utility."""
    pi = rng.randrange(PI_MIN, PI_MAX + 1)
    enc_pi = encrypt(utility_keys.public, pi << VALUE_BITS, rng)
    return pi, enc_pi


def s2_package(agent: str, period: int, pk, enc_pi: Ciphertext, p: float,
               w_mantissa20: int, rng: random.Random) -> VerificationPacket:
    """Mask the shared value, draw a fresh check variable, and bind both
    into the encrypted composite."""
    w40 = w_mantissa20 << (VALUE_BITS - FIXED_SCALE_BITS)
    pw40 = int(round(p * (1 << VALUE_BITS))) + w40
    gamma = rng.randrange(0, GAMMA_MAX + 1)
    gamma_w40 = (gamma << VALUE_BITS) + w40
    prod = mul_plain(pk, enc_pi, pw40)                       # 2^80
    cipher = add_ct(pk, prod, encrypt(pk, gamma << COMPOSITE_BITS, rng))
    return VerificationPacket(agent, period, pw40, gamma_w40, cipher)


def s3_aggregate(utility_keys, packets, w_r_mantissa20: int,
                 pi: int, expected_agents) -> UtilityBroadcast:
    """Unmask the plaintext sums and derive Omega from the decrypted
    composites minus pi times the mask total."""
    expected = set(expected_agents)
    got = {p.agent for p in packets}
    if got != expected:
        raise RoundAbortError(
            f"missing packets from {sorted(expected - got)}" if expected - got
            else f"unexpected packets from {sorted(got - expected)}")
    periods = {p.period for p in packets}
    if len(periods) != 1:
        raise RoundAbortError(f"packets span periods {sorted(periods)}")
    period = periods.pop()

    w_r40 = w_r_mantissa20 << (VALUE_BITS - FIXED_SCALE_BITS)
    sum_pw = sum(p.masked_value for p in packets)
    sum_gw = sum(p.masked_gamma for p in packets)
    p_sum40 = sum_pw - w_r40
    gamma_sum40 = sum_gw - w_r40

    omega = sum(decrypt(utility_keys, p.bound_cipher) for p in packets)
    omega -= pi * (w_r40 << VALUE_BITS)

    return UtilityBroadcast(
        period=period,
        omega_mant=omega,
        gamma_mant=gamma_sum40 << VALUE_BITS,
        pi_sum_mant=pi * (p_sum40 << VALUE_BITS),
    )


def s4_verify(broadcast: UtilityBroadcast, psi: float = PSI_DEFAULT):
    """accept iff |Omega - gamma - pi*sum| < psi (real units)."""
    residual_mant = (broadcast.omega_mant - broadcast.gamma_mant
                     - broadcast.pi_sum_mant)
    residual = residual_mant / (1 << COMPOSITE_BITS)
    return ("accept" if abs(residual) < psi else "reject"), residual


def unmasked_sum(broadcast: UtilityBroadcast, pi: int) -> float:
    """The utility-side value sum implied by the broadcast."""
    return broadcast.pi_sum_mant / pi / (1 << COMPOSITE_BITS)


def inject_attack(packet: VerificationPacket, mode: str, rho: float,
                  pk=None, rng: random.Random | None = None) -> VerificationPacket:
    """Deterministic packet corruption for the attack scenarios."""
    if mode not in ATTACK_MODES:
        raise ValueError(f"unknown attack mode {mode!r}")
    rho40 = int(round(rho * (1 << VALUE_BITS)))
    if mode == "value":
        return replace(packet, masked_value=packet.masked_value + rho40)
    if mode == "gamma":
        return replace(packet, masked_gamma=packet.masked_gamma + rho40)
    if mode == "joint":
        return replace(packet,
                       masked_value=packet.masked_value + rho40,
                       masked_gamma=packet.masked_gamma - rho40)
    if pk is None or rng is None:
        raise ValueError("cipher attack needs the public key and an rng")
    rho80 = int(round(rho * (1 << COMPOSITE_BITS)))
    forged = add_ct(pk, packet.bound_cipher, encrypt(pk, rho80, rng))
    return replace(packet, bound_cipher=forged)
