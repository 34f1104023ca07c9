"""Additive-secret splitting with polynomial shares and exact Lagrange
reconstruction of the mask sum.

Secrets are fixed-point integers (scale 2^20) and all share arithmetic is
exact: integer polynomial evaluation, Fraction-based interpolation. The
reconstructed sum therefore equals the true sum with zero error, while
floating-point interpolation at clustered points would drift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FIXED_SCALE_BITS = 20
FIXED_SCALE = 1 << FIXED_SCALE_BITS

# fresh per-round coefficients are drawn from [1, 2^40): wide enough that
# m-1 shares constrain nothing about the secret on any realistic grid
COEFF_RANGE = 1 << 40


class ShareError(ValueError):
    pass


@dataclass(frozen=True)
class MaskSecret:
    mantissa: int          # w scaled by 2^20, must be positive
    coeffs: tuple          # polynomial coefficients, mantissa domain
    owner: str = ""

    def __post_init__(self):
        if self.mantissa <= 0:
            raise ShareError("mask must be positive (it divides the aggregate)")

    @property
    def value(self) -> float:
        return self.mantissa / FIXED_SCALE


@dataclass(frozen=True)
class ShareBundle:
    points: tuple          # distinct positive integers, one per receiver
    values: tuple          # integer share mantissas, len == len(points)
    owner: str = ""

    def share_for(self, point: int) -> int:
        return self.values[self.points.index(point)]


def new_mask(rng: np.random.Generator, m: int, owner: str = "") -> MaskSecret:
    """Fresh mask uniform in [0.5, 2.0] (quantized) with m-1 coefficients."""
    w = float(rng.uniform(0.5, 2.0))
    coeffs = tuple(int(rng.integers(1, COEFF_RANGE)) for _ in range(m - 1))
    return MaskSecret(max(int(round(w * FIXED_SCALE)), 1), coeffs, owner)


def split_secret(secret: MaskSecret, m: int, points) -> ShareBundle:
    """Evaluate w + sum_k phi_k Z^k at every point, exactly."""
    points = tuple(int(z) for z in points)
    if len(points) < m:
        raise ShareError(f"need at least {m} points, got {len(points)}")
    if len(set(points)) != len(points):
        raise ShareError("duplicate evaluation points")
    if any(z < 1 for z in points):
        raise ShareError("points must be positive integers")
    if len(secret.coeffs) != m - 1:
        raise ShareError(f"secret carries {len(secret.coeffs)} coefficients, "
                         f"round needs {m - 1}")
    values = []
    for z in points:
        acc = secret.mantissa
        zk = 1
        for phi in secret.coeffs:
            zk *= z
            acc += phi * zk
        values.append(acc)
    return ShareBundle(points, tuple(values), secret.owner)


def sum_local_shares(received) -> int:
    """Sum of the share mantissas addressed to one point; exact."""
    return int(sum(int(v) for v in received))


def reconstruct_sum(points, sums) -> int:
    """Lagrange interpolation at zero over (Z_j, P_j(Z_j)) in exact
    rationals; returns the summed secret mantissa."""
    points = tuple(int(z) for z in points)
    if len(set(points)) != len(points):
        raise ShareError("repeated points in reconstruction")
    if len(points) != len(sums):
        raise ShareError("points/sums length mismatch")
    total = Fraction(0)
    for j, zj in enumerate(points):
        weight = Fraction(1)
        for h, zh in enumerate(points):
            if h != j:
                weight *= Fraction(zh, zh - zj)
        total += Fraction(int(sums[j])) * weight
    if total.denominator != 1:
        raise ShareError("reconstruction did not land on an integer; "
                         "inconsistent shares")
    return int(total)
