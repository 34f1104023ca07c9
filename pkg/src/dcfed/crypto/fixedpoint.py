"""Signed fixed-point encoding for homomorphic arithmetic.

Global scale 2^40. Multiplying two scaled mantissas yields scale 2^80;
the protocol layer tracks one such rescale (multiplicative depth one).
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_SCALE_BITS = 40


@dataclass(frozen=True)
class FixedPoint:
    mantissa: int
    scale_bits: int = DEFAULT_SCALE_BITS

    @property
    def value(self) -> float:
        return self.mantissa / (1 << self.scale_bits)

    def rescaled(self, new_bits: int) -> "FixedPoint":
        """Exact upscale only; downscaling would truncate silently."""
        if new_bits < self.scale_bits:
            raise ValueError("refusing lossy downscale")
        return FixedPoint(self.mantissa << (new_bits - self.scale_bits),
                          new_bits)


def encode_fixed(x: float, scale_bits: int = DEFAULT_SCALE_BITS) -> FixedPoint:
    return FixedPoint(int(round(x * (1 << scale_bits))), scale_bits)


def decode_fixed(mantissa: int, scale_bits: int = DEFAULT_SCALE_BITS) -> float:
    return mantissa / (1 << scale_bits)
