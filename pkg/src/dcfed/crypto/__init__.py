from .fixedpoint import FixedPoint, decode_fixed, encode_fixed
from .paillier import (
    Ciphertext,
    KeyPair,
    OverflowEncodingError,
    PaillierPublicKey,
    add_ct,
    decrypt,
    encrypt,
    keygen,
    mul_plain,
)

__all__ = [
    "FixedPoint",
    "encode_fixed",
    "decode_fixed",
    "KeyPair",
    "PaillierPublicKey",
    "Ciphertext",
    "keygen",
    "encrypt",
    "decrypt",
    "add_ct",
    "mul_plain",
    "OverflowEncodingError",
]
