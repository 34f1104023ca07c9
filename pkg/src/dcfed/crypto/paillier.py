"""Additively homomorphic public-key cryptosystem (Paillier, g = n+1
variant) over signed fixed-point mantissas.

Supports ciphertext addition and plaintext-integer multiplication, which
is all the double-aggregation protocol needs (multiplicative depth one).
Decryption runs over the CRT for a ~4x speedup; encryption can draw
obfuscators from a precomputed pool where bulk throughput matters more
than fresh randomness per ciphertext.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

PRIME_SEARCH_CAP = 100_000
_SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]


class OverflowEncodingError(ValueError):
    """Mantissa magnitude exceeds the safe plaintext range."""


class KeyMismatchError(ValueError):
    pass


def _is_probable_prime(n: int, rng: random.Random, rounds: int = 30) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = (x * x) % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _gen_prime(bits: int, rng: random.Random) -> int:
    for _ in range(PRIME_SEARCH_CAP):
        cand = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if _is_probable_prime(cand, rng):
            return cand
    raise RuntimeError(f"prime search budget exceeded at {bits} bits")


@dataclass
class PaillierPublicKey:
    n: int
    key_bits: int

    def __post_init__(self):
        self.nsquare = self.n * self.n
        self.g = self.n + 1
        self.max_int = self.n // 3
        self._pool: list[int] = []

    @property
    def key_id(self) -> int:
        return self.n % (1 << 64)

    def precompute_obfuscators(self, count: int, rng: random.Random) -> None:
        """Bank of r^n values; encryption multiplies two random entries,
        so the effective obfuscator space is the pool squared."""
        self._pool = [pow(rng.randrange(1, self.n), self.n, self.nsquare)
                      for _ in range(count)]

    def obfuscator(self, rng: random.Random) -> int:
        if self._pool:
            a = self._pool[rng.randrange(len(self._pool))]
            b = self._pool[rng.randrange(len(self._pool))]
            return (a * b) % self.nsquare
        return pow(rng.randrange(1, self.n), self.n, self.nsquare)

    def to_hex(self) -> str:
        return f"{self.key_bits:x}:{self.n:x}"

    @classmethod
    def from_hex(cls, text: str) -> "PaillierPublicKey":
        bits, n = text.split(":")
        return cls(int(n, 16), int(bits, 16))


@dataclass
class KeyPair:
    public: PaillierPublicKey
    p: int
    q: int

    def __post_init__(self):
        n = self.public.n
        self.p2 = self.p * self.p
        self.q2 = self.q * self.q
        self.hp = self._h(self.p, self.p2, n)
        self.hq = self._h(self.q, self.q2, n)
        self.q_inv_p = pow(self.q, -1, self.p)

    @staticmethod
    def _h(p: int, p2: int, n: int) -> int:
        # L_p((n+1)^(p-1) mod p^2)^-1 mod p
        u = pow(n + 1, p - 1, p2)
        lp = (u - 1) // p
        return pow(lp, -1, p)

    def decrypt_raw(self, c: int) -> int:
        mp = ((pow(c, self.p - 1, self.p2) - 1) // self.p) * self.hp % self.p
        mq = ((pow(c, self.q - 1, self.q2) - 1) // self.q) * self.hq % self.q
        # CRT combine
        m = mq + self.q * ((self.q_inv_p * (mp - mq)) % self.p)
        return m % self.public.n

    def to_hex(self) -> str:
        return f"{self.public.key_bits:x}:{self.p:x}:{self.q:x}"

    @classmethod
    def from_hex(cls, text: str) -> "KeyPair":
        bits, p, q = (int(t, 16) for t in text.split(":"))
        return cls(PaillierPublicKey(p * q, bits), p, q)


@dataclass(frozen=True)
class Ciphertext:
    value: int
    key_id: int

    def to_decimal(self) -> str:
        return f"{self.key_id}:{self.value}"

    @classmethod
    def from_decimal(cls, text: str) -> "Ciphertext":
        kid, val = text.split(":")
        return cls(int(val), int(kid))


def keygen(key_bits: int = 2048, seed: int | random.Random = 0) -> KeyPair:
    """Probabilistic primes, deterministic under seed. 512-bit keys are
    the floor (tests); 2048 is the production default."""
    if key_bits < 512:
        raise ValueError("key_bits must be at least 512")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    half = key_bits // 2
    while True:
        p = _gen_prime(half, rng)
        q = _gen_prime(half, rng)
        if p != q and (p * q).bit_length() >= key_bits - 1:
            break
    return KeyPair(PaillierPublicKey(p * q, key_bits), p, q)


def encrypt(pk: PaillierPublicKey, mantissa: int,
            rng: random.Random) -> Ciphertext:
    """Encrypt a signed integer mantissa; randomized."""
    if abs(mantissa) > pk.max_int:
        raise OverflowEncodingError(
            f"mantissa {mantissa.bit_length()} bits exceeds plaintext space")
    m = mantissa % pk.n
    base = (1 + m * pk.n) % pk.nsquare
    return Ciphertext((base * pk.obfuscator(rng)) % pk.nsquare, pk.key_id)


def decrypt(sk: KeyPair, ct: Ciphertext) -> int:
    """Signed integer mantissa."""
    if ct.key_id != sk.public.key_id:
        raise KeyMismatchError("ciphertext under a different key")
    m = sk.decrypt_raw(ct.value)
    if m > sk.public.n // 2:
        m -= sk.public.n
    return m


def add_ct(pk: PaillierPublicKey, c1: Ciphertext, c2: Ciphertext) -> Ciphertext:
    if c1.key_id != c2.key_id or c1.key_id != pk.key_id:
        raise KeyMismatchError("mixing keys in homomorphic addition")
    return Ciphertext((c1.value * c2.value) % pk.nsquare, pk.key_id)


def mul_plain(pk: PaillierPublicKey, c: Ciphertext, k: int) -> Ciphertext:
    """Multiply the underlying plaintext by the integer k. The caller owns
    scale bookkeeping: fixed-point scales multiply, and one rescale depth
    suffices for the protocol."""
    if c.key_id != pk.key_id:
        raise KeyMismatchError("ciphertext under a different key")
    if abs(k) > pk.max_int:
        raise OverflowEncodingError("plaintext multiplier exceeds space")
    if k >= 0:
        return Ciphertext(pow(c.value, k, pk.nsquare), pk.key_id)
    inv = pow(c.value, -1, pk.nsquare)
    return Ciphertext(pow(inv, -k, pk.nsquare), pk.key_id)
