"""Exponent-space backend: the order-N cyclic group represented by the
discrete logs of its elements.

Every group law is plain Z_N arithmetic, which makes identities exactly
checkable and discrete logs trivially readable. It exists as an oracle
for tests and fast end-to-end runs and is, by construction, not
cryptographic.
"""

from __future__ import annotations

from ..algebra import byte_width, decode_int, encode_int

BACKEND_ID = 0x01
NAME = "debug"


class DebugBackend:
    id = BACKEND_ID
    name = NAME

    def __init__(self, modulus):
        self.modulus = modulus
        self.n = modulus.n

    # group payloads are ints in [0, N): exponents of a fixed generator

    def g_identity(self):
        return 0

    def g_mul(self, a, b):
        return (a + b) % self.n

    def g_exp(self, a, k: int):
        return a * k % self.n

    def g_eq(self, a, b):
        return a == b

    def gt_identity(self):
        return 0

    def gt_mul(self, a, b):
        return (a + b) % self.n

    def gt_exp(self, a, k: int):
        return a * k % self.n

    def gt_inv(self, a):
        return -a % self.n

    def gt_eq(self, a, b):
        return a == b

    def pair(self, a, b):
        return a * b % self.n

    def sample_subgroup(self, index: int, rng):
        p = (self.modulus.p1, self.modulus.p2, self.modulus.p3)[index - 1]
        step = self.n // p
        while True:
            r = rng.randrange(p)
            if r != 0:
                return step * r % self.n

    def sample_full(self, rng):
        # order exactly N <=> exponent is a unit
        mod = self.modulus
        while True:
            e = rng.randrange(1, self.n)
            if e % mod.p1 and e % mod.p2 and e % mod.p3:
                return e

    def random_gt(self, rng):
        return rng.randrange(self.n)

    # serialization: fixed-width big-endian exponent

    def g_width(self) -> int:
        return byte_width(self.n)

    def gt_width(self) -> int:
        return byte_width(self.n)

    def ser_g(self, a) -> bytes:
        return encode_int(a, self.g_width())

    def deser_g(self, data: bytes):
        if len(data) != self.g_width():
            raise ValueError(f"group element must be {self.g_width()} bytes, got {len(data)}")
        value = decode_int(data)
        if value >= self.n:
            raise ValueError("exponent out of range (non-canonical encoding)")
        return value

    def ser_gt(self, a) -> bytes:
        return encode_int(a, self.gt_width())

    def deser_gt(self, data: bytes):
        if len(data) != self.gt_width():
            raise ValueError(f"target element must be {self.gt_width()} bytes, got {len(data)}")
        value = decode_int(data)
        if value >= self.n:
            raise ValueError("exponent out of range (non-canonical encoding)")
        return value
