"""Supersingular-curve backend: y^2 = x^3 + x over F_q with q = 3 mod 4.

The curve group E(F_q) is cyclic of order q + 1 = cofactor * N, so the
order-N subgroup realizes the composite-order group. The pairing is the
reduced Tate pairing with the distortion map (x, y) -> (-x, i*y) into
E(F_q^2), i^2 = -1, which turns it into a symmetric pairing on the
subgroup. The Miller loop is plain double-and-add over the bits of N
with numerator and denominator accumulated separately; the final
exponentiation uses (q^2 - 1)/N = (q - 1) * cofactor, where the q - 1
power is one conjugation and one inversion.
"""

from __future__ import annotations

from ..algebra import byte_width, decode_int, encode_int

BACKEND_ID = 0x02
NAME = "curve"


class Fq2:
    """F_q[i] / (i^2 + 1); valid because q = 3 mod 4 keeps -1 a non-square."""

    __slots__ = ("a", "b", "q")

    def __init__(self, a: int, b: int, q: int):
        self.a = a % q
        self.b = b % q
        self.q = q

    def mul(self, other: "Fq2") -> "Fq2":
        q = self.q
        return Fq2(
            (self.a * other.a - self.b * other.b) % q,
            (self.a * other.b + self.b * other.a) % q,
            q,
        )

    def inv(self) -> "Fq2":
        q = self.q
        norm = (self.a * self.a + self.b * self.b) % q
        n_inv = pow(norm, -1, q)
        return Fq2(self.a * n_inv % q, -self.b * n_inv % q, q)

    def conj(self) -> "Fq2":
        return Fq2(self.a, -self.b, self.q)

    def pow(self, k: int) -> "Fq2":
        if k < 0:
            return self.inv().pow(-k)
        result = Fq2(1, 0, self.q)
        base = self
        while k:
            if k & 1:
                result = result.mul(base)
            base = base.mul(base)
            k >>= 1
        return result

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_one(self) -> bool:
        return self.a == 1 and self.b == 0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Fq2)
            and self.q == other.q
            and self.a == other.a
            and self.b == other.b
        )

    def __hash__(self):
        return hash((self.a, self.b, self.q))

    def __repr__(self):
        return f"Fq2({self.a}, {self.b})"


Point = tuple[int, int] | None


def on_curve(point: Point, q: int) -> bool:
    if point is None:
        return True
    x, y = point
    return y * y % q == (x * x * x + x) % q


def pt_neg(point: Point, q: int) -> Point:
    if point is None:
        return None
    x, y = point
    return (x, -y % q)


def pt_add(p1: Point, p2: Point, q: int) -> Point:
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    x1, y1 = p1
    x2, y2 = p2
    if x1 == x2:
        if (y1 + y2) % q == 0:
            return None
        m = (3 * x1 * x1 + 1) * pow(2 * y1, -1, q) % q
    else:
        m = (y2 - y1) * pow(x2 - x1, -1, q) % q
    x3 = (m * m - x1 - x2) % q
    y3 = (m * (x1 - x3) - y1) % q
    return (x3, y3)


def pt_mul(point: Point, k: int, q: int) -> Point:
    if point is None or k == 0:
        return None
    if k < 0:
        return pt_mul(pt_neg(point, q), -k, q)
    acc: Point = None
    addend = point
    while k:
        if k & 1:
            acc = pt_add(acc, addend, q)
        addend = pt_add(addend, addend, q)
        k >>= 1
    return acc


def _dbl_step(t: Point, xq: int, yq: int, q: int):
    """Tangent line at t evaluated at the distorted point, plus 2t.

    The distorted evaluation point is (-xq, i*yq), so a line with slope
    m through (x, y) evaluates to (m*(-xq - x) + y) - i*yq and a
    vertical at x evaluates to (-xq - x) + 0i.
    """
    x, y = t
    if y == 0:
        return Fq2(-xq - x, 0, q), None
    m = (3 * x * x + 1) * pow(2 * y, -1, q) % q
    x3 = (m * m - 2 * x) % q
    y3 = (m * (x - x3) - y) % q
    line = Fq2(m * (-xq - x) + y, -yq, q)
    return line, (x3, y3)


def _add_step(t: Point, p: Point, xq: int, yq: int, q: int):
    x1, y1 = t
    x2, y2 = p
    if x1 == x2:
        if (y1 + y2) % q == 0:
            return Fq2(-xq - x1, 0, q), None
        return _dbl_step(t, xq, yq, q)
    m = (y2 - y1) * pow(x2 - x1, -1, q) % q
    x3 = (m * m - x1 - x2) % q
    y3 = (m * (x1 - x3) - y1) % q
    line = Fq2(m * (-xq - x1) + y1, -yq, q)
    return line, (x3, y3)


def _vertical(t: Point, xq: int, q: int) -> Fq2:
    if t is None:
        return Fq2(1, 0, q)
    return Fq2(-xq - t[0], 0, q)


def miller(p: Point, xq: int, yq: int, order: int, q: int) -> Fq2:
    """f_{order,p} evaluated at the distorted image of (xq, yq)."""
    f_num = Fq2(1, 0, q)
    f_den = Fq2(1, 0, q)
    t: Point = p
    for i in range(order.bit_length() - 2, -1, -1):
        f_num = f_num.mul(f_num)
        f_den = f_den.mul(f_den)
        if t is not None:
            line, t2 = _dbl_step(t, xq, yq, q)
            f_num = f_num.mul(line)
            f_den = f_den.mul(_vertical(t2, xq, q))
            t = t2
        if (order >> i) & 1:
            if t is None:
                # line through O and p cancels against the vertical at p
                t = p
            else:
                line, t1 = _add_step(t, p, xq, yq, q)
                f_num = f_num.mul(line)
                f_den = f_den.mul(_vertical(t1, xq, q))
                t = t1
    if f_num.is_zero() or f_den.is_zero():
        raise ArithmeticError("degenerate pairing evaluation (coordinate collision)")
    return f_num.mul(f_den.inv())


class CurveBackend:
    id = BACKEND_ID
    name = NAME

    def __init__(self, modulus, q: int, cofactor: int):
        if q % 4 != 3:
            raise ValueError("field prime must be 3 mod 4")
        if (q + 1) % modulus.n != 0 or (q + 1) // modulus.n != cofactor:
            raise ValueError("group order q + 1 must equal cofactor * N")
        self.modulus = modulus
        self.n = modulus.n
        self.q = q
        self.cofactor = cofactor
        self._sqrt_exp = (q + 1) // 4

    # G payloads: affine points or None; GT payloads: Fq2 values

    def g_identity(self):
        return None

    def g_mul(self, a, b):
        return pt_add(a, b, self.q)

    def g_exp(self, a, k: int):
        return pt_mul(a, k % self.n, self.q)

    def g_eq(self, a, b):
        return a == b

    def gt_identity(self):
        return Fq2(1, 0, self.q)

    def gt_mul(self, a: Fq2, b: Fq2):
        return a.mul(b)

    def gt_exp(self, a: Fq2, k: int):
        return a.pow(k % self.n)

    def gt_inv(self, a: Fq2):
        return a.inv()

    def gt_eq(self, a, b):
        return a == b

    def pair(self, a, b):
        if a is None or b is None:
            return self.gt_identity()
        xq, yq = b
        f = miller(a, xq, yq, self.n, self.q)
        reduced = f.conj().mul(f.inv())  # f^(q-1)
        return reduced.pow(self.cofactor)

    def _random_point(self, rng):
        q = self.q
        while True:
            x = rng.randrange(q)
            t = (x * x * x + x) % q
            y = pow(t, self._sqrt_exp, q)
            if y * y % q != t:
                continue
            if y and rng.randrange(2):
                y = q - y
            return (x, y)

    def sample_subgroup(self, index: int, rng):
        p = (self.modulus.p1, self.modulus.p2, self.modulus.p3)[index - 1]
        k = self.cofactor * (self.n // p)
        while True:
            u = pt_mul(self._random_point(rng), k, self.q)
            if u is not None:
                return u

    def sample_full(self, rng):
        while True:
            h = pt_mul(self._random_point(rng), self.cofactor, self.q)
            if h is None:
                continue
            if all(
                pt_mul(h, self.n // p, self.q) is not None
                for p in (self.modulus.p1, self.modulus.p2, self.modulus.p3)
            ):
                return h

    def random_gt(self, rng):
        q = self.q
        while True:
            v = Fq2(rng.randrange(q), rng.randrange(q), q)
            if v.is_zero():
                continue
            reduced = v.conj().mul(v.inv())
            return reduced.pow(self.cofactor)

    # serialization

    def g_width(self) -> int:
        return 1 + 2 * byte_width(self.q)

    def gt_width(self) -> int:
        return 2 * byte_width(self.q)

    def ser_g(self, a) -> bytes:
        w = byte_width(self.q)
        if a is None:
            return b"\x00" + bytes(2 * w)
        x, y = a
        return b"\x04" + encode_int(x, w) + encode_int(y, w)

    def deser_g(self, data: bytes):
        w = byte_width(self.q)
        if len(data) != 1 + 2 * w:
            raise ValueError(f"point encoding must be {1 + 2 * w} bytes, got {len(data)}")
        flag, body = data[0], data[1:]
        if flag == 0x00:
            if any(body):
                raise ValueError("non-canonical point-at-infinity encoding")
            return None
        if flag != 0x04:
            raise ValueError(f"unknown point encoding flag {flag:#x}")
        x = decode_int(body[:w])
        y = decode_int(body[w:])
        if x >= self.q or y >= self.q:
            raise ValueError("point coordinate out of field range")
        point = (x, y)
        if not on_curve(point, self.q):
            raise ValueError("point is not on the curve")
        if pt_mul(point, self.n, self.q) is not None:
            raise ValueError("point is not in the order-N subgroup")
        return point

    def ser_gt(self, a: Fq2) -> bytes:
        w = byte_width(self.q)
        return encode_int(a.a, w) + encode_int(a.b, w)

    def deser_gt(self, data: bytes):
        w = byte_width(self.q)
        if len(data) != 2 * w:
            raise ValueError(f"target encoding must be {2 * w} bytes, got {len(data)}")
        a = decode_int(data[:w])
        b = decode_int(data[w:])
        if a >= self.q or b >= self.q:
            raise ValueError("target coordinate out of field range")
        value = Fq2(a, b, self.q)
        if value.is_zero():
            raise ValueError("zero is not a group element")
        if not value.pow(self.n).is_one():
            raise ValueError("value is not in the order-N target subgroup")
        return value
