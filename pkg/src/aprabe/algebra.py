"""Exact arithmetic over the ring Z_N for composite N.

Everything downstream (shares, reconstruction coefficients, exponents)
lives in Z_N where N = p1*p2*p3 is a product of three distinct primes.
Because Z_N has zero divisors, the linear solver only ever divides by
unit pivots and reports the offending gcd when it cannot.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

MR_ROUNDS = 64


class NonUnitPivot(ArithmeticError):
    """Gaussian elimination hit a zero divisor of N.

    Carries the gcd found so the caller can tell which prime factor was
    shared; callers that built the matrix from randomness retry with
    fresh randomness.
    """

    def __init__(self, divisor: int):
        super().__init__(f"non-unit pivot, gcd with modulus = {divisor}")
        self.divisor = divisor


def is_probable_prime(n: int) -> bool:
    """Miller-Rabin with MR_ROUNDS rounds.

    Witnesses come from a generator seeded by the candidate itself, so
    the verdict for a given n is reproducible across runs.
    """
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witness_rng = random.Random(n)
    for _ in range(MR_ROUNDS):
        a = witness_rng.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(rng: random.Random, bits: int) -> int:
    """Random probable prime with exactly `bits` bits."""
    if bits < 2:
        raise ValueError("need at least 2 bits")
    while True:
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate):
            return candidate


@dataclass(frozen=True)
class FactoredModulus:
    """N = p1*p2*p3 with the factorization kept alongside."""

    n: int
    p1: int
    p2: int
    p3: int

    def __post_init__(self):
        primes = (self.p1, self.p2, self.p3)
        if len(set(primes)) != 3:
            raise ValueError("prime factors must be pairwise distinct")
        for p in primes:
            if not is_probable_prime(p):
                raise ValueError(f"{p} is not prime")
        if self.p1 * self.p2 * self.p3 != self.n:
            raise ValueError("n must equal p1*p2*p3")

    @property
    def byte_width(self) -> int:
        return byte_width(self.n)


def byte_width(n: int) -> int:
    return (n.bit_length() + 7) // 8


def encode_int(value: int, width: int) -> bytes:
    """Canonical integer encoding: big-endian, fixed width, unsigned."""
    return value.to_bytes(width, "big")


def decode_int(data: bytes) -> int:
    return int.from_bytes(data, "big")


def _mod_of(modulus) -> int:
    return modulus.n if isinstance(modulus, FactoredModulus) else int(modulus)


@dataclass(frozen=True)
class Scalar:
    """A residue in Z_N, reduced eagerly so equality is representation equality."""

    value: int
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "modulus", _mod_of(self.modulus))
        object.__setattr__(self, "value", self.value % self.modulus)

    def _lift(self, other) -> "Scalar":
        if isinstance(other, Scalar):
            if other.modulus != self.modulus:
                raise ValueError("modulus mismatch")
            return other
        return Scalar(int(other), self.modulus)

    def __add__(self, other):
        o = self._lift(other)
        return Scalar(self.value + o.value, self.modulus)

    def __sub__(self, other):
        o = self._lift(other)
        return Scalar(self.value - o.value, self.modulus)

    def __mul__(self, other):
        o = self._lift(other)
        return Scalar(self.value * o.value, self.modulus)

    __radd__ = __add__
    __rmul__ = __mul__

    def __neg__(self):
        return Scalar(-self.value, self.modulus)

    def is_unit(self) -> bool:
        return math.gcd(self.value, self.modulus) == 1

    def inverse(self) -> "Scalar":
        g = math.gcd(self.value, self.modulus)
        if g != 1:
            raise NonUnitPivot(g)
        return Scalar(pow(self.value, -1, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value


def random_scalar(rng: random.Random, modulus) -> Scalar:
    n = _mod_of(modulus)
    return Scalar(rng.randrange(n), n)


def random_unit(rng: random.Random, modulus) -> Scalar:
    """Uniform residue coprime to N, by rejection."""
    n = _mod_of(modulus)
    while True:
        v = rng.randrange(n)
        if math.gcd(v, n) == 1:
            return Scalar(v, n)


@dataclass(frozen=True)
class MatrixZN:
    """An l x n matrix with entries reduced mod N."""

    entries: tuple[tuple[int, ...], ...]
    modulus: int

    def __post_init__(self):
        object.__setattr__(self, "modulus", _mod_of(self.modulus))
        if not self.entries or not self.entries[0]:
            raise ValueError("matrix must have at least one row and column")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("ragged matrix")
        reduced = tuple(
            tuple(e % self.modulus for e in row) for row in self.entries
        )
        object.__setattr__(self, "entries", reduced)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], modulus) -> "MatrixZN":
        return cls(tuple(tuple(int(e) for e in row) for row in rows), modulus)

    @property
    def l(self) -> int:
        return len(self.entries)

    @property
    def n(self) -> int:
        return len(self.entries[0])

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]


@dataclass(frozen=True)
class ShareVector:
    """Secret-bearing column vector: the secret first, then random filler."""

    values: tuple[Scalar, ...]

    @classmethod
    def fresh(cls, secret: Scalar, n: int, rng: random.Random) -> "ShareVector":
        if n < 1:
            raise ValueError("share vector needs at least one coordinate")
        tail = tuple(random_scalar(rng, secret.modulus) for _ in range(n - 1))
        return cls((secret,) + tail)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def secret(self) -> Scalar:
        return self.values[0]


def mat_vec_mul(matrix: MatrixZN, vector) -> list[Scalar]:
    """Row-by-row dot products: the shares A_i . v."""
    values = vector.values if isinstance(vector, ShareVector) else tuple(vector)
    if matrix.n != len(values):
        raise ValueError(f"dimension mismatch: {matrix.n} cols vs {len(values)} entries")
    n = matrix.modulus
    ints = [int(v) for v in values]
    return [
        Scalar(sum(e * x for e, x in zip(row, ints)), n)
        for row in matrix.entries
    ]


def solve_target(rows: Sequence[Sequence[int]], target: Sequence[int], modulus) -> list[Scalar] | None:
    """Find coefficients w with sum(w_i * rows[i]) = target mod N.

    Returns None when the target is outside the row span. Uses
    Gauss-Jordan elimination where every pivot must be a unit of Z_N;
    a column whose only nonzero entries share a factor with N raises
    NonUnitPivot. Free coefficients are fixed to zero, and the result
    is re-checked by substitution before it is returned.
    """
    n_mod = _mod_of(modulus)
    m = len(rows)
    width = len(target)
    if any(len(r) != width for r in rows):
        raise ValueError("row length does not match target length")

    # Equations indexed by coordinate: column j of `aug` is the unknown w_j.
    aug = [[int(rows[j][c]) % n_mod for j in range(m)] + [int(target[c]) % n_mod]
           for c in range(width)]

    pivot_cols: list[tuple[int, int]] = []
    cur = 0
    for col in range(m):
        found = None
        stuck_gcd = None
        for r in range(cur, width):
            e = aug[r][col]
            if e == 0:
                continue
            g = math.gcd(e, n_mod)
            if g == 1:
                found = r
                break
            stuck_gcd = g
        if found is None:
            if stuck_gcd is not None:
                raise NonUnitPivot(stuck_gcd)
            continue
        aug[cur], aug[found] = aug[found], aug[cur]
        inv = pow(aug[cur][col], -1, n_mod)
        aug[cur] = [(e * inv) % n_mod for e in aug[cur]]
        for r in range(width):
            if r != cur and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [(a - factor * b) % n_mod for a, b in zip(aug[r], aug[cur])]
        pivot_cols.append((cur, col))
        cur += 1
        if cur == width:
            break

    # Rows below the last pivot have all-zero coefficient parts (pivoted
    # columns were eliminated, skipped columns were zero there already),
    # so a nonzero right-hand side means the system is inconsistent.
    for r in range(cur, width):
        if aug[r][m] != 0:
            return None

    omega = [0] * m
    for r, col in pivot_cols:
        omega[col] = aug[r][m]

    for c in range(width):
        acc = sum(omega[j] * int(rows[j][c]) for j in range(m)) % n_mod
        if acc != int(target[c]) % n_mod:
            return None
    return [Scalar(w, n_mod) for w in omega]
