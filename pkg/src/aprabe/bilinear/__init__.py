"""Backend-neutral composite-order bilinear group.

Two interchangeable backends sit behind one element/operation surface:
an exact exponent-space backend for oracle testing and a supersingular
Tate-pairing backend over a real curve. Exponentiations and pairings
are counted per params object so complexity claims can be measured.

Both backends run at desk-scale parameter sizes and exist for
correctness work; neither is hardened for production use.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Optional

from ..algebra import FactoredModulus, Scalar, is_probable_prime, random_prime
from . import curve as _curve
from . import debugback as _debug

DEBUG = _debug.NAME
CURVE = _curve.NAME

_BACKEND_IDS = {_debug.BACKEND_ID: DEBUG, _curve.BACKEND_ID: CURVE}

DEFAULT_PRIME_BITS = {DEBUG: 32, CURVE: 80}

_COFACTOR_BUDGET = 400_000


class OpCounters:
    """Monotone exponentiation/pairing counters; increments are atomic."""

    def __init__(self):
        self._lock = threading.Lock()
        self.exponentiations = 0
        self.pairings = 0

    def add_exp(self):
        with self._lock:
            self.exponentiations += 1

    def add_pairing(self):
        with self._lock:
            self.pairings += 1

    def snapshot(self) -> tuple[int, int]:
        with self._lock:
            return (self.exponentiations, self.pairings)

    def reset(self):
        with self._lock:
            self.exponentiations = 0
            self.pairings = 0


@dataclass
class BilinearParams:
    modulus: FactoredModulus
    backend: object
    q: Optional[int] = None
    cofactor: Optional[int] = None
    counters: OpCounters = field(default_factory=OpCounters)

    @property
    def backend_id(self) -> int:
        return self.backend.id

    @property
    def backend_name(self) -> str:
        return self.backend.name

    def compatible(self, other: "BilinearParams") -> bool:
        return (
            self.backend_id == other.backend_id
            and self.modulus == other.modulus
            and self.q == other.q
            and self.cofactor == other.cofactor
        )


def _check_same_group(a, b):
    if not a.params.compatible(b.params):
        raise ValueError("elements belong to different group parameters")


@dataclass(frozen=True, eq=False)
class GElement:
    params: BilinearParams
    data: object

    def __eq__(self, other) -> bool:
        if not isinstance(other, GElement):
            return NotImplemented
        return self.params.compatible(other.params) and self.params.backend.g_eq(
            self.data, other.data
        )

    def __hash__(self):
        raise TypeError("group elements are not hashable")


@dataclass(frozen=True, eq=False)
class GTElement:
    params: BilinearParams
    data: object

    def __eq__(self, other) -> bool:
        if not isinstance(other, GTElement):
            return NotImplemented
        return self.params.compatible(other.params) and self.params.backend.gt_eq(
            self.data, other.data
        )

    def __hash__(self):
        raise TypeError("group elements are not hashable")


def gen_params(prime_bits: int, backend_name: str, rng) -> BilinearParams:
    """Generate a fresh three-prime group of the requested size.

    The curve backend additionally searches for a cofactor c (multiple
    of 4, coprime to N) making q = c*N - 1 a prime with q = 3 mod 4;
    the search is bounded and reports exhaustion so callers can retry
    with fresh primes.
    """
    if prime_bits < 16:
        raise ValueError("prime_bits must be at least 16")
    primes: list[int] = []
    while len(primes) < 3:
        p = random_prime(rng, prime_bits)
        if p not in primes:
            primes.append(p)
    p1, p2, p3 = primes
    modulus = FactoredModulus(p1 * p2 * p3, p1, p2, p3)

    if backend_name == DEBUG:
        return BilinearParams(modulus, _debug.DebugBackend(modulus))
    if backend_name == CURVE:
        n = modulus.n
        # q = c*N - 1 = 3 mod 4 forces 4 | c because N is odd
        for c in range(4, _COFACTOR_BUDGET, 4):
            if math.gcd(c, n) != 1:
                continue
            q = c * n - 1
            if is_probable_prime(q):
                return BilinearParams(
                    modulus, _curve.CurveBackend(modulus, q, c), q=q, cofactor=c
                )
        raise RuntimeError(
            "cofactor search exhausted; retry with a fresh rng state"
        )
    raise ValueError(f"unknown backend {backend_name!r}")


def params_from_values(
    backend_name: str, modulus: FactoredModulus, q: Optional[int] = None, cofactor: Optional[int] = None
) -> BilinearParams:
    """Rebuild params from stored values (used when loading artifacts)."""
    if backend_name == DEBUG:
        return BilinearParams(modulus, _debug.DebugBackend(modulus))
    if backend_name == CURVE:
        if q is None or cofactor is None:
            raise ValueError("curve params need q and cofactor")
        return BilinearParams(modulus, _curve.CurveBackend(modulus, q, cofactor), q=q, cofactor=cofactor)
    raise ValueError(f"unknown backend {backend_name!r}")


def backend_name_for_id(backend_id: int) -> str:
    try:
        return _BACKEND_IDS[backend_id]
    except KeyError:
        raise ValueError(f"unknown backend id {backend_id:#x}") from None


def _as_int(k) -> int:
    return k.value if isinstance(k, Scalar) else int(k)


def identity(params: BilinearParams) -> GElement:
    return GElement(params, params.backend.g_identity())


def gt_identity(params: BilinearParams) -> GTElement:
    return GTElement(params, params.backend.gt_identity())


def mul(a: GElement, b: GElement) -> GElement:
    _check_same_group(a, b)
    return GElement(a.params, a.params.backend.g_mul(a.data, b.data))


def exp(a: GElement, k) -> GElement:
    a.params.counters.add_exp()
    return GElement(a.params, a.params.backend.g_exp(a.data, _as_int(k) % a.params.modulus.n))


def eq(a: GElement, b: GElement) -> bool:
    return a == b


def pair(a: GElement, b: GElement) -> GTElement:
    _check_same_group(a, b)
    a.params.counters.add_pairing()
    return GTElement(a.params, a.params.backend.pair(a.data, b.data))


def gt_mul(a: GTElement, b: GTElement) -> GTElement:
    _check_same_group(a, b)
    return GTElement(a.params, a.params.backend.gt_mul(a.data, b.data))


def gt_exp(a: GTElement, k) -> GTElement:
    a.params.counters.add_exp()
    return GTElement(a.params, a.params.backend.gt_exp(a.data, _as_int(k) % a.params.modulus.n))


def gt_inv(a: GTElement) -> GTElement:
    return GTElement(a.params, a.params.backend.gt_inv(a.data))


def subgroup_generator(params: BilinearParams, index: int, rng) -> GElement:
    """Uniform non-identity element of the order-p_index subgroup."""
    if index not in (1, 2, 3):
        raise ValueError("subgroup index must be 1, 2 or 3")
    return GElement(params, params.backend.sample_subgroup(index, rng))


def full_generator(params: BilinearParams, rng) -> GElement:
    """Element of order exactly N (generator of the whole source group)."""
    return GElement(params, params.backend.sample_full(rng))


def random_gt(params: BilinearParams, rng) -> GTElement:
    """Uniform element of the order-N target group (the message space)."""
    return GTElement(params, params.backend.random_gt(rng))


def serialize(element) -> bytes:
    if isinstance(element, GElement):
        return element.params.backend.ser_g(element.data)
    if isinstance(element, GTElement):
        return element.params.backend.ser_gt(element.data)
    raise TypeError(f"cannot serialize {type(element).__name__}")


def deserialize_g(params: BilinearParams, data: bytes) -> GElement:
    return GElement(params, params.backend.deser_g(data))


def deserialize_gt(params: BilinearParams, data: bytes) -> GTElement:
    return GTElement(params, params.backend.deser_gt(data))


def op_counters(params: BilinearParams) -> tuple[int, int]:
    return params.counters.snapshot()


def reset_counters(params: BilinearParams) -> None:
    params.counters.reset()
