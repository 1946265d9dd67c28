import random

import pytest

from aprabe import bilinear
from aprabe.bilinear import (
    CURVE,
    DEBUG,
    deserialize_g,
    deserialize_gt,
    exp,
    full_generator,
    gen_params,
    gt_exp,
    gt_identity,
    gt_inv,
    gt_mul,
    identity,
    mul,
    op_counters,
    pair,
    random_gt,
    reset_counters,
    serialize,
    subgroup_generator,
)


def test_gen_params_shapes(rng):
    params = gen_params(16, DEBUG, rng)
    m = params.modulus
    assert m.n == m.p1 * m.p2 * m.p3
    assert len({m.p1, m.p2, m.p3}) == 3
    assert all(p.bit_length() == 16 for p in (m.p1, m.p2, m.p3))


def test_gen_params_deterministic_under_seed():
    a = gen_params(16, DEBUG, random.Random(4))
    b = gen_params(16, DEBUG, random.Random(4))
    assert a.modulus == b.modulus
    c = gen_params(16, CURVE, random.Random(4))
    d = gen_params(16, CURVE, random.Random(4))
    assert (c.modulus, c.q, c.cofactor) == (d.modulus, d.q, d.cofactor)


def test_curve_params_invariants(curve_params):
    import math

    p = curve_params
    assert p.q % 4 == 3
    assert (p.q + 1) % p.modulus.n == 0
    assert (p.q + 1) // p.modulus.n == p.cofactor
    assert math.gcd(p.cofactor, p.modulus.n) == 1


def test_gen_params_rejects_tiny_primes(rng):
    with pytest.raises(ValueError):
        gen_params(8, DEBUG, rng)
    with pytest.raises(ValueError):
        gen_params(32, "nonsense", rng)


def test_group_law_basics(any_params, rng):
    g = full_generator(any_params, rng)
    one = identity(any_params)
    assert exp(g, 0) == one
    assert mul(g, one) == g
    assert exp(exp(g, 2), 3) == exp(g, 6)
    n = any_params.modulus.n
    a = rng.randrange(n)
    assert mul(exp(g, a), exp(g, n - a)) == one


def test_debug_exponent_bookkeeping(debug_params, rng):
    g = full_generator(debug_params, rng)
    n = debug_params.modulus.n
    a, b = rng.randrange(n), rng.randrange(n)
    assert mul(exp(g, a), exp(g, b)).data == (g.data * a + g.data * b) % n
    assert exp(g, a).data == g.data * a % n
    assert pair(exp(g, a), exp(g, b)).data == (g.data * a) * (g.data * b) % n


def test_bilinearity(any_params, rng):
    g = full_generator(any_params, rng)
    egg = pair(g, g)
    n = any_params.modulus.n
    for _ in range(100):
        a, b = rng.randrange(n), rng.randrange(n)
        assert pair(exp(g, a), exp(g, b)) == gt_exp(egg, a * b)


def test_orthogonality(any_params, rng):
    one = gt_identity(any_params)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                continue
            for _ in range(5):
                u = subgroup_generator(any_params, i, rng)
                v = subgroup_generator(any_params, j, rng)
                assert pair(u, v) == one


def test_subgroup_orders(any_params, rng):
    primes = (any_params.modulus.p1, any_params.modulus.p2, any_params.modulus.p3)
    one = identity(any_params)
    for index, p in enumerate(primes, start=1):
        u = subgroup_generator(any_params, index, rng)
        assert u != one
        assert exp(u, p) == one


def test_non_degeneracy_at_divisors(any_params, rng):
    m = any_params.modulus
    g = full_generator(any_params, rng)
    egg = pair(g, g)
    one = gt_identity(any_params)
    divisors = [m.p1, m.p2, m.p3, m.p1 * m.p2, m.p1 * m.p3, m.p2 * m.p3, m.n]
    for k in divisors:
        assert (gt_exp(egg, k) == one) == (k == m.n)


def test_debug_subgroup_exponents_enumerable():
    # N = 3*5*7: subgroup-1 elements are the nonzero multiples of N/3
    from aprabe.algebra import FactoredModulus
    from aprabe.bilinear import params_from_values

    params = params_from_values(DEBUG, FactoredModulus(105, 3, 5, 7))
    seen = set()
    for seed in range(60):
        seen.add(subgroup_generator(params, 1, random.Random(seed)).data)
    assert seen == {35, 70}


def test_gt_group_law(any_params, rng):
    t = random_gt(any_params, rng)
    one = gt_identity(any_params)
    assert gt_mul(t, gt_inv(t)) == one
    assert gt_exp(t, 1) == t
    assert gt_exp(t, any_params.modulus.n) == one


def test_counters(any_params, rng):
    reset_counters(any_params)
    g = full_generator(any_params, rng)
    reset_counters(any_params)
    exp(g, 5)
    assert op_counters(any_params) == (1, 0)
    pair(g, g)
    pair(g, g)
    assert op_counters(any_params) == (1, 2)
    t = random_gt(any_params, rng)
    gt_exp(t, 3)
    assert op_counters(any_params) == (2, 2)
    gt_mul(t, t)
    mul(g, g)
    assert op_counters(any_params) == (2, 2)
    reset_counters(any_params)
    assert op_counters(any_params) == (0, 0)


def test_counter_increments_are_thread_safe(debug_params, rng):
    import threading

    g = full_generator(debug_params, rng)
    reset_counters(debug_params)

    def worker():
        for _ in range(500):
            exp(g, 3)

    threads = [threading.Thread(target=worker) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert op_counters(debug_params) == (4000, 0)
    reset_counters(debug_params)


def test_params_mismatch_rejected(debug_params, rng):
    other = gen_params(32, DEBUG, random.Random(999))
    a = full_generator(debug_params, rng)
    b = full_generator(other, rng)
    with pytest.raises(ValueError, match="different group"):
        mul(a, b)
    with pytest.raises(ValueError, match="different group"):
        pair(a, b)


def test_serialization_roundtrip(any_params, rng):
    g = full_generator(any_params, rng)
    for _ in range(100):
        x = exp(g, rng.randrange(any_params.modulus.n))
        assert deserialize_g(any_params, serialize(x)) == x
    for _ in range(100):
        t = random_gt(any_params, rng)
        assert deserialize_gt(any_params, serialize(t)) == t
    assert deserialize_g(any_params, serialize(identity(any_params))) == identity(any_params)


def test_serialization_rejects_bad_lengths(any_params, rng):
    g = full_generator(any_params, rng)
    data = serialize(g)
    with pytest.raises(ValueError):
        deserialize_g(any_params, data[:-1])
    with pytest.raises(ValueError):
        deserialize_g(any_params, data + b"\x00")
    t = random_gt(any_params, rng)
    with pytest.raises(ValueError):
        deserialize_gt(any_params, serialize(t)[:-1])


def test_curve_rejects_tampered_points(curve_params):
    rng = random.Random(8)
    g = full_generator(curve_params, rng)
    data = bytearray(serialize(g))
    rejected = 0
    for _ in range(20):
        corrupted = bytearray(data)
        bit = rng.randrange(8, len(data) * 8)  # leave the flag byte alone
        corrupted[bit // 8] ^= 1 << (bit % 8)
        try:
            deserialize_g(curve_params, bytes(corrupted))
        except ValueError:
            rejected += 1
    assert rejected == 20


def test_curve_rejects_non_subgroup_point(curve_params):
    # a point of full order q+1 is on the curve but outside the order-N subgroup
    from aprabe.bilinear.curve import on_curve, pt_mul

    backend = curve_params.backend
    rng = random.Random(11)
    while True:
        point = backend._random_point(rng)
        if pt_mul(point, curve_params.modulus.n, curve_params.q) is not None:
            break
    assert on_curve(point, curve_params.q)
    encoded = backend.ser_g(point)
    with pytest.raises(ValueError, match="subgroup"):
        deserialize_g(curve_params, encoded)


def test_debug_rejects_out_of_range_exponent(debug_params):
    width = debug_params.backend.g_width()
    too_big = (debug_params.modulus.n).to_bytes(width, "big")
    with pytest.raises(ValueError, match="range"):
        deserialize_g(debug_params, too_big)


def test_backend_projection_debug(debug_params, rng):
    # honest subgroup-1 and subgroup-3 samples have exponent 0 mod p2
    p2 = debug_params.modulus.p2
    for index in (1, 3):
        u = subgroup_generator(debug_params, index, rng)
        assert u.data % p2 == 0
    w = subgroup_generator(debug_params, 2, rng)
    assert w.data % p2 != 0
