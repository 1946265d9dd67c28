"""The five scheme algorithms (setup, encrypt, keygen, delegate, decrypt)
plus a KEM/DEM wrapper that seals byte payloads under an attribute set.

Keys live in the order-p1 subgroup randomized by order-p3 components;
decryption cancels the p3 parts through subgroup orthogonality. The
delegation algorithm rescales a parent row's share by a fresh unit and
re-randomizes every component, so a redefined policy gets functional
shares without the delegator ever seeing the master secret.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305

from . import bilinear
from .algebra import Scalar, ShareVector, mat_vec_mul, random_scalar, random_unit
from .attrspace import EMPTY, AttributeMatrix, AttributeSet, AttributeVector, encode_attr
from .bilinear import BilinearParams, GElement, GTElement
from .lsss import AccessStructure, ChildSpec, NotAuthorized, check_delegation, derive_child, reconstruction

NONCE_LEN = 12


@dataclass(frozen=True)
class PublicKey:
    matrix: AttributeMatrix
    params: BilinearParams
    g: GElement
    x3: GElement
    v: tuple[GElement, ...]
    h: tuple[GElement, ...]
    e_gg_alpha: GTElement

    @property
    def max_depth(self) -> int:
        return len(self.h)

    @property
    def matrix_fp(self) -> bytes:
        return self.matrix.fingerprint()


@dataclass(frozen=True)
class MasterSecretKey:
    alpha: Scalar
    matrix_fp: bytes


@dataclass(frozen=True)
class KeyRow:
    """Components for one labeled matrix row: k0, k1, k2 plus the spare
    per-level slots consumed one by one as the key is delegated deeper."""

    k0: GElement
    k1: GElement
    k2: GElement
    tail: tuple[GElement, ...]


@dataclass(frozen=True)
class SecretKey:
    structure: AccessStructure
    rows: tuple[KeyRow, ...]
    matrix_fp: bytes

    @property
    def depth(self) -> int:
        return self.structure.depth

    @property
    def max_depth(self) -> int:
        return self.depth + len(self.rows[0].tail)


@dataclass(frozen=True)
class Ciphertext:
    attrs: AttributeSet
    c: GTElement
    e: GElement
    pairs: tuple[tuple[GElement, GElement], ...]
    matrix_fp: bytes
    payload: bytes = b""

    @property
    def depth(self) -> int:
        return self.attrs.depth


def _validate_vector(matrix: AttributeMatrix, vector: AttributeVector) -> None:
    if vector.depth > matrix.depth:
        raise ValueError(f"vector depth {vector.depth} exceeds matrix depth {matrix.depth}")
    for level, (column, name) in enumerate(vector.entries, start=1):
        if matrix.column_of(level, name) != column:
            raise ValueError(f"{name!r} does not sit at level {level} column {column}")
    if vector.first_column == 0:
        raise ValueError(
            "vector may not start with the empty attribute: no column element exists for it"
        )


def _hash_chain(pk: PublicKey, vector: AttributeVector, depth: int | None = None) -> GElement:
    """The per-vector product h_1^u_1 * ... * h_k^u_k, recomputed on
    every use so operation counts stay an exact function of the sizes."""
    n = pk.params.modulus.n
    depth = vector.depth if depth is None else depth
    acc = bilinear.identity(pk.params)
    for level in range(1, depth + 1):
        u = encode_attr(vector.name_at(level), level, n)
        acc = bilinear.mul(acc, bilinear.exp(pk.h[level - 1], u))
    return acc


def _fresh_g3(pk: PublicKey, rng) -> GElement:
    return bilinear.exp(pk.x3, random_scalar(rng, pk.params.modulus.n))


def setup(matrix: AttributeMatrix, params: BilinearParams, rng) -> tuple[PublicKey, MasterSecretKey]:
    """Sample the public key over `matrix` and the master secret."""
    n = params.modulus.n
    g = bilinear.subgroup_generator(params, 1, rng)
    x3 = bilinear.subgroup_generator(params, 3, rng)
    v = tuple(bilinear.exp(g, random_scalar(rng, n)) for _ in range(matrix.width))
    h = tuple(bilinear.exp(g, random_scalar(rng, n)) for _ in range(matrix.depth))
    while True:
        alpha = random_scalar(rng, n)
        e_gg_alpha = bilinear.gt_exp(bilinear.pair(g, g), alpha)
        if e_gg_alpha != bilinear.gt_identity(params):
            break
    pk = PublicKey(matrix=matrix, params=params, g=g, x3=x3, v=v, h=h, e_gg_alpha=e_gg_alpha)
    return pk, MasterSecretKey(alpha=alpha, matrix_fp=matrix.fingerprint())


def encrypt(
    pk: PublicKey, attrs: AttributeSet, message: GTElement, rng, trace: dict | None = None
) -> Ciphertext:
    """Encrypt a target-group message under a set of attribute vectors."""
    k = attrs.depth
    if k > pk.max_depth:
        raise ValueError(f"attribute depth {k} exceeds system depth {pk.max_depth}")
    for vector in attrs:
        _validate_vector(pk.matrix, vector)
    n = pk.params.modulus.n
    s = random_scalar(rng, n)
    c = bilinear.gt_mul(message, bilinear.gt_exp(pk.e_gg_alpha, s))
    e = bilinear.exp(pk.g, s)
    pairs = []
    ts = []
    for vector in attrs:
        t = random_scalar(rng, n)
        ts.append(t)
        st = s * t
        c0 = bilinear.mul(
            bilinear.exp(pk.v[vector.first_column - 1], s),
            bilinear.exp(_hash_chain(pk, vector), st),
        )
        c1 = bilinear.exp(pk.g, st)
        pairs.append((c0, c1))
    if trace is not None:
        trace["s"] = s
        trace["t"] = ts
    return Ciphertext(attrs=attrs, c=c, e=e, pairs=tuple(pairs), matrix_fp=pk.matrix_fp)


def keygen(
    pk: PublicKey,
    msk: MasterSecretKey,
    structure: AccessStructure,
    rng,
    trace: dict | None = None,
) -> SecretKey:
    """Build a key for a compiled or delegated access structure.

    The master secret is shared across the structure rows; each row is
    blinded with its own exponent and fresh order-p3 randomizers.
    """
    k = structure.depth
    big_l = pk.max_depth
    if k > big_l:
        raise ValueError(f"structure depth {k} exceeds system depth {big_l}")
    for vector in structure.rho:
        _validate_vector(pk.matrix, vector)
    n = pk.params.modulus.n
    alpha_vec = ShareVector.fresh(msk.alpha, structure.cols, rng)
    shares = mat_vec_mul(structure.matrix, alpha_vec)
    rows = []
    rs = []
    for i in range(structure.rows):
        vector = structure.rho[i]
        r = random_scalar(rng, n)
        rs.append(r)
        k0 = bilinear.mul(
            bilinear.mul(
                bilinear.exp(pk.g, shares[i]),
                bilinear.exp(pk.v[vector.first_column - 1], r),
            ),
            _fresh_g3(pk, rng),
        )
        k1 = bilinear.mul(bilinear.exp(pk.g, r), _fresh_g3(pk, rng))
        k2 = bilinear.mul(bilinear.exp(_hash_chain(pk, vector), r), _fresh_g3(pk, rng))
        tail = tuple(
            bilinear.mul(bilinear.exp(pk.h[level - 1], r), _fresh_g3(pk, rng))
            for level in range(k + 1, big_l + 1)
        )
        rows.append(KeyRow(k0=k0, k1=k1, k2=k2, tail=tail))
    if trace is not None:
        trace["alpha_vec"] = alpha_vec
        trace["shares"] = shares
        trace["r"] = rs
    return SecretKey(structure=structure, rows=tuple(rows), matrix_fp=pk.matrix_fp)


def delegate(
    pk: PublicKey, sk: SecretKey, spec: ChildSpec, rng, trace: dict | None = None
) -> SecretKey:
    """Redefine the key's policy one level deeper and derive a child key.

    Each child row takes a parent row raised to a fresh unit gamma, adds
    a fresh delta blinding (so the implicit row exponent becomes
    gamma*r + delta) and consumes the parent's level-(k+1) spare slot
    for the new suffix attribute. The child policy need not be more
    restrictive than the parent's: new suffixes extend parent vectors,
    and their shares are the rescaled parent shares.
    """
    k = sk.depth
    if not sk.rows[0].tail:
        raise ValueError("key is already at the maximum depth, nothing to delegate")
    plan = check_delegation(sk.structure, spec, pk.matrix)
    n = pk.params.modulus.n
    gammas = [random_unit(rng, n) for _ in plan]
    deltas = [random_scalar(rng, n) for _ in plan]
    child_structure = derive_child(sk.structure, plan, gammas)
    rows = []
    for (parent_row, child_vector), gamma, delta in zip(plan, gammas, deltas):
        parent = sk.rows[parent_row]
        suffix = child_vector.name_at(k + 1)
        u_next = encode_attr(suffix, k + 1, n)
        k0 = bilinear.mul(
            bilinear.mul(
                bilinear.exp(parent.k0, gamma),
                bilinear.exp(pk.v[child_vector.first_column - 1], delta),
            ),
            _fresh_g3(pk, rng),
        )
        k1 = bilinear.mul(
            bilinear.mul(bilinear.exp(parent.k1, gamma), bilinear.exp(pk.g, delta)),
            _fresh_g3(pk, rng),
        )
        k2 = bilinear.mul(
            bilinear.mul(
                bilinear.mul(
                    bilinear.exp(parent.k2, gamma),
                    bilinear.exp(parent.tail[0], gamma * u_next),
                ),
                bilinear.exp(_hash_chain(pk, child_vector), delta),
            ),
            _fresh_g3(pk, rng),
        )
        tail = tuple(
            bilinear.mul(
                bilinear.mul(
                    bilinear.exp(parent.tail[slot], gamma),
                    bilinear.exp(pk.h[k + 1 + slot - 1], delta),
                ),
                _fresh_g3(pk, rng),
            )
            for slot in range(1, len(parent.tail))
        )
        rows.append(KeyRow(k0=k0, k1=k1, k2=k2, tail=tail))
    if trace is not None:
        trace["gamma"] = gammas
        trace["delta"] = deltas
    return SecretKey(structure=child_structure, rows=tuple(rows), matrix_fp=sk.matrix_fp)


def decrypt(pk: PublicKey, sk: SecretKey, ct: Ciphertext) -> GTElement:
    """Recover the message, or raise NotAuthorized.

    Performs exactly three pairings per matched row: rows whose labels
    appear in the ciphertext set all participate, even when their
    reconstruction coefficient is zero.
    """
    if sk.depth != ct.depth:
        raise ValueError(f"depth mismatch: key {sk.depth} vs ciphertext {ct.depth}")
    omega = reconstruction(ct.attrs, sk.structure)
    m_prime = bilinear.gt_identity(pk.params)
    for row_index, coeff in omega.items():
        row = sk.rows[row_index]
        j = ct.attrs.index(sk.structure.rho[row_index])
        c0, c1 = ct.pairs[j]
        numerator = bilinear.gt_mul(bilinear.pair(ct.e, row.k0), bilinear.pair(c1, row.k2))
        term = bilinear.gt_mul(numerator, bilinear.gt_inv(bilinear.pair(c0, row.k1)))
        m_prime = bilinear.gt_mul(m_prime, bilinear.gt_exp(term, coeff))
    return bilinear.gt_mul(ct.c, bilinear.gt_inv(m_prime))


# --- hybrid encryption -------------------------------------------------------


def _dem_key(mask: GTElement) -> bytes:
    return hashlib.sha256(bilinear.serialize(mask)).digest()


def kem_encrypt(pk: PublicKey, attrs: AttributeSet, payload: bytes, rng) -> tuple[Ciphertext, bytes]:
    """Seal arbitrary bytes: encapsulate a random target-group element,
    hash it into a ChaCha20-Poly1305 key, and seal the payload."""
    mask = bilinear.random_gt(pk.params, rng)
    ct = encrypt(pk, attrs, mask, rng)
    nonce = rng.randbytes(NONCE_LEN)
    sealed = ChaCha20Poly1305(_dem_key(mask)).encrypt(nonce, payload, None)
    return ct, nonce + sealed


def kem_decrypt(pk: PublicKey, sk: SecretKey, ct: Ciphertext, blob: bytes) -> bytes:
    """Reverse kem_encrypt; raises NotAuthorized before touching the
    sealed payload, and InvalidTag on any tampering."""
    if len(blob) < NONCE_LEN + 16:
        raise ValueError("sealed blob is too short")
    mask = decrypt(pk, sk, ct)
    nonce, sealed = blob[:NONCE_LEN], blob[NONCE_LEN:]
    return ChaCha20Poly1305(_dem_key(mask)).decrypt(nonce, sealed, None)


def with_payload(ct: Ciphertext, blob: bytes) -> Ciphertext:
    return replace(ct, payload=blob)


__all__ = [
    "PublicKey",
    "MasterSecretKey",
    "SecretKey",
    "KeyRow",
    "Ciphertext",
    "NotAuthorized",
    "InvalidTag",
    "setup",
    "encrypt",
    "keygen",
    "delegate",
    "decrypt",
    "kem_encrypt",
    "kem_decrypt",
    "with_payload",
]
