"""Versioned single-file binary persistence for every artifact kind.

Layout: magic "APR1", kind byte, version byte, backend byte, a 4-byte
big-endian body length, the body, then a SHA-256 digest over everything
before it. The digest makes any byte-level corruption detectable before
the body is parsed. Bodies embed the group parameters so each file is
self-contained, plus the SHA-256 fingerprint of the attribute matrix so
mismatched artifact combinations are caught early.
"""

from __future__ import annotations

import hashlib
from typing import Optional

from . import bilinear
from .algebra import FactoredModulus, MatrixZN, Scalar, byte_width, decode_int, encode_int
from .attrspace import AttributeMatrix, AttributeSet, AttributeVector, load_matrix
from .bilinear import BilinearParams, GElement, GTElement
from .lsss import AccessStructure, Origin
from .scheme import Ciphertext, KeyRow, MasterSecretKey, PublicKey, SecretKey

MAGIC = b"APR1"
VERSION = 0x01

KIND_PK = 0x01
KIND_MSK = 0x02
KIND_SK = 0x03
KIND_CT = 0x04
KIND_PARAMS = 0x05

KIND_NAMES = {
    KIND_PK: "public-key",
    KIND_MSK: "master-secret-key",
    KIND_SK: "secret-key",
    KIND_CT: "ciphertext",
    KIND_PARAMS: "group-params",
}

_DIGEST_LEN = 32


class StoreError(Exception):
    """Malformed or mismatched artifact file."""


class IntegrityError(StoreError):
    """Artifact bytes fail their integrity digest."""


class FingerprintMismatch(StoreError):
    """Artifacts were produced over different attribute matrices."""


class _Writer:
    def __init__(self):
        self.parts: list[bytes] = []

    def raw(self, data: bytes):
        self.parts.append(data)

    def u8(self, v: int):
        self.parts.append(v.to_bytes(1, "big"))

    def u16(self, v: int):
        self.parts.append(v.to_bytes(2, "big"))

    def u32(self, v: int):
        self.parts.append(v.to_bytes(4, "big"))

    def lp(self, data: bytes):
        self.u32(len(data))
        self.raw(data)

    def lp_int(self, v: int):
        self.lp(v.to_bytes(max(1, (v.bit_length() + 7) // 8), "big"))

    def getvalue(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise StoreError("truncated artifact body")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u8(self) -> int:
        return self.take(1)[0]

    def u16(self) -> int:
        return int.from_bytes(self.take(2), "big")

    def u32(self) -> int:
        return int.from_bytes(self.take(4), "big")

    def lp(self) -> bytes:
        return self.take(self.u32())

    def lp_int(self) -> int:
        return decode_int(self.lp())

    def done(self) -> bool:
        return self.pos == len(self.data)


# --- params / elements / vectors ---------------------------------------------


def _write_params(w: _Writer, params: BilinearParams):
    m = params.modulus
    for v in (m.n, m.p1, m.p2, m.p3):
        w.lp_int(v)
    if params.backend_name == bilinear.CURVE:
        w.lp_int(params.q)
        w.lp_int(params.cofactor)


def _read_params(r: _Reader, backend_id: int) -> BilinearParams:
    name = bilinear.backend_name_for_id(backend_id)
    n, p1, p2, p3 = (r.lp_int() for _ in range(4))
    try:
        modulus = FactoredModulus(n, p1, p2, p3)
    except ValueError as exc:
        raise StoreError(f"invalid stored modulus: {exc}") from exc
    if name == bilinear.CURVE:
        q = r.lp_int()
        cofactor = r.lp_int()
        try:
            return bilinear.params_from_values(name, modulus, q=q, cofactor=cofactor)
        except ValueError as exc:
            raise StoreError(f"invalid stored curve params: {exc}") from exc
    return bilinear.params_from_values(name, modulus)


def _write_g(w: _Writer, element: GElement):
    w.raw(bilinear.serialize(element))


def _read_g(r: _Reader, params: BilinearParams) -> GElement:
    data = r.take(params.backend.g_width())
    try:
        return bilinear.deserialize_g(params, data)
    except ValueError as exc:
        raise StoreError(f"invalid group element: {exc}") from exc


def _write_gt(w: _Writer, element: GTElement):
    w.raw(bilinear.serialize(element))


def _read_gt(r: _Reader, params: BilinearParams) -> GTElement:
    data = r.take(params.backend.gt_width())
    try:
        return bilinear.deserialize_gt(params, data)
    except ValueError as exc:
        raise StoreError(f"invalid target element: {exc}") from exc


def _write_vector(w: _Writer, vector: AttributeVector):
    w.u16(vector.depth)
    for column, name in vector.entries:
        w.u16(column)
        w.lp(name.encode("utf-8"))


def _read_vector(r: _Reader) -> AttributeVector:
    depth = r.u16()
    if depth == 0:
        raise StoreError("stored vector has depth zero")
    entries = []
    for _ in range(depth):
        column = r.u16()
        name = r.lp().decode("utf-8")
        entries.append((column, name))
    return AttributeVector(tuple(entries))


def _write_structure(w: _Writer, structure: AccessStructure):
    n = structure.matrix.modulus
    width = byte_width(n)
    w.u16(structure.depth)
    w.u16(structure.rows)
    w.u16(structure.cols)
    for row in structure.matrix.entries:
        for e in row:
            w.raw(encode_int(e, width))
    for s in structure.row_scales:
        w.raw(encode_int(s, width))
    w.u8(1 if structure.origin.kind == "compiled" else 2)
    w.raw(structure.origin.fingerprint)
    for vector in structure.rho:
        _write_vector(w, vector)


def _read_structure(r: _Reader, modulus: int) -> AccessStructure:
    width = byte_width(modulus)
    depth = r.u16()
    rows = r.u16()
    cols = r.u16()
    if rows == 0 or cols == 0:
        raise StoreError("stored structure has no rows or columns")
    entries = [
        [decode_int(r.take(width)) for _ in range(cols)] for _ in range(rows)
    ]
    scales = tuple(decode_int(r.take(width)) for _ in range(rows))
    origin_kind = r.u8()
    if origin_kind not in (1, 2):
        raise StoreError(f"unknown structure origin {origin_kind}")
    origin_fp = r.take(_DIGEST_LEN)
    rho = tuple(_read_vector(r) for _ in range(rows))
    try:
        return AccessStructure(
            matrix=MatrixZN.from_rows(entries, modulus),
            rho=rho,
            depth=depth,
            row_scales=scales,
            origin=Origin("compiled" if origin_kind == 1 else "delegated", origin_fp),
        )
    except ValueError as exc:
        raise StoreError(f"invalid stored structure: {exc}") from exc


# --- artifact bodies ----------------------------------------------------------


def _pk_body(pk: PublicKey) -> bytes:
    w = _Writer()
    _write_params(w, pk.params)
    w.raw(pk.matrix_fp)
    w.lp(pk.matrix.canonical_json())
    _write_g(w, pk.g)
    _write_g(w, pk.x3)
    w.u16(len(pk.v))
    for element in pk.v:
        _write_g(w, element)
    w.u16(len(pk.h))
    for element in pk.h:
        _write_g(w, element)
    _write_gt(w, pk.e_gg_alpha)
    return w.getvalue()


def _read_pk(r: _Reader, backend_id: int) -> PublicKey:
    params = _read_params(r, backend_id)
    fp = r.take(_DIGEST_LEN)
    matrix_json = r.lp()
    try:
        matrix = load_matrix(matrix_json)
    except ValueError as exc:
        raise StoreError(f"invalid stored matrix: {exc}") from exc
    if matrix.fingerprint() != fp:
        raise IntegrityError("stored matrix does not match its fingerprint")
    g = _read_g(r, params)
    x3 = _read_g(r, params)
    v = tuple(_read_g(r, params) for _ in range(r.u16()))
    h = tuple(_read_g(r, params) for _ in range(r.u16()))
    e_gg_alpha = _read_gt(r, params)
    if len(v) != matrix.width or len(h) != matrix.depth:
        raise StoreError("stored element counts disagree with the matrix shape")
    return PublicKey(matrix=matrix, params=params, g=g, x3=x3, v=v, h=h, e_gg_alpha=e_gg_alpha)


def _msk_body(msk: MasterSecretKey, params: BilinearParams) -> bytes:
    w = _Writer()
    _write_params(w, params)
    w.raw(msk.matrix_fp)
    w.raw(encode_int(msk.alpha.value, byte_width(params.modulus.n)))
    return w.getvalue()


def _read_msk(r: _Reader, backend_id: int) -> MasterSecretKey:
    params = _read_params(r, backend_id)
    fp = r.take(_DIGEST_LEN)
    alpha = decode_int(r.take(byte_width(params.modulus.n)))
    return MasterSecretKey(alpha=Scalar(alpha, params.modulus.n), matrix_fp=fp)


def _sk_body(sk: SecretKey, params: BilinearParams) -> bytes:
    w = _Writer()
    _write_params(w, params)
    w.raw(sk.matrix_fp)
    w.u16(sk.max_depth)
    _write_structure(w, sk.structure)
    for row in sk.rows:
        _write_g(w, row.k0)
        _write_g(w, row.k1)
        _write_g(w, row.k2)
        for element in row.tail:
            _write_g(w, element)
    return w.getvalue()


def _read_sk(r: _Reader, backend_id: int) -> SecretKey:
    params = _read_params(r, backend_id)
    fp = r.take(_DIGEST_LEN)
    max_depth = r.u16()
    structure = _read_structure(r, params.modulus.n)
    if structure.depth > max_depth:
        raise StoreError("stored key depth exceeds its system depth")
    tail_len = max_depth - structure.depth
    rows = []
    for _ in range(structure.rows):
        k0 = _read_g(r, params)
        k1 = _read_g(r, params)
        k2 = _read_g(r, params)
        tail = tuple(_read_g(r, params) for _ in range(tail_len))
        rows.append(KeyRow(k0=k0, k1=k1, k2=k2, tail=tail))
    return SecretKey(structure=structure, rows=tuple(rows), matrix_fp=fp)


def _ct_body(ct: Ciphertext, params: BilinearParams) -> bytes:
    w = _Writer()
    _write_params(w, params)
    w.raw(ct.matrix_fp)
    w.u16(len(ct.attrs))
    for vector in ct.attrs:
        _write_vector(w, vector)
    _write_gt(w, ct.c)
    _write_g(w, ct.e)
    for c0, c1 in ct.pairs:
        _write_g(w, c0)
        _write_g(w, c1)
    w.lp(ct.payload)
    return w.getvalue()


def _read_ct(r: _Reader, backend_id: int) -> Ciphertext:
    params = _read_params(r, backend_id)
    fp = r.take(_DIGEST_LEN)
    count = r.u16()
    vectors = tuple(_read_vector(r) for _ in range(count))
    try:
        attrs = AttributeSet(vectors)
    except ValueError as exc:
        raise StoreError(f"invalid stored attribute set: {exc}") from exc
    c = _read_gt(r, params)
    e = _read_g(r, params)
    pairs = tuple((_read_g(r, params), _read_g(r, params)) for _ in range(count))
    payload = r.lp()
    return Ciphertext(attrs=attrs, c=c, e=e, pairs=pairs, matrix_fp=fp, payload=payload)


def _params_body(params: BilinearParams) -> bytes:
    w = _Writer()
    _write_params(w, params)
    return w.getvalue()


# --- public surface -----------------------------------------------------------


def save(artifact, params: Optional[BilinearParams] = None) -> bytes:
    """Serialize any artifact to its self-contained file bytes.

    MSK, SK and CT do not carry group params themselves, so those must
    be passed alongside (the CLI always has the public key at hand).
    """
    if isinstance(artifact, PublicKey):
        kind, body, backend = KIND_PK, _pk_body(artifact), artifact.params.backend_id
    elif isinstance(artifact, MasterSecretKey):
        if params is None:
            raise ValueError("saving a master key requires the group params")
        kind, body, backend = KIND_MSK, _msk_body(artifact, params), params.backend_id
    elif isinstance(artifact, SecretKey):
        if params is None:
            raise ValueError("saving a secret key requires the group params")
        kind, body, backend = KIND_SK, _sk_body(artifact, params), params.backend_id
    elif isinstance(artifact, Ciphertext):
        if params is None:
            raise ValueError("saving a ciphertext requires the group params")
        kind, body, backend = KIND_CT, _ct_body(artifact, params), params.backend_id
    elif isinstance(artifact, BilinearParams):
        kind, body, backend = KIND_PARAMS, _params_body(artifact), artifact.backend_id
    else:
        raise TypeError(f"cannot save {type(artifact).__name__}")
    head = MAGIC + bytes([kind, VERSION, backend]) + len(body).to_bytes(4, "big") + body
    return head + hashlib.sha256(head).digest()


def load(data: bytes, expect_kind: Optional[int] = None):
    """Parse artifact bytes back into the corresponding object."""
    if len(data) < 11 + _DIGEST_LEN:
        raise StoreError("artifact file is too short")
    if data[:4] != MAGIC:
        raise StoreError("bad magic: not an artifact file")
    kind, version, backend_id = data[4], data[5], data[6]
    if version != VERSION:
        raise StoreError(f"unsupported artifact version {version}")
    if kind not in KIND_NAMES:
        raise StoreError(f"unknown artifact kind {kind:#x}")
    body_len = int.from_bytes(data[7:11], "big")
    if len(data) != 11 + body_len + _DIGEST_LEN:
        raise StoreError("artifact length does not match its header")
    head = data[: 11 + body_len]
    if hashlib.sha256(head).digest() != data[11 + body_len :]:
        raise IntegrityError("artifact integrity digest mismatch")
    if expect_kind is not None and kind != expect_kind:
        raise StoreError(
            f"expected a {KIND_NAMES[expect_kind]} file, found {KIND_NAMES[kind]}"
        )
    r = _Reader(data[11 : 11 + body_len])
    if kind == KIND_PK:
        artifact = _read_pk(r, backend_id)
    elif kind == KIND_MSK:
        artifact = _read_msk(r, backend_id)
    elif kind == KIND_SK:
        artifact = _read_sk(r, backend_id)
    elif kind == KIND_CT:
        artifact = _read_ct(r, backend_id)
    else:
        artifact = _read_params(r, backend_id)
    if not r.done():
        raise StoreError("trailing bytes after artifact body")
    return artifact


def check_fingerprint(pk: PublicKey, other) -> None:
    """Reject artifact combinations minted over different matrices."""
    fp = getattr(other, "matrix_fp", None)
    if fp is None:
        raise TypeError(f"{type(other).__name__} carries no matrix fingerprint")
    if fp != pk.matrix_fp:
        raise FingerprintMismatch(
            "artifact was created under a different attribute matrix"
        )


def describe(data: bytes) -> dict:
    """Metadata for `inspect`: never dereferences secret material."""
    artifact = load(data)
    kind = data[4]
    info = {
        "kind": KIND_NAMES[kind],
        "version": data[5],
        "backend": bilinear.backend_name_for_id(data[6]),
        "bytes": len(data),
    }
    if isinstance(artifact, PublicKey):
        info.update(
            modulus_bits=artifact.params.modulus.n.bit_length(),
            levels=artifact.matrix.depth,
            columns=artifact.matrix.width,
            matrix_fingerprint=artifact.matrix_fp.hex(),
        )
    elif isinstance(artifact, MasterSecretKey):
        info.update(matrix_fingerprint=artifact.matrix_fp.hex())
    elif isinstance(artifact, SecretKey):
        info.update(
            depth=artifact.depth,
            max_depth=artifact.max_depth,
            rows=artifact.structure.rows,
            origin=artifact.structure.origin.kind,
            matrix_fingerprint=artifact.matrix_fp.hex(),
        )
    elif isinstance(artifact, Ciphertext):
        info.update(
            depth=artifact.depth,
            set_size=len(artifact.attrs),
            sealed_payload_bytes=len(artifact.payload),
            matrix_fingerprint=artifact.matrix_fp.hex(),
        )
    else:
        info.update(modulus_bits=artifact.modulus.n.bit_length())
    return info
