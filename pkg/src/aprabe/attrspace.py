"""Hierarchical attribute universe: the L x D attribute matrix, depth-k
attribute vectors, the prefix relation, and the hash encoding of
attribute names into Z_N exponents."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .algebra import Scalar, _mod_of

EMPTY = "∅"

_FORBIDDEN_CHARS = ("]", ",")


@dataclass(frozen=True)
class AttributeMatrix:
    """L levels of D attribute names each; EMPTY marks unused cells.

    Every non-empty name is unique across the whole matrix, so a name
    alone determines its (level, column) position.
    """

    levels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if not self.levels or not self.levels[0]:
            raise ValueError("attribute matrix must be non-empty")
        width = len(self.levels[0])
        if any(len(row) != width for row in self.levels):
            raise ValueError("ragged attribute matrix")
        seen: set[str] = set()
        for row in self.levels:
            for name in row:
                _check_name(name)
                if name == EMPTY:
                    continue
                if name in seen:
                    raise ValueError(f"duplicate attribute name: {name!r}")
                seen.add(name)

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def width(self) -> int:
        return len(self.levels[0])

    def column_of(self, level: int, name: str) -> int:
        """1-based column of `name` in row `level`; EMPTY maps to the
        reserved pseudo-column 0."""
        if name == EMPTY:
            return 0
        row = self.levels[level - 1]
        try:
            return row.index(name) + 1
        except ValueError:
            raise ValueError(f"{name!r} is not a level-{level} attribute") from None

    def canonical_json(self) -> bytes:
        doc = {"levels": [list(row) for row in self.levels]}
        return json.dumps(doc, ensure_ascii=False, separators=(",", ":")).encode("utf-8")

    def fingerprint(self) -> bytes:
        return hashlib.sha256(self.canonical_json()).digest()


def _check_name(name: str) -> None:
    if not name:
        raise ValueError("empty attribute name (use the ∅ token)")
    if name != name.strip():
        raise ValueError(f"attribute name has surrounding whitespace: {name!r}")
    for ch in _FORBIDDEN_CHARS:
        if ch in name:
            raise ValueError(f"attribute name may not contain {ch!r}: {name!r}")


def load_matrix(text: str | bytes) -> AttributeMatrix:
    """Parse the JSON matrix format {"levels": [[...], ...]}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"matrix is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "levels" not in doc:
        raise ValueError('matrix JSON must be an object with a "levels" key')
    levels = doc["levels"]
    if not isinstance(levels, list) or not all(isinstance(r, list) for r in levels):
        raise ValueError('"levels" must be a list of lists of names')
    for row in levels:
        for name in row:
            if not isinstance(name, str):
                raise ValueError("attribute names must be strings")
    return AttributeMatrix(tuple(tuple(row) for row in levels))


@dataclass(frozen=True)
class AttributeVector:
    """One attribute per level 1..k; entries are (column, name) pairs.

    Equality is exact coordinate-wise equality, EMPTY entries included.
    """

    entries: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("attribute vector must have depth >= 1")

    @property
    def depth(self) -> int:
        return len(self.entries)

    @property
    def first_column(self) -> int:
        return self.entries[0][0]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for _, name in self.entries)

    def name_at(self, level: int) -> str:
        return self.entries[level - 1][1]

    def extended(self, column: int, name: str) -> "AttributeVector":
        return AttributeVector(self.entries + ((column, name),))

    def __str__(self) -> str:
        return "[" + ",".join(self.names) + "]"


def make_vector(matrix: AttributeMatrix, names) -> AttributeVector:
    """Resolve a list of names, one per level from the top, against the matrix."""
    names = list(names)
    if not 1 <= len(names) <= matrix.depth:
        raise ValueError(f"vector depth must be in 1..{matrix.depth}, got {len(names)}")
    entries = []
    for level, name in enumerate(names, start=1):
        entries.append((matrix.column_of(level, name), name))
    return AttributeVector(tuple(entries))


def is_prefix(shorter: AttributeVector, longer: AttributeVector) -> bool:
    """Strict prefix: shorter must be strictly shallower and agree on
    every one of its coordinates."""
    if shorter.depth >= longer.depth:
        return False
    return shorter.entries == longer.entries[: shorter.depth]


def encode_attr(name: str, level: int, modulus) -> Scalar:
    """Map an attribute name at a level to a Z_N exponent.

    SHA-256 over `ascii(level) || 0x1F || utf8(name)` reduced mod N;
    the EMPTY token hashes the reserved byte 0x00 instead of a name, so
    it cannot collide with any real attribute. Tagging with the level
    keeps the same name at different levels at distinct exponents.
    """
    if level < 1:
        raise ValueError("levels are 1-based")
    tail = b"\x00" if name == EMPTY else name.encode("utf-8")
    data = str(level).encode("ascii") + b"\x1f" + tail
    digest = hashlib.sha256(data).digest()
    n = _mod_of(modulus)
    return Scalar(int.from_bytes(digest, "big"), n)


@dataclass(frozen=True)
class AttributeSet:
    """Ordered set of distinct attribute vectors of uniform depth."""

    vectors: tuple[AttributeVector, ...]

    def __post_init__(self):
        if not self.vectors:
            raise ValueError("attribute set must hold at least one vector")
        depth = self.vectors[0].depth
        if any(v.depth != depth for v in self.vectors):
            raise ValueError("attribute set vectors must share one depth")
        if len(set(self.vectors)) != len(self.vectors):
            raise ValueError("duplicate vector in attribute set")

    @property
    def depth(self) -> int:
        return self.vectors[0].depth

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, vector: AttributeVector) -> bool:
        return vector in self.vectors

    def __iter__(self):
        return iter(self.vectors)

    def index(self, vector: AttributeVector) -> int:
        return self.vectors.index(vector)
