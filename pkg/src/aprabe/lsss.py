"""Policy formulas over attribute vectors, their compilation into
share-generating matrices with injective row labels, satisfiability and
reconstruction, and the policy-redefinition (delegation) machinery."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Union

from .algebra import MatrixZN, Scalar, _mod_of, byte_width, encode_int, solve_target
from .attrspace import EMPTY, AttributeMatrix, AttributeSet, AttributeVector, is_prefix, make_vector


class PolicyError(ValueError):
    """Raised for malformed policy text; carries the offending position."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class NotAuthorized(Exception):
    """The attribute set does not satisfy the access structure."""


@dataclass(frozen=True)
class Leaf:
    vector: AttributeVector


@dataclass(frozen=True)
class And:
    left: "PolicyFormula"
    right: "PolicyFormula"


@dataclass(frozen=True)
class Or:
    left: "PolicyFormula"
    right: "PolicyFormula"


PolicyFormula = Union[Leaf, And, Or]


def leaves(formula: PolicyFormula) -> list[Leaf]:
    if isinstance(formula, Leaf):
        return [formula]
    return leaves(formula.left) + leaves(formula.right)


def format_policy(formula: PolicyFormula) -> str:
    """Canonical text rendering: fully parenthesized binary gates."""
    if isinstance(formula, Leaf):
        return str(formula.vector)
    op = "AND" if isinstance(formula, And) else "OR"
    return f"({format_policy(formula.left)} {op} {format_policy(formula.right)})"


# --- parsing ---------------------------------------------------------------

_KEYWORDS = ("AND", "OR")


class _Tokens:
    def __init__(self, text: str):
        self.items: list[tuple[str, object, int]] = []
        i, n = 0, len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "()":
                self.items.append((ch, ch, i))
                i += 1
                continue
            if ch == "[":
                end = text.find("]", i)
                if end < 0:
                    raise PolicyError("unterminated vector literal", i)
                names = [part.strip() for part in text[i + 1 : end].split(",")]
                if any(not name for name in names):
                    raise PolicyError("empty name in vector literal", i)
                self.items.append(("vector", names, i))
                i = end + 1
                continue
            j = i
            while j < n and not text[j].isspace() and text[j] not in "()[":
                j += 1
            word = text[i:j]
            if word not in _KEYWORDS:
                raise PolicyError(f"unexpected token {word!r}", i)
            self.items.append((word, word, i))
            i = j
        self.pos = 0

    def peek(self):
        return self.items[self.pos] if self.pos < len(self.items) else (None, None, -1)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok


def parse_policy(text: str, matrix: AttributeMatrix) -> PolicyFormula:
    """Parse policy text against an attribute matrix.

    Grammar: OR-separated AND-chains of vector literals `[a,b,...]`,
    with parentheses; n-ary gates become left-nested binaries. Leaves of
    unequal depth are normalized by padding the shorter ones with the
    EMPTY token up to the deepest literal in the formula.
    """
    tokens = _Tokens(text)
    raw = _parse_or(tokens)
    kind, _, pos = tokens.peek()
    if kind is not None:
        raise PolicyError("trailing input after policy", pos)

    max_depth = max(len(names) for names, _ in _raw_leaves(raw))

    def build(node):
        if isinstance(node, tuple) and node[0] == "leaf":
            _, names, pos = node
            padded = names + [EMPTY] * (max_depth - len(names))
            try:
                vector = make_vector(matrix, padded)
            except ValueError as exc:
                raise PolicyError(str(exc), pos) from exc
            return Leaf(vector)
        op, left, right = node
        cls = And if op == "AND" else Or
        return cls(build(left), build(right))

    formula = build(raw)
    seen: set[AttributeVector] = set()
    for leaf in leaves(formula):
        if leaf.vector in seen:
            raise PolicyError(f"duplicate policy leaf {leaf.vector}")
        seen.add(leaf.vector)
    return formula


def _raw_leaves(node):
    if isinstance(node, tuple) and node[0] == "leaf":
        yield node[1], node[2]
    else:
        yield from _raw_leaves(node[1])
        yield from _raw_leaves(node[2])


def _parse_or(tokens):
    node = _parse_and(tokens)
    while tokens.peek()[0] == "OR":
        tokens.next()
        node = ("OR", node, _parse_and(tokens))
    return node


def _parse_and(tokens):
    node = _parse_atom(tokens)
    while tokens.peek()[0] == "AND":
        tokens.next()
        node = ("AND", node, _parse_atom(tokens))
    return node


def _parse_atom(tokens):
    kind, value, pos = tokens.next()
    if kind == "vector":
        return ("leaf", value, pos)
    if kind == "(":
        node = _parse_or(tokens)
        closing, _, cpos = tokens.next()
        if closing != ")":
            raise PolicyError("expected ')'", cpos if cpos >= 0 else pos)
        return node
    raise PolicyError("expected a vector literal or '('", pos)


# --- access structures -----------------------------------------------------

ORIGIN_COMPILED = "compiled"
ORIGIN_DELEGATED = "delegated"


@dataclass(frozen=True)
class Origin:
    kind: str
    fingerprint: bytes


@dataclass(frozen=True)
class AccessStructure:
    """An LSSS: share-generating matrix plus the injective row labeling.

    `row_scales` records, for every row, the accumulated unit factor it
    was multiplied by relative to the originally compiled matrix (all
    ones for freshly compiled structures). Satisfiability solves run on
    the unscaled rows so elimination never meets a non-unit pivot.
    """

    matrix: MatrixZN
    rho: tuple[AttributeVector, ...]
    depth: int
    row_scales: tuple[int, ...]
    origin: Origin

    def __post_init__(self):
        if len(self.rho) != self.matrix.l or len(self.row_scales) != self.matrix.l:
            raise ValueError("row labeling and scales must cover every matrix row")
        if len(set(self.rho)) != len(self.rho):
            raise ValueError("row labeling must be injective")
        if any(v.depth != self.depth for v in self.rho):
            raise ValueError("all labeled vectors must have the structure depth")

    @property
    def rows(self) -> int:
        return self.matrix.l

    @property
    def cols(self) -> int:
        return self.matrix.n

    def unscaled_row(self, i: int) -> tuple[int, ...]:
        scale = self.row_scales[i]
        n = self.matrix.modulus
        if scale == 1:
            return self.matrix.row(i)
        inv = pow(scale, -1, n)
        return tuple(e * inv % n for e in self.matrix.row(i))

    def fingerprint(self) -> bytes:
        return hashlib.sha256(structure_bytes(self)).digest()


def structure_bytes(structure: AccessStructure) -> bytes:
    """Deterministic byte rendering used for fingerprints."""
    n = structure.matrix.modulus
    w = byte_width(n)
    parts = [
        structure.depth.to_bytes(2, "big"),
        structure.rows.to_bytes(2, "big"),
        structure.cols.to_bytes(2, "big"),
        encode_int(n, w),
    ]
    for row in structure.matrix.entries:
        parts.extend(encode_int(e, w) for e in row)
    parts.extend(encode_int(s, w) for s in structure.row_scales)
    for vector in structure.rho:
        parts.append(str(vector).encode("utf-8") + b"\x00")
    parts.append(structure.origin.kind.encode("ascii") + b"\x00")
    parts.append(structure.origin.fingerprint)
    return b"".join(parts)


def compile_policy(formula: PolicyFormula, modulus) -> AccessStructure:
    """Monotone-formula to span-program conversion.

    The root starts labeled (1) with a live column counter of 1. OR
    hands its label to both children. AND pads its label to the counter
    length, appends 1 for one child, labels the other all-zeros
    followed by -1, and bumps the counter. Leaf labels padded to the
    final counter value become the matrix rows, labeled left to right.
    """
    n_mod = _mod_of(modulus)
    counter = 1
    rows: list[tuple[AttributeVector, list[int]]] = []

    def walk(node, label: list[int]):
        nonlocal counter
        if isinstance(node, Leaf):
            rows.append((node.vector, label))
            return
        if isinstance(node, Or):
            walk(node.left, list(label))
            walk(node.right, list(label))
            return
        padded = label + [0] * (counter - len(label))
        left_label = padded + [1]
        right_label = [0] * counter + [-1]
        counter += 1
        walk(node.left, left_label)
        walk(node.right, right_label)

    walk(formula, [1])
    width = counter
    entries = [label + [0] * (width - len(label)) for _, label in rows]
    depth = rows[0][0].depth
    rho = tuple(vector for vector, _ in rows)
    origin = Origin(ORIGIN_COMPILED, hashlib.sha256(format_policy(formula).encode("utf-8")).digest())
    return AccessStructure(
        matrix=MatrixZN.from_rows(entries, n_mod),
        rho=rho,
        depth=depth,
        row_scales=(1,) * len(rows),
        origin=origin,
    )


_TARGET_FIRST = 1


def _matched_rows(attrs: AttributeSet, structure: AccessStructure) -> list[int]:
    return [i for i, vector in enumerate(structure.rho) if vector in attrs]


def _solve_matched(attrs: AttributeSet, structure: AccessStructure):
    if attrs.depth != structure.depth:
        raise ValueError(f"depth mismatch: set {attrs.depth} vs structure {structure.depth}")
    matched = _matched_rows(attrs, structure)
    target = [_TARGET_FIRST] + [0] * (structure.cols - 1)
    rows = [structure.unscaled_row(i) for i in matched]
    solution = solve_target(rows, target, structure.matrix.modulus)
    return matched, solution


def satisfies(attrs: AttributeSet, structure: AccessStructure) -> bool:
    """True iff (1,0,...,0) lies in the span of the rows labeled by `attrs`."""
    _, solution = _solve_matched(attrs, structure)
    return solution is not None


def reconstruction(attrs: AttributeSet, structure: AccessStructure) -> dict[int, Scalar]:
    """Coefficients over every matched row with sum(w_i * A_i) = (1,0,...,0).

    Rows the solver did not need carry coefficient zero; scaled rows get
    their coefficient divided by the stored unit factor.
    """
    matched, solution = _solve_matched(attrs, structure)
    if solution is None:
        raise NotAuthorized("attribute set does not satisfy the access structure")
    n = structure.matrix.modulus
    out: dict[int, Scalar] = {}
    for row_index, coeff in zip(matched, solution):
        scale = structure.row_scales[row_index]
        if scale != 1:
            coeff = coeff * Scalar(pow(scale, -1, n), n)
        out[row_index] = coeff
    return out


# --- delegation ------------------------------------------------------------


@dataclass(frozen=True)
class ChildSpec:
    """Requested child rows: (parent row index, level-(k+1) suffix name)."""

    assignments: tuple[tuple[int, str], ...]

    def __post_init__(self):
        if not self.assignments:
            raise ValueError("child spec must assign at least one row")


def check_delegation(
    parent: AccessStructure, spec: ChildSpec, matrix: AttributeMatrix
) -> list[tuple[int, AttributeVector]]:
    """Validate a redefinition plan against the delegation condition.

    Every parent row must be extended at least once, the suffixes must
    be level-(k+1) names (or EMPTY), and the resulting child vectors
    must stay pairwise distinct so the child labeling is injective.
    Children are parent vectors extended by one level, which makes the
    prefix requirement hold by construction.
    """
    k = parent.depth
    if k + 1 > matrix.depth:
        raise ValueError(f"depth overflow: structure depth {k} is already at the matrix bottom")
    plan: list[tuple[int, AttributeVector]] = []
    covered: set[int] = set()
    children: set[AttributeVector] = set()
    for row_index, suffix in spec.assignments:
        if not 0 <= row_index < parent.rows:
            raise ValueError(f"parent row {row_index} out of range")
        column = matrix.column_of(k + 1, suffix)
        child = parent.rho[row_index].extended(column, suffix)
        if child in children:
            raise ValueError(f"duplicate child vector {child}")
        children.add(child)
        covered.add(row_index)
        plan.append((row_index, child))
    missing = set(range(parent.rows)) - covered
    if missing:
        raise ValueError(f"uncovered parent rows: {sorted(missing)}")
    for _, child in plan:
        assert any(is_prefix(parent.rho[i], child) for i in range(parent.rows))
    return plan


def derive_child(
    parent: AccessStructure,
    plan: list[tuple[int, AttributeVector]],
    gammas: list[Scalar],
) -> AccessStructure:
    """Child structure whose row i is gamma_i times the planned parent row.

    The gammas must be units: reconstruction divides them back out, so a
    zero divisor here would poison every later solve.
    """
    if len(gammas) != len(plan):
        raise ValueError("need exactly one gamma per planned row")
    n = parent.matrix.modulus
    entries = []
    scales = []
    rho = []
    for (parent_row, child_vector), gamma in zip(plan, gammas):
        if not gamma.is_unit():
            raise ValueError(f"gamma {gamma.value} is not a unit mod {n}")
        g = gamma.value
        entries.append([e * g % n for e in parent.matrix.row(parent_row)])
        scales.append(parent.row_scales[parent_row] * g % n)
        rho.append(child_vector)
    return AccessStructure(
        matrix=MatrixZN.from_rows(entries, n),
        rho=tuple(rho),
        depth=parent.depth + 1,
        row_scales=tuple(scales),
        origin=Origin(ORIGIN_DELEGATED, parent.fingerprint()),
    )
