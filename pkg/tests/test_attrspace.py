import hashlib
import json

import pytest

from aprabe.attrspace import (
    EMPTY,
    AttributeMatrix,
    AttributeSet,
    encode_attr,
    is_prefix,
    load_matrix,
    make_vector,
)


def test_load_matrix_basic(hospital_matrix):
    text = json.dumps({"levels": [["HospA", "Prof", "Yrs5"], ["Cardio", "Gastro", EMPTY]]})
    m = load_matrix(text)
    assert m.depth == 2
    assert m.width == 3
    assert m.column_of(1, "Prof") == 2
    assert m.column_of(2, EMPTY) == 0


def test_load_matrix_rejects_duplicates_and_ragged():
    with pytest.raises(ValueError, match="duplicate"):
        load_matrix('{"levels": [["Prof", "A"], ["Prof", "B"]]}')
    with pytest.raises(ValueError, match="ragged"):
        load_matrix('{"levels": [["A", "B"], ["C"]]}')
    with pytest.raises(ValueError):
        load_matrix('{"levels": []}')
    with pytest.raises(ValueError):
        load_matrix("not json {")


def test_minimal_matrix():
    m = load_matrix('{"levels": [["X"]]}')
    assert m.depth == 1 and m.width == 1


def test_matrix_rejects_grammar_hostile_names():
    with pytest.raises(ValueError):
        AttributeMatrix((("a,b",),))
    with pytest.raises(ValueError):
        AttributeMatrix((("a]b",),))
    with pytest.raises(ValueError):
        AttributeMatrix(((" padded ",),))


def test_make_vector_resolves_columns(hospital_matrix):
    v = make_vector(hospital_matrix, ["HospitalA", "Cardiologist"])
    assert v.depth == 2
    assert v.first_column == 1
    assert v.names == ("HospitalA", "Cardiologist")


def test_make_vector_rejects_wrong_level(hospital_matrix):
    with pytest.raises(ValueError):
        make_vector(hospital_matrix, ["Cardiologist"])
    with pytest.raises(ValueError):
        make_vector(hospital_matrix, ["HospitalA", "Professor"])
    with pytest.raises(ValueError):
        make_vector(hospital_matrix, ["Nobody"])
    with pytest.raises(ValueError):
        make_vector(hospital_matrix, [])


def test_make_vector_allows_empty_token(hospital_matrix):
    v = make_vector(hospital_matrix, ["HospitalA", EMPTY])
    assert v.depth == 2
    assert v.entries[1] == (0, EMPTY)


def test_roundtrip_names_to_vector(hospital_matrix):
    v = make_vector(hospital_matrix, ["Professor", "Gastroenterologist"])
    assert make_vector(hospital_matrix, v.names) == v


def test_is_prefix(hospital_matrix):
    short = make_vector(hospital_matrix, ["HospitalA"])
    long = make_vector(hospital_matrix, ["HospitalA", "Cardiologist"])
    other = make_vector(hospital_matrix, ["Professor"])
    assert is_prefix(short, long)
    assert not is_prefix(long, long)  # strict: equal vectors are not prefixes
    assert not is_prefix(other, long)
    assert not is_prefix(long, short)


def test_is_prefix_is_strict_partial_order(hospital_matrix):
    a = make_vector(hospital_matrix, ["HospitalB"])
    b = make_vector(hospital_matrix, ["HospitalB", EMPTY])
    assert is_prefix(a, b) and not is_prefix(b, a)
    assert not is_prefix(a, a)


def test_encode_attr_deterministic_and_level_separated():
    n = 101 * 103 * 107
    assert encode_attr("Prof", 1, n) == encode_attr("Prof", 1, n)
    assert encode_attr("Prof", 1, n) != encode_attr("Prof", 2, n)


def test_encode_attr_empty_token_digest():
    # independent recomputation of the reserved empty-token encoding
    n = 101 * 103 * 107
    expected = int.from_bytes(hashlib.sha256(b"2\x1f\x00").digest(), "big") % n
    assert encode_attr(EMPTY, 2, n).value == expected


def test_encode_attr_name_digest_matches_standalone_hash():
    n = 101 * 103 * 107
    expected = int.from_bytes(hashlib.sha256("1\x1fProf".encode()).digest(), "big") % n
    assert encode_attr("Prof", 1, n).value == expected


def test_attribute_set_invariants(hospital_matrix):
    a = make_vector(hospital_matrix, ["HospitalA"])
    b = make_vector(hospital_matrix, ["Professor"])
    deep = make_vector(hospital_matrix, ["HospitalA", "Cardiologist"])
    s = AttributeSet((a, b))
    assert len(s) == 2 and a in s and s.index(b) == 1
    with pytest.raises(ValueError):
        AttributeSet(())
    with pytest.raises(ValueError):
        AttributeSet((a, a))
    with pytest.raises(ValueError):
        AttributeSet((a, deep))


def test_distinct_vectors_differ_in_a_coordinate(hospital_matrix):
    pool = [
        make_vector(hospital_matrix, [n1, n2])
        for n1 in hospital_matrix.levels[0]
        for n2 in ("Cardiologist", "Gastroenterologist", EMPTY)
    ]
    for i, v1 in enumerate(pool):
        for v2 in pool[i + 1 :]:
            assert any(e1 != e2 for e1, e2 in zip(v1.entries, v2.entries))
