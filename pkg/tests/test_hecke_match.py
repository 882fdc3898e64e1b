from itertools import product

import pytest

from ahweights.finite_field import field_create, is_square
from ahweights.hecke_match import (
    CLASS_TABLE,
    EXAMPLES,
    BadNorm,
    EigenRecord,
    HeckeMatchError,
    NoMatch,
    b_invariant,
    bar,
    check_table,
    classify,
    conjugate_record,
    legendre,
    normalize_partition,
    table3_records,
)

F9 = field_create(3, 2)
A = F9.gen()


def label_order(label):
    return int(label.rstrip("ABuv"))


def projective_order(m):
    """Order of a 2x2 matrix over F_9 modulo scalars."""
    a, b, c, d = m
    x = (a, b, c, d)
    for n in range(1, 25):
        if x[1].is_zero() and x[2].is_zero() and x[0] == x[3]:
            return n
        x = (x[0] * a + x[1] * c, x[0] * b + x[1] * d, x[2] * a + x[3] * c, x[2] * b + x[3] * d)
    raise AssertionError("order above 24")


def test_class_table_against_pgl2_enumeration():
    elems = list(F9.elements())
    seen = set()
    for m in product(elems, repeat=4):
        det = m[0] * m[3] - m[1] * m[2]
        if det.is_zero():
            continue
        tr = m[0] + m[3]
        key = (is_square(det), tr * tr / det)
        assert key in CLASS_TABLE
        order = projective_order(m)
        assert order in {label_order(x) for x in CLASS_TABLE[key]}
        seen.add(key)
    # every row of the table is realised
    assert seen == set(CLASS_TABLE)


def test_outer_involution():
    assert bar("8A") == "8B" and bar("10B") == "10A" and bar("4") == "4"
    with pytest.raises(HeckeMatchError):
        bar("7")


def test_b_invariant_and_classification():
    rec = EigenRecord(A ** 3, A ** 7, 7)
    assert b_invariant(rec) == A ** 6 / A ** 7
    assert classify(rec) == {"10A"}
    assert classify(EigenRecord(A ** 2, F9.one(), 7)) == {"4"}
    assert classify(EigenRecord(F9(2), F9.one(), 31)) == {"1", "3"}
    assert classify(EigenRecord(F9.one(), F9.one(), 61)) == {"1", "3"}


def test_partition_resolves_identity_from_order_three():
    rec = EigenRecord(F9.one(), F9.one(), 61, partition="3^3 1")
    assert classify(rec) == {"3"}
    rec = EigenRecord(F9.one(), F9.one(), 61, partition="3 1^3", group="A6")
    assert classify(rec) == {"3"}
    with pytest.raises(NoMatch):
        classify(EigenRecord(F9.one(), F9.one(), 61, partition="5 5"))


def test_bad_inputs():
    with pytest.raises(BadNorm):
        b_invariant(EigenRecord(A, A, 9))
    with pytest.raises(HeckeMatchError):
        EigenRecord(A, F9.zero(), 7)


def test_table_covers_every_invariant():
    # b is a square exactly when d is, so classification alone never fails
    for a, d in product(F9.elements(), repeat=2):
        if not d.is_zero():
            assert classify(EigenRecord(a, d, 7))


def test_partition_normal_form():
    assert normalize_partition("1 2 2 1 2 2") == "2^4 1^2"
    assert normalize_partition("10") == "10"
    assert normalize_partition("3,3,3,1") == "3^3 1"


def test_sign_ambiguity_is_recorded():
    rec = EigenRecord.from_json({"a": "±a^6", "N": 41, "expect": "3"})
    assert rec.sign_ambiguous and rec.a == A ** 6


def test_legendre():
    assert legendre(11, 5) == 1 and legendre(7, 5) == -1


def test_conjugate_rules():
    ia = conjugate_record("Ia", 0)
    assert (ia.a, ia.d, ia.expect) == (A ** 9, A ** 21, "10B")
    iiib = conjugate_record("IIIb1", 0)  # N = 11 is a square mod 5
    assert iiib.a == F9(2) ** 3 and iiib.expect == "4"
    partner = conjugate_record("IIb1", 0)
    assert partner.a == A ** 6 and partner.expect == "3"
    assert conjugate_record("IIb1", 6) is None


def test_table_three_passes():
    records = table3_records()
    report = check_table(records)
    assert report.failed == 0
    listed = sum(1 for data in EXAMPLES.values() for a in data["a"] if a is not None)
    assert listed == 79
    assert report.passed == len(records) == 157


def test_check_table_reports_failures():
    bad = EigenRecord(A ** 2, F9.one(), 7, expect="5A", name="wrong")
    report = check_table([bad])
    assert report.failed == 1 and not report.ok
    assert report.to_json()["rows"][0]["candidates"] == ["4"]


def test_record_json_round_trip():
    rec = EigenRecord(A ** 5, A ** 3, 19, partition="2^5", expect="2v", name="x")
    back = EigenRecord.from_json(rec.to_json())
    assert (back.a, back.d, back.norm, back.partition, back.expect) == (rec.a, rec.d, 19, "2^5", "2v")
