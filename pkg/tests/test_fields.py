import itertools
from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from toroidal.errors import DivisionByZero, FieldMismatch, ValidationError
from toroidal.fields import (
    FieldSpec,
    NoRoot,
    Scalar,
    arithmetic,
    nth_root,
    rational_nth_roots,
    rational_roots,
    rational_value,
)

from strategies import FIELDS, QCBRT2, QI, QQ, QSQRT2, elements, nonzero_elements, rationals


def test_rational_sum():
    assert arithmetic(QQ(mpq(1, 2)), QQ(mpq(1, 3)), "add") == QQ(mpq(5, 6))


def test_i_squared():
    i = QI.gen()
    assert arithmetic(i, i, "mul") == QI(-1)


def test_gaussian_quotient():
    i = QI.gen()
    assert arithmetic(1 + i, 1 - i, "div") == i


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        QQ(1) / QQ(0)
    with pytest.raises(ZeroDivisionError):
        QI.gen() / QI(0)


def test_field_mismatch():
    with pytest.raises(FieldMismatch):
        arithmetic(QI.gen(), QSQRT2.gen(), "add")
    with pytest.raises(FieldMismatch):
        QI.gen() + QSQRT2.gen()


def test_rationals_promote_into_extensions():
    assert QQ(2) * QI.gen() == Scalar(QI, (0, 2))


def test_canonical_form_and_hash():
    a = Scalar(QI, (mpq(2, 4), mpq(0)))
    b = QI(Fraction(1, 2))
    assert a == b and hash(a) == hash(b)
    assert str(Scalar(QI, (3, 2))) == "3 + 2*i"


@pytest.mark.parametrize(
    "poly",
    [
        (1, 0, 2),  # non-monic
        (-1, 0, 1),  # t^2 - 1 has root 1
        (1,),
        (0, 0, 1),
    ],
)
def test_bad_min_polys(poly):
    with pytest.raises(ValidationError):
        FieldSpec.number_field(poly)


def test_degree_four_needs_trust():
    with pytest.raises(ValidationError):
        FieldSpec.number_field((1, 0, 0, 0, 1))
    FieldSpec.number_field((1, 0, 0, 0, 1), trusted=True)


def test_degree_four_factor_search():
    # t^4 + 4 = (t^2 + 2t + 2)(t^2 - 2t + 2) has no rational root
    with pytest.raises(ValidationError):
        FieldSpec.number_field((4, 0, 0, 0, 1), trusted=True)


def test_rational_value():
    assert rational_value(QI(mpq(5, 6))) == mpq(5, 6)
    assert rational_value(QI.gen()) is None
    assert rational_value(Scalar(QI, (3, 0))) == 3


# -- n-th roots -------------------------------------------------------------


def test_nth_root_examples():
    assert nth_root(QQ(4), 2) == QQ(2)
    assert nth_root(QI(-1), 2) == QI.gen()
    r = nth_root(QI.gen(), 4)
    assert isinstance(r, NoRoot) and r.certified


def test_nth_root_misc():
    assert nth_root(QQ(mpq(-27, 8)), 3) == QQ(mpq(-3, 2))
    assert isinstance(nth_root(QQ(-4), 2), NoRoot)
    assert nth_root(QSQRT2(2), 2) ** 2 == QSQRT2(2)
    no = nth_root(QI(2), 2)
    assert isinstance(no, NoRoot) and no.certified
    assert nth_root(QCBRT2(2), 3) ** 3 == QCBRT2(2)


def test_nth_root_needs_nonzero():
    with pytest.raises(ValidationError):
        nth_root(QQ(0), 2)


def test_higher_degree_search_is_not_certified():
    r = nth_root(QCBRT2(3), 2)
    assert isinstance(r, NoRoot) and not r.certified


def _factor(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _is_power(n, k):
    return all(e % k == 0 for e in _factor(n).values())


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 10**6), st.integers(1, 10**6), st.integers(1, 6), st.booleans())
def test_rational_roots_agree_with_factorization(num, den, n, negative):
    q = mpq(-num if negative else num, den)
    want = _is_power(q.numerator if q > 0 else -q.numerator, n) and _is_power(q.denominator, n)
    if negative and n % 2 == 0:
        want = False
    got = nth_root(QQ(q), n)
    assert (not isinstance(got, NoRoot)) == want
    if want:
        assert got ** n == QQ(q)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["QQ", "QI", "QSQRT2"]), st.data(), st.integers(1, 5))
def test_roots_of_powers_are_found(name, data, n):
    fld = FIELDS[name]
    b = data.draw(nonzero_elements(fld))
    r = nth_root(b ** n, n)
    assert not isinstance(r, NoRoot)
    assert r ** n == b ** n


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(sorted(FIELDS)), st.data(), st.integers(1, 4))
def test_returned_roots_are_roots(name, data, n):
    fld = FIELDS[name]
    a = data.draw(nonzero_elements(fld))
    r = nth_root(a, n)
    if not isinstance(r, NoRoot):
        assert r ** n == a


def test_rational_nth_roots_order():
    assert rational_nth_roots(mpq(4, 9), 2) == [mpq(2, 3), mpq(-2, 3)]
    assert rational_nth_roots(-8, 3) == [-2]
    assert rational_nth_roots(2, 2) == []


@settings(max_examples=200, deadline=None)
@given(st.lists(rationals, min_size=0, max_size=4), st.integers(0, 3))
def test_rational_roots_of_products(roots, extra):
    # prod (t - r) * (t^2 + t + 1)^extra; the quadratic has no rational roots
    poly = [mpq(1)]
    for r in roots:
        poly = [mpq(0)] + poly
        for k in range(len(poly) - 1):
            poly[k] -= r * poly[k + 1]
    for _ in range(extra):
        out = [mpq(0)] * (len(poly) + 2)
        for k, c in enumerate(poly):
            for j, d in enumerate((1, 1, 1)):
                out[k + j] += c * d
        poly = out
    assert rational_roots(poly) == sorted(set(roots))


# -- field axioms -----------------------------------------------------------


def _axioms(fld, data):
    a, b, c = (data.draw(elements(fld)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a and a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a + fld(0) == a and a * fld(1) == a
    assert a - a == fld(0)
    if not a.is_zero():
        assert a * a.inverse() == fld(1)
        assert (b / a) * a == b


@pytest.mark.parametrize("name", sorted(FIELDS))
@settings(max_examples=500, deadline=None)
@given(data=st.data())
def test_field_axioms(name, data):
    _axioms(FIELDS[name], data)


def test_power_basis_reduction_matches_direct_expansion():
    fld = QCBRT2
    c = fld.gen()
    assert c ** 3 == fld(2)
    assert c ** 4 == fld(2) * c
    for a, b in itertools.product(range(-2, 3), repeat=2):
        x = a + b * c
        assert x * x == a * a + 2 * a * b * c + b * b * c * c
