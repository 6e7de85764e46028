from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reachmod.polyring import (
    Polynomial,
    PolynomialParseError,
    Ring,
    coefficients_in_y,
    decode,
    encode,
    from_y_coefficients,
    render_polynomial,
)

QT = Ring(("t", "w"))
GF = Ring(("t",), 32003)


def polys(ring, max_terms=5, max_exp=3):
    coeff = st.integers(-20, 20)
    if ring.modulus is None:
        coeff = st.builds(Fraction, coeff, st.integers(1, 7))
    exps = st.tuples(*[st.integers(0, max_exp)] * ring.nvars)
    return st.dictionaries(exps, coeff, max_size=max_terms).map(lambda d: Polynomial(ring, d))


@given(polys(QT), polys(QT), polys(QT))
def test_ring_axioms_over_q(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QT.zero()


@given(polys(GF), polys(GF))
def test_ring_axioms_over_prime_field(a, b):
    assert (a + b) * (a - b) == a * a - b * b
    assert a * GF.one() == a
    assert all(0 < c < 32003 for _, c in (a * b).items())


@given(polys(QT))
def test_render_parse_roundtrip(f):
    assert QT.parse(render_polynomial(f)) == f


@given(polys(GF))
def test_render_parse_roundtrip_mod_p(f):
    assert GF.parse(render_polynomial(f)) == f


@given(polys(QT))
def test_y_coefficient_split_roundtrip(f):
    parts = coefficients_in_y(f)
    assert all(c.is_y_free() for _, c in parts)
    assert [k for k, _ in parts] == sorted({k for k, _ in parts}, reverse=True)
    assert from_y_coefficients(QT, parts) == f


@given(st.sampled_from(["grevlex", "lex"]), st.tuples(*[st.integers(0, 5)] * 3), st.tuples(*[st.integers(0, 5)] * 3))
def test_order_encoding_is_additive_and_invertible(order, a, b):
    s = tuple(x + y for x, y in zip(a, b))
    assert encode(order, s) == tuple(x + y for x, y in zip(encode(order, a), encode(order, b)))
    assert decode(order, encode(order, a)) == a


def test_pencil_variable_dominates():
    R = Ring(("t",), order="lex")
    assert encode("lex", (5, 0)) < encode("lex", (0, 1))
    assert R.parse("t^5 + y").leading_monomial == (0, 1)


def test_parse_and_render_examples():
    f = QT.parse("(t - w)^2 - 3/2*y")
    assert render_polynomial(f) == "t^2 - 2*t*w + w^2 - 3/2*y"
    assert QT.parse("t**2") == QT.parse("t^2")
    assert QT.parse("-t*w^4").leading_coefficient == -1
    assert render_polynomial(GF.parse("32002*t")) == "-t"
    assert GF.parse("1/2") * GF.const(2) == GF.one()


def test_constant_value():
    assert QT.parse("3/4").constant_value() == Fraction(3, 4)
    with pytest.raises(ValueError):
        QT.parse("t").constant_value()


@pytest.mark.parametrize("bad", ["t +", "x", "t^-1", "(t", "t ^ w", "2 $ t", "1/0"])
def test_parse_errors(bad):
    with pytest.raises((PolynomialParseError, ZeroDivisionError)):
        QT.parse(bad)


def test_ring_validation():
    with pytest.raises(ValueError):
        Ring(("y",))
    with pytest.raises(ValueError):
        Ring(("t", "t"))
    with pytest.raises(ValueError):
        Ring(("1t",))
    with pytest.raises(ValueError):
        Ring((), 2**40)


def test_mixing_rings_is_an_error():
    with pytest.raises(ValueError):
        QT.parse("t") + GF.parse("t")
