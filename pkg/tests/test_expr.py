"""Expression grammar: parsing, error offsets, canonical formatting."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from liouville_ep.expr import ParseError, format_poly, parse_expression
from liouville_ep.poly import GaussRational, MultiPoly

V = ("x", "y")


def gr(re, im=0):
    return GaussRational.of(Fraction(re), Fraction(im))


def const(v):
    return MultiPoly.constant(V, v)


X = MultiPoly.variable(V, "x")
Y = MultiPoly.variable(V, "y")


class TestParsing:
    def test_integer_and_rational_literals(self):
        assert parse_expression("42", V) == const(42)
        assert parse_expression("3/4", ()) == MultiPoly.constant((), Fraction(3, 4))

    def test_decimal_literals_are_exact(self):
        assert parse_expression("0.25", V) == const(Fraction(1, 4))
        assert parse_expression("2.5", V) == const(Fraction(5, 2))
        assert parse_expression("0.1", V) == const(Fraction(1, 10))

    def test_imaginary_unit(self):
        assert parse_expression("i", V) == const(gr(0, 1))
        assert parse_expression("i*i", V) == const(-1)
        assert parse_expression("2*i", V) == const(gr(0, 2))

    def test_precedence(self):
        assert parse_expression("1 + 2*3", V) == const(7)
        assert parse_expression("(1 + 2)*3", V) == const(9)
        assert parse_expression("2*x^2", V) == (X**2).scale(gr(2))
        assert parse_expression("2 - 3 - 4", V) == const(-5)

    def test_unary_minus(self):
        assert parse_expression("-x", V) == X.scale(gr(-1))
        assert parse_expression("--x", V) == X
        assert parse_expression("3 - -2", V) == const(5)

    def test_negated_power_binds_inside(self):
        # '-x^2' is (-x)^2 by the factor grammar, not -(x^2)
        assert parse_expression("-x^2", V) == X**2
        assert parse_expression("-1*x^2", V) == (X**2).scale(gr(-1))

    def test_no_implicit_multiplication(self):
        with pytest.raises(ParseError):
            parse_expression("2x", V)
        with pytest.raises(ParseError):
            parse_expression("x y", V)

    def test_division_by_constant(self):
        assert parse_expression("x/2", V) == X.scale(gr(Fraction(1, 2)))
        assert parse_expression("x/(1/2)", V) == X.scale(gr(2))

    def test_division_by_variable_rejected(self):
        with pytest.raises(ParseError) as exc:
            parse_expression("1/x", V)
        assert exc.value.offset == 1

    def test_division_by_zero_rejected(self):
        with pytest.raises(ParseError):
            parse_expression("x/0", V)
        with pytest.raises(ParseError):
            parse_expression("x/(1 - 1)", V)

    def test_error_offsets(self):
        with pytest.raises(ParseError) as exc:
            parse_expression("x + ", V)
        assert exc.value.offset == 4
        with pytest.raises(ParseError) as exc:
            parse_expression("x + $", V)
        assert exc.value.offset == 4
        with pytest.raises(ParseError) as exc:
            parse_expression("(x + 1", V)
        assert exc.value.offset == 6

    def test_unknown_variable(self):
        with pytest.raises(ParseError):
            parse_expression("z + 1", V)

    def test_power_requires_unsigned_integer(self):
        with pytest.raises(ParseError):
            parse_expression("x^-2", V)
        with pytest.raises(ParseError):
            parse_expression("x^y", V)
        with pytest.raises(ParseError):
            parse_expression("x^(2)", V)

    def test_reserved_imaginary_name(self):
        with pytest.raises(ValueError):
            parse_expression("i", ("i",))

    def test_whitespace_insensitive(self):
        a = parse_expression("x^2+2*x*y  +y^2", V)
        b = parse_expression(" x^2 + 2*x*y + y^2 ", V)
        assert a == b == (X + Y) ** 2


class TestFormatting:
    def test_zero(self):
        assert format_poly(MultiPoly.zero(V)) == "0"

    def test_constants(self):
        assert format_poly(const(3)) == "3"
        assert format_poly(const(Fraction(-1, 2))) == "-1/2"
        assert format_poly(const(gr(0, 1))) == "i"
        assert format_poly(const(gr(0, -1))) == "-i"
        assert format_poly(const(gr(0, 2))) == "2*i"

    def test_unit_coefficients_omitted(self):
        assert format_poly(X) == "x"
        assert format_poly(X.scale(gr(-1))) == "-x"
        assert format_poly(X.scale(gr(0, 1))) == "i*x"

    def test_leading_negative_power_is_unambiguous(self):
        s = format_poly((X**2).scale(gr(-1)))
        assert s == "-1*x^2"
        assert parse_expression(s, V) == (X**2).scale(gr(-1))

    def test_mixed_complex_coefficient_parenthesized(self):
        p = (X**2).scale(gr(Fraction(-1, 2), 3))
        assert format_poly(p) == "(-1/2+3*i)*x^2"

    def test_roundtrip_random(self):
        rng = random.Random(314)
        for _ in range(300):
            terms = {}
            for _ in range(rng.randint(0, 6)):
                e = (rng.randint(0, 4), rng.randint(0, 4))
                c = GaussRational.of(
                    Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
                    Fraction(rng.randint(-6, 6), rng.randint(1, 4)),
                )
                if not c.is_zero():
                    terms[e] = c
            p = MultiPoly(V, terms)
            assert parse_expression(format_poly(p), V) == p


coeff_st = st.builds(
    lambda a, b, c, d: GaussRational.of(Fraction(a, b), Fraction(c, d)),
    st.integers(-9, 9),
    st.integers(1, 6),
    st.integers(-9, 9),
    st.integers(1, 6),
)
term_st = st.tuples(st.tuples(st.integers(0, 5), st.integers(0, 5)), coeff_st)


@settings(max_examples=200, deadline=None)
@given(st.lists(term_st, max_size=7))
def test_roundtrip_property(term_list):
    terms = {}
    for e, c in term_list:
        if not c.is_zero():
            terms[e] = terms.get(e, GaussRational.of(0)) + c
    p = MultiPoly(V, {e: c for e, c in terms.items() if not c.is_zero()})
    assert parse_expression(format_poly(p), V) == p
