import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sasaki3.errors import EvaluationError, ExpressionSyntaxError
from sasaki3.expr import (FUNCTIONS, BinOp, Call, FieldExpression, Name, Neg, Num,
                          parse_field_expression, to_string)
from sasaki3.jets import Jet

from conftest import fd_partial


def test_constant_expression():
    e = FieldExpression.parse("1/sqrt(2)")
    assert e.is_constant
    assert e(0.0, 0.0) == pytest.approx(0.7071067811865476, rel=1e-15)


def test_round_conformal_factor():
    e = FieldExpression.parse("0.5*sqrt(2)*(1+u^2+v^2)")
    assert e.values(0.3, -0.4) == pytest.approx(0.5 * np.sqrt(2) * 1.25)
    assert e.canonical == "0.5*sqrt(2)*(1 + u^2 + v^2)"


@pytest.mark.parametrize("text,offset", [("1+*u", 2), ("foo(u)", 0), ("sin u", 4), ("(u", 2),
                                         ("u)", 1), ("u $ v", 2), ("", 0), ("é+u", 0), ("u+é", 2)])
def test_syntax_errors(text, offset):
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse_field_expression(text)
    assert exc.value.offset == offset


@pytest.mark.parametrize("text,value", [("-2^2", -4.0), ("2^3^2", 512.0), ("2^-1", 0.5),
                                        ("8/2/2", 2.0), ("1-2-3", -4.0), ("--3", 3.0),
                                        ("2*pi", 2 * np.pi), ("e^1", np.e), ("1e2+.5", 100.5)])
def test_precedence(text, value):
    assert FieldExpression.parse(text).values(0, 0) == pytest.approx(value)


def test_whitespace_insensitive():
    assert parse_field_expression(" u *  ( v+1 ) ") == parse_field_expression("u*(v+1)")


@pytest.mark.parametrize("text,offset", [("1/(u-u)", 1), ("ln(u-1)", 0), ("atanh(u+0.5)", 0),
                                         ("sqrt(u-1)", 0), ("(u-1)^0.5", 5)])
def test_evaluation_errors_carry_offsets(text, offset):
    with pytest.raises(EvaluationError) as exc:
        FieldExpression.parse(text).field().jet(0.5, 0.1)
    assert exc.value.offset == offset


def test_jets_from_expression_match_finite_differences():
    e = FieldExpression.parse("exp(u*v)/sqrt(1+u^2) + atan(u-v)^3 + tanh(v)*sin(u)")
    j = e.field().jet(0.3, 0.7)
    f = lambda p: e.values(p[0], p[1])
    for alpha in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]:
        assert j.partial(*alpha) == pytest.approx(fd_partial(f, [0.3, 0.7], alpha), abs=1e-5)


def test_variable_exponent():
    j = FieldExpression.parse("(1+u^2)^v").field().jet(0.5, 2.0)
    assert j.value == pytest.approx(1.25**2)
    assert j.partial(0, 1) == pytest.approx(np.log(1.25) * 1.25**2)


# round trips --------------------------------------------------------------------

leaves = st.one_of(
    st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num),
    st.sampled_from(["u", "v", "pi", "e"]).map(Name),
)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(sorted(FUNCTIONS)), children).map(lambda t: Call(*t)),
    )


asts = st.recursive(leaves, _extend, max_leaves=12)


@settings(max_examples=200)
@given(asts)
def test_parse_of_print_is_identity(ast):
    assert parse_field_expression(to_string(ast)) == ast


@settings(max_examples=200)
@given(asts)
def test_print_is_canonical(ast):
    text = to_string(ast)
    assert to_string(parse_field_expression(text)) == text
