import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from contactcurv.acceptance import mp_eval
from contactcurv.errors import EvalDomainError, ParseError
from contactcurv.expr import Bin, Num, Var, compile_value, eval_jet2, eval_value, parse, to_text


def test_parse_quadric():
    ast = parse("t - 2*x*y")
    x, y, t = Var("x", 0), Var("y", 1), Var("t", 2)
    assert ast == Bin("-", t, Bin("*", Bin("*", Num(2.0), x), y))


def test_parse_koranyi():
    ast = parse("(x^2+y^2)^2 + t^2 - 1")
    assert eval_value(ast, (1.0, 0.0, 0.0)) == 0.0


def test_parse_incomplete():
    with pytest.raises(ParseError) as err:
        parse("t - ")
    assert err.value.offset == 4
    assert "operand" in str(err.value)


@pytest.mark.parametrize("text", ["x +* y", "foo(x)", "x^y", "(x", "q"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse(text)


def test_unary_minus_binds_looser_than_power():
    assert eval_value(parse("-x^2"), (3.0, 0, 0)) == -9.0
    assert eval_value(parse("2^-1"), (0, 0, 0)) == 0.5


def test_eval_quadric_jet():
    jet = eval_jet2(parse("t - 2*x*y"), (1, 1, 2))
    assert jet.value == 0.0
    assert np.array_equal(jet.gradient, [-2.0, -2.0, 1.0])
    expected = np.zeros((3, 3))
    expected[0, 1] = expected[1, 0] = -2.0
    assert np.array_equal(jet.hessian, expected)


def test_pythagoras():
    jet = eval_jet2(parse("sin(x)^2 + cos(x)^2"), (0.7, 0, 0))
    assert abs(jet.value - 1) < 1e-15
    assert np.max(np.abs(jet.gradient)) < 1e-15


def test_ln_domain():
    with pytest.raises(EvalDomainError) as err:
        eval_jet2(parse("ln(y)"), (0, -1, 0))
    assert "ln" in str(err.value)


def test_custom_chart():
    ast = parse("a + l*t", ("a", "l", "t"))
    assert eval_value(ast, (1, 2, 3)) == 7.0


_leaf = st.one_of(
    st.sampled_from(["x", "y", "t", "pi"]),
    st.floats(-3, 3, allow_nan=False).map(lambda v: repr(round(v, 3))),
)
_funcs = ["sin", "cos", "atan", "exp", "tanh", "sinh", "sqrt", "ln", "abs", "tan", "asin"]


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from(_funcs), children).map(lambda p: f"{p[0]}({p[1]})"),
        st.tuples(children, st.sampled_from("+-*/"), children).map(lambda p: f"({p[0]} {p[1]} {p[2]})"),
        st.tuples(children, st.integers(0, 3)).map(lambda p: f"({p[0]})^{p[1]}"),
        children.map(lambda c: f"-{c}"),
    )


expressions = st.recursive(_leaf, _extend, max_leaves=8)
points = st.tuples(*[st.floats(-1.5, 1.5)] * 3)


@settings(max_examples=200, deadline=None)
@given(expressions)
def test_round_trip(text):
    ast = parse(text)
    assert parse(to_text(ast)) == ast
    assert to_text(parse(to_text(ast))) == to_text(ast)


@settings(max_examples=200, deadline=None)
@given(expressions, points)
def test_compiled_value_matches_jet(text, p):
    ast = parse(text)
    try:
        jet = eval_jet2(ast, p)
    except EvalDomainError as exc:
        if "overflow" not in str(exc):
            with pytest.raises(EvalDomainError):
                compile_value(ast)(p)
        return
    v = compile_value(ast)(p)
    assert v == pytest.approx(jet.value, rel=1e-12, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(expressions, points)
def test_jet_matches_high_precision_oracle(text, p):
    import mpmath as mp

    ast = parse(text)
    try:
        jet = eval_jet2(ast, p)
    except EvalDomainError:
        return
    scale = max(1.0, abs(jet.value), float(np.max(np.abs(jet.gradient))), float(np.max(np.abs(jet.hessian))))
    assume(scale < 1e6)
    with mp.workdps(40):
        q = [mp.mpf(v) for v in p]
        try:
            value = mp_eval(ast, q)
            grad = [mp.diff(lambda *z: mp_eval(ast, list(z)), q, tuple(int(i == j) for j in range(3))) for i in range(3)]
        except (ValueError, ZeroDivisionError, TypeError):
            return
    assume(all(isinstance(g, mp.mpf) for g in [value, *grad]))
    assert abs(float(value) - jet.value) <= 1e-9 * scale
    assert np.max(np.abs(np.array([float(g) for g in grad]) - jet.gradient)) <= 1e-6 * scale


@settings(max_examples=100, deadline=None)
@given(expressions, points)
def test_hessian_symmetric(text, p):
    try:
        jet = eval_jet2(parse(text), p)
    except EvalDomainError:
        return
    H = jet.hessian
    assert np.array_equal(H, H.T) or np.allclose(H, H.T, rtol=1e-12, atol=0)


def test_tiny_denominator():
    # value is fine, derivatives are not representable
    with pytest.raises(EvalDomainError, match="overflow"):
        eval_jet2(parse("x / x"), (3.7e-291, 0, 0))
    assert compile_value(parse("x / x"))((3.7e-291, 0, 0)) == 1.0


def test_nonfinite_point_rejected():
    with pytest.raises(ValueError):
        eval_jet2(parse("x"), (math.nan, 0, 0))
