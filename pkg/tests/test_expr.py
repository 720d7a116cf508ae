import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvform.catalog import COORDS5
from curvform.expr import (Binary, Call, Const, EvaluationError, FUNCTIONS, Param, ParseError, Unary, Var,
                           evaluate, format_expression, parse_expression, variables)

PARAMS = ("c1", "c2")


@st.composite
def asts(draw, depth=6):
    if depth <= 1 or draw(st.integers(0, 3)) == 0:
        kind = draw(st.sampled_from(["const", "var", "param"]))
        if kind == "const":
            return Const(draw(st.one_of(st.integers(0, 1000).map(float),
                                        st.floats(0, 1e6, allow_nan=False, allow_infinity=False))))
        if kind == "var":
            return Var(f"x{draw(st.integers(1, 6))}")
        return Param(draw(st.sampled_from(PARAMS)))
    kind = draw(st.sampled_from(["unary", "binary", "call"]))
    if kind == "unary":
        return Unary("-", draw(asts(depth - 1)))
    if kind == "call":
        return Call(draw(st.sampled_from(FUNCTIONS)), (draw(asts(depth - 1)),))
    return Binary(draw(st.sampled_from("+-*/^")), draw(asts(depth - 1)), draw(asts(depth - 1)))


def depth(node):
    if isinstance(node, (Const, Var, Param)):
        return 1
    if isinstance(node, Unary):
        return 1 + depth(node.child)
    if isinstance(node, Call):
        return 1 + max(depth(a) for a in node.args)
    return 1 + max(depth(node.left), depth(node.right))


class TestParse:
    def test_call(self):
        assert parse_expression("exp(x1)") == Call("exp", (Var("x1"),))

    def test_precedence(self):
        node = parse_expression("1 + x1^2 * c1", parameters=["c1"])
        assert node == Binary("+", Const(1.0), Binary("*", Binary("^", Var("x1"), Const(2.0)), Param("c1")))

    def test_power_binds_tighter_than_minus(self):
        assert parse_expression("-x1^2") == Unary("-", Binary("^", Var("x1"), Const(2.0)))
        assert parse_expression("2^3^2") == Binary("^", Const(2.0), Binary("^", Const(3.0), Const(2.0)))
        assert parse_expression("x1-x2-x3") == Binary("-", Binary("-", Var("x1"), Var("x2")), Var("x3"))

    def test_case_iii_h(self):
        assert abs(evaluate(parse_expression("exp(-x1)"), {"x1": 1.0}) - 1 / math.e) < 1e-15

    def test_exponent_literals(self):
        assert parse_expression("1.5e-3") == Const(1.5e-3)

    @pytest.mark.parametrize("src,offset,fragment", [
        ("2x1", 1, ""),
        ("tan(x1)", 0, "unknown function"),
        ("x1 + y", 5, "unknown identifier"),
        ("(x1 + 1", 7, ""),
        ("x1 + * 2", 5, ""),
        ("", 0, "empty"),
        ("x1 $ 2", 3, "unexpected character"),
    ])
    def test_positioned_errors(self, src, offset, fragment):
        with pytest.raises(ParseError) as info:
            parse_expression(src, COORDS5)
        assert info.value.offset == offset
        assert fragment in str(info.value)

    def test_unknown_coordinate_for_chart(self):
        with pytest.raises(ParseError):
            parse_expression("x7", COORDS5)

    def test_depth_limit(self):
        with pytest.raises(ParseError):
            parse_expression("(" * 500 + "x1" + ")" * 500)

    @given(st.text(max_size=40))
    @settings(max_examples=300)
    def test_total_on_arbitrary_text(self, text):
        try:
            parse_expression(text, parameters=PARAMS)
        except ParseError as exc:
            assert 0 <= exc.offset <= len(text)

    @given(st.binary(max_size=30))
    def test_total_on_arbitrary_bytes(self, raw):
        text = raw.decode("latin-1")
        try:
            parse_expression(text)
        except ParseError as exc:
            assert 0 <= exc.offset <= len(text)


class TestFormat:
    @pytest.mark.parametrize("src", ["exp(x1)", "(x5+1)^2", "-x1^2", "x1 - (x2 - x3)", "2^3^2"])
    def test_round_trip_examples(self, src):
        node = parse_expression(src)
        assert parse_expression(format_expression(node)) == node

    def test_integer_constants(self):
        assert format_expression(Const(3.0)) == "3"


class TestEvaluate:
    def test_catalog_closed_forms(self):
        rng = np.random.default_rng(9)
        forms = {
            "exp(x1)": lambda x: math.exp(x[0]),
            "exp(-x1)": lambda x: math.exp(-x[0]),
            "exp(x1+x2)": lambda x: math.exp(x[0] + x[1]),
            "1+x1^2": lambda x: 1 + x[0] ** 2,
            "exp(x4)*(x5+1)^2": lambda x: math.exp(x[3]) * (x[4] + 1) ** 2,
        }
        for src, f in forms.items():
            node = parse_expression(src, COORDS5)
            for x in rng.uniform(0.1, 0.9, size=(10, 5)):
                v = evaluate(node, dict(zip(COORDS5, x)))
                assert abs(v - f(x)) <= 1e-15 * max(1.0, abs(f(x)))

    def test_variables(self):
        assert variables(parse_expression("exp(x1) * c1 + x3", parameters=["c1"])) == {"x1", "x3"}

    @pytest.mark.parametrize("src,env", [("log(x1)", {"x1": -1.0}), ("1/x1", {"x1": 0.0}),
                                         ("x1^0.5", {"x1": -2.0}), ("sqrt(x1)", {"x1": -1.0})])
    def test_evaluation_errors(self, src, env):
        with pytest.raises(EvaluationError):
            evaluate(parse_expression(src), env)

    def test_missing_parameter(self):
        with pytest.raises(EvaluationError):
            evaluate(parse_expression("c1*x1", parameters=["c1"]), {"x1": 1.0})


@given(asts())
@settings(max_examples=100)
def test_round_trip_random(node):
    assert depth(node) <= 6
    assert parse_expression(format_expression(node), parameters=PARAMS) == node
