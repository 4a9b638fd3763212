import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellipse_lab.errors import SymbolSyntaxError
from ellipse_lab.symbols import MAX_LENGTH, parse_symbol

# every value below is exactly representable, so equality is bit-exact
VECTORS = [
    ("1 + 2*theta^2", "theta", 0.5, 1.5),
    ("cos(2*theta)", "theta", 0.0, 1.0),
    ("(theta+1)*(theta-1)", "theta", 3.0, 8.0),
    ("2^3^2", "theta", 0.0, 512.0),
    ("2**3", "theta", 0.0, 8.0),
    ("-theta^2", "theta", 3.0, -9.0),
    ("--theta", "theta", 2.0, 2.0),
    ("theta/4 - 1", "theta", 1.0, -0.75),
    ("sqrt(u)", "u", 0.25, 0.5),
    ("exp(0*u) + sin(0*u)", "u", 0.7, 1.0),
    ("pi", "u", 0.3, math.pi),
    ("e", "theta", 0.3, math.e),
    ("1e-3 * u", "u", 1000.0, 1.0),
]


@pytest.mark.parametrize("text,var,x,want", VECTORS)
def test_bit_exact_vectors(text, var, x, want):
    assert parse_symbol(text, var)(x) == want


def test_vectorized_and_constant_broadcast():
    th = np.linspace(0, 1, 7)
    np.testing.assert_array_equal(parse_symbol("theta*2")(th), th * 2)
    out = parse_symbol("3")(th)
    assert out.shape == th.shape and np.all(out == 3.0)
    assert isinstance(parse_symbol("3")(0.1), float)


@pytest.mark.parametrize(
    "text",
    [
        "",
        "   ",
        "theta +",
        "x",
        "u",  # wrong variable for the theta context
        "tan(theta)",
        "cos(theta, 2)",
        "cos(theta=1)",
        "theta % 2",
        "theta // 2",
        "theta if theta else 1",
        "__import__('os')",
        "theta.real",
        "[theta]",
        "'abc'",
        "True",
        "lambda: 1",
        "theta == 1",
        "(1).__class__",
        "1" * (MAX_LENGTH + 1),
    ],
)
def test_rejections(text):
    with pytest.raises(SymbolSyntaxError):
        parse_symbol(text)


def test_unknown_variable_context():
    with pytest.raises(ValueError):
        parse_symbol("x", "x")


small = st.integers(min_value=-9, max_value=9)


@settings(max_examples=200, deadline=None)
@given(a=small, b=small, c=small, x=st.floats(min_value=-4, max_value=4, allow_nan=False))
def test_arithmetic_matches_python(a, b, c, x):
    text = f"({a})*theta^2 + ({b})*theta - ({c})"
    want = a * x**2 + b * x - c
    assert parse_symbol(text)(x) == pytest.approx(want, rel=1e-15, abs=1e-15)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_caret_is_power(x):
    assert parse_symbol("theta^3")(x) == parse_symbol("theta**3")(x)
